// Copyright (c) 2026 the wafdiff authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "wafdiff/bytes.hpp"

namespace wafdiff::testutil {

// The continuation-boundary request: a benign fake-boundary section followed
// by the payload inside real-boundary framing, split boundary declaration in
// the Content-Type header.
inline Bytes continuation_request() {
    Bytes body =
        "--fake-boundary\r\n"
        "Content-Disposition: form-data; name=\"field1\"\r\n"
        "\r\n"
        "value1\r\n"
        "--fake-boundary--\r\n"
        "--real-boundary\r\n"
        "Content-Disposition: form-data; name=\"id\"\r\n"
        "\r\n"
        "<script>alert(document.cookie)</script>\r\n"
        "--real-boundary--";
    return "POST / HTTP/1.1\r\n"
           "Host: victim.com\r\n"
           "Content-Length: " +
           std::to_string(body.size()) +
           "\r\n"
           "Content-Type: multipart/form-data; "
           "boundary=fake-boundary;boundary*0=real-;boundary*1=boundary\r\n"
           "\r\n" +
           body;
}

// The simple multipart attack request: one part, XSS payload.
inline Bytes simple_multipart_request() {
    Bytes body =
        "--1234\r\n"
        "Content-Disposition: form-data; name=\"field1\"\r\n"
        "\r\n"
        "<script>alert(document.cookie)</script>\r\n"
        "--1234--";
    return "POST / HTTP/1.1\r\n"
           "Host: victim.com\r\n"
           "Content-Length: " +
           std::to_string(body.size()) +
           "\r\n"
           "Content-Type: multipart/form-data; boundary=1234\r\n"
           "\r\n" +
           body;
}

// The messy upload request: case-mangled headers, tab separators, quoted
// boundary, stale length, trailing line ending.
inline Bytes messy_upload_request() {
    return "POST / HTTP/1.1\r\n"
           "Host: target.com\r\n"
           "Content-Type: multipart/FoRm-dAtA; boundary=\"1234\"\r\n"
           "Content-Length: 90\r\n"
           "\r\n"
           "--1234\r\n"
           "Content-DISPOSITION:\tform-data;name=\"files\";\t "
           "filename=\"ab.txt\"\r\n"
           "\r\n"
           "Foo\r\n"
           "--1234--\r\n";
}

// Deterministic generator of structurally valid requests with mixed line
// endings, odd-but-legal headers, and arbitrary body octets.
inline Bytes random_valid_request(DetRng &rng) {
    static const char *kMethods[] = {"GET", "POST", "PUT", "DELETE"};
    Bytes out = kMethods[rng.below(4)];
    out += " /p";
    size_t path_len = rng.below(12);
    for (size_t i = 0; i < path_len; ++i)
        out += static_cast<char>('a' + rng.below(26));
    if (rng.below(2))
        out += "?q=" + std::to_string(rng.below(1000));
    out += " HTTP/1.1";
    bool lf_ok = rng.below(4) == 0;
    auto ending = [&]() -> Bytes { return lf_ok && rng.below(3) == 0 ? "\n" : "\r\n"; };
    out += ending();

    size_t n_headers = rng.below(8);
    for (size_t i = 0; i < n_headers; ++i) {
        Bytes name = "X-H" + std::to_string(i);
        Bytes value;
        size_t value_len = rng.below(20);
        for (size_t k = 0; k < value_len; ++k) {
            char c = static_cast<char>(0x20 + rng.below(0x5f));
            value += c;
        }
        // leading whitespace folds into the separator; everything still
        // round-trips at the octet level
        out += name + ":" + (rng.below(2) ? " " : "") + value + ending();
    }
    size_t body_len = rng.below(64);
    Bytes body;
    for (size_t i = 0; i < body_len; ++i)
        body += static_cast<char>(rng.below(256));
    if (rng.below(2))
        out += "Content-Length: " + std::to_string(body.size()) + ending();
    out += ending();
    out += body;
    return out;
}

} // namespace wafdiff::testutil
