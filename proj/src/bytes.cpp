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

#include "wafdiff/bytes.hpp"

namespace wafdiff {

Bytes ascii_lower_copy(BytesView s) {
    Bytes out;
    out.reserve(s.size());
    for (char c : s)
        out.push_back(ascii_lower(c));
    return out;
}

bool ascii_ieq(BytesView a, BytesView b) {
    if (a.size() != b.size())
        return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (ascii_lower(a[i]) != ascii_lower(b[i]))
            return false;
    return true;
}

BytesView trim_ows(BytesView s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_ows(s[b]))
        ++b;
    while (e > b && is_ows(s[e - 1]))
        --e;
    return s.substr(b, e - b);
}

size_t ifind(BytesView haystack, BytesView needle, size_t from) {
    if (needle.empty())
        return from <= haystack.size() ? from : BytesView::npos;
    if (haystack.size() < needle.size())
        return BytesView::npos;
    for (size_t i = from; i + needle.size() <= haystack.size(); ++i) {
        size_t j = 0;
        while (j < needle.size() &&
               ascii_lower(haystack[i + j]) == ascii_lower(needle[j]))
            ++j;
        if (j == needle.size())
            return i;
    }
    return BytesView::npos;
}

uint64_t fnv1a64(BytesView s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

static const char *kHexDigits = "0123456789abcdef";

Bytes hex_u64(uint64_t v) {
    Bytes out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = kHexDigits[v & 0xf];
        v >>= 4;
    }
    return out;
}

Bytes hex_octets(BytesView s) {
    Bytes out;
    out.reserve(s.size() * 2);
    for (unsigned char c : s) {
        out.push_back(kHexDigits[c >> 4]);
        out.push_back(kHexDigits[c & 0xf]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

Bytes from_hex_octets(BytesView s) {
    Bytes out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i + 1 < s.size(); i += 2) {
        int hi = hex_nibble(s[i]);
        int lo = hex_nibble(s[i + 1]);
        if (hi < 0 || lo < 0)
            break;
        out.push_back(static_cast<char>((hi << 4) | lo));
    }
    return out;
}

uint64_t DetRng::next() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

size_t DetRng::below(size_t n) { return static_cast<size_t>(next() % n); }

} // namespace wafdiff
