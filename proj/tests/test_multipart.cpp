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

#include <doctest.h>

#include "test_util.hpp"
#include "wafdiff/multipart.hpp"

using namespace wafdiff;

namespace {

MediaType mt_of(BytesView value) {
    auto mt = parse_media_type(value);
    REQUIRE(mt.ok());
    return *mt;
}

Bytes body_of(BytesView request_octets) {
    auto req = parse_request(request_octets);
    REQUIRE(req.ok());
    return req->body;
}

} // namespace

TEST_CASE("strict parse of the single-part attack body") {
    Bytes body = body_of(testutil::simple_multipart_request());
    auto parsed = parse_multipart_strict(
        body, mt_of("multipart/form-data; boundary=1234"));
    REQUIRE(parsed.ok());
    REQUIRE(parsed->body.parts.size() == 1);
    CHECK(parsed->body.parts[0].name == "field1");
    CHECK(parsed->body.parts[0].body ==
          "<script>alert(document.cookie)</script>");
    // this body is already canonical
    CHECK(serialize_multipart_canonical(parsed->body) == body);
}

TEST_CASE("boundary continuation is a deprecated feature") {
    auto parsed = parse_multipart_strict(
        "--x\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\n\r\n--x--",
        mt_of("multipart/form-data; "
              "boundary=fake-boundary;boundary*0=real-;boundary*1=boundary"));
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.error().category == RejectCategory::DeprecatedFeature);
}

TEST_CASE("control byte in the disposition type is a malformed part header") {
    Bytes body = "--1234\r\ncontent-disposition: form-da";
    body += '\x00';
    body += "a; name=\"f\"\r\n\r\nv\r\n--1234--";
    auto parsed =
        parse_multipart_strict(body, mt_of("multipart/form-data; boundary=1234"));
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.error().category == RejectCategory::MalformedPartHeader);
}

TEST_CASE("control byte inside a part name is its own category") {
    Bytes body = "--1234\r\nContent-Disposition: form-data; name=\"f";
    body += '\x00';
    body += "\"\r\n\r\nv\r\n--1234--";
    auto parsed =
        parse_multipart_strict(body, mt_of("multipart/form-data; boundary=1234"));
    REQUIRE_FALSE(parsed.ok());
    CHECK(parsed.error().category == RejectCategory::ControlBytes);
}

TEST_CASE("strict reject categories are deterministic") {
    struct Case {
        Bytes ct;
        Bytes body;
        RejectCategory expect;
    };
    std::vector<Case> cases = {
        {"multipart/form-data", "--x\r\n", RejectCategory::InvalidBoundary},
        {"multipart/form-data; boundary=a; boundary=b", "--a\r\n",
         RejectCategory::InvalidBoundary},
        {"multipart/form-data; boundary=\"a \"", "--a \r\n",
         RejectCategory::InvalidBoundary},
        {"multipart/form-data; boundary=1234", "junk--1234\r\n",
         RejectCategory::MalformedFraming},
        {"multipart/form-data; boundary=1234",
         "--1234\nContent-Disposition: form-data; name=\"a\"\n\nv\n--1234--",
         RejectCategory::BareLineEnding},
        {"multipart/form-data; boundary=1234",
         "--1234\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\nv",
         RejectCategory::MissingFinalDelimiter},
        {"multipart/form-data; boundary=1234",
         "--1234\r\nContent-Disposition: form-data; name=\"a\"\r\n"
         "Content-Transfer-Encoding: base64\r\n\r\nv\r\n--1234--",
         RejectCategory::DeprecatedFeature},
        {"multipart/form-data; boundary=1234",
         "--1234\r\nX-Extra: 1\r\n"
         "Content-Disposition: form-data; name=\"a\"\r\n\r\nv\r\n--1234--",
         RejectCategory::MalformedPartHeader},
        {"multipart/form-data; boundary=1234", "--1234--",
         RejectCategory::MalformedFraming},
        {"multipart/form-data; boundary=1234",
         "--1234\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\nv\r\n"
         "--1234--trailing garbage",
         RejectCategory::MalformedFraming},
    };
    for (const auto &c : cases) {
        auto first = parse_multipart_strict(c.body, mt_of(c.ct));
        auto second = parse_multipart_strict(c.body, mt_of(c.ct));
        REQUIRE_FALSE(first.ok());
        REQUIRE_FALSE(second.ok());
        CHECK(first.error().category == c.expect);
        CHECK(second.error().category == c.expect);
    }
}

TEST_CASE("canonical serialization of a minimal part") {
    MultipartBody mp;
    mp.boundary = "B";
    mp.parts.push_back(Part{"a", {}, {}, ""});
    CHECK(serialize_multipart_canonical(mp) ==
          "--B\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\n\r\n--B--");
}

TEST_CASE("messy upload body canonicalizes to the standard form") {
    Bytes body = body_of(testutil::messy_upload_request());
    auto parsed =
        parse_multipart_strict(body, mt_of("multipart/FoRm-dAtA; boundary=\"1234\""));
    REQUIRE(parsed.ok());
    CHECK(parsed->notes.case_deviation);
    CHECK(parsed->notes.whitespace_deviation);
    CHECK(parsed->notes.quote_deviation); // quoted token boundary
    CHECK(parsed->notes.epilogue_dropped == 2);
    Bytes canon = serialize_multipart_canonical(parsed->body);
    CHECK(canon ==
          "--1234\r\n"
          "Content-Disposition: form-data; name=\"files\"; filename=\"ab.txt\"\r\n"
          "Content-Type: text/plain\r\n"
          "\r\n"
          "Foo\r\n"
          "--1234--");
}

TEST_CASE("canonical serialization is a fixed point of strict parsing") {
    Bytes bodies[] = {
        body_of(testutil::simple_multipart_request()),
        body_of(testutil::messy_upload_request()),
    };
    Bytes cts[] = {
        "multipart/form-data; boundary=1234",
        "multipart/FoRm-dAtA; boundary=\"1234\"",
    };
    for (int i = 0; i < 2; ++i) {
        auto first = parse_multipart_strict(bodies[i], mt_of(cts[i]));
        REQUIRE(first.ok());
        Bytes canon = serialize_multipart_canonical(first->body);
        auto again = parse_multipart_strict(
            canon, mt_of("multipart/form-data; boundary=1234"));
        REQUIRE(again.ok());
        CHECK(serialize_multipart_canonical(again->body) == canon);
    }
}

TEST_CASE("lenient joined-boundary parse recovers the continuation payload") {
    Bytes body = body_of(testutil::continuation_request());
    MediaType ct = mt_of("multipart/form-data; "
                         "boundary=fake-boundary;boundary*0=real-;"
                         "boundary*1=boundary");
    auto parsed = parse_multipart_lenient(body, ct, LeniencyProfile::permissive());
    REQUIRE(parsed.ok());
    REQUIRE(parsed->parts.size() == 1);
    CHECK(parsed->parts[0].name == "id");
    CHECK(parsed->parts[0].body == "<script>alert(document.cookie)</script>");
}

TEST_CASE("strictest profile accepts exactly the strict language") {
    Bytes body = body_of(testutil::continuation_request());
    MediaType ct = mt_of("multipart/form-data; "
                         "boundary=fake-boundary;boundary*0=real-;"
                         "boundary*1=boundary");
    CHECK_FALSE(
        parse_multipart_lenient(body, ct, LeniencyProfile::strictest()).ok());

    Bytes good = body_of(testutil::simple_multipart_request());
    auto strict_ok = parse_multipart_lenient(
        good, mt_of("multipart/form-data; boundary=1234"),
        LeniencyProfile::strictest());
    REQUIRE(strict_ok.ok());
    CHECK(strict_ok->parts.size() == 1);
}

TEST_CASE("missing final delimiter needs its tolerance flag") {
    Bytes body = "--B\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\npayload";
    MediaType ct = mt_of("multipart/form-data; boundary=B");
    LeniencyProfile tolerant;
    tolerant.tolerate_missing_final_delimiter = true;
    auto ok = parse_multipart_lenient(body, ct, tolerant);
    REQUIRE(ok.ok());
    CHECK(ok->parts[0].body == "payload");

    LeniencyProfile no_flag;
    no_flag.tolerate_control_in_headers = true; // not the strictest profile
    CHECK_FALSE(parse_multipart_lenient(body, ct, no_flag).ok());
}

TEST_CASE("profile separator octets split part header lines") {
    Bytes body = "--B\r\nContent-Disposition: form-data; name=\"f1\"";
    body += '\x00';
    body += "\r\npayload\r\n--B--";
    MediaType ct = mt_of("multipart/form-data; boundary=B");
    LeniencyProfile p;
    p.tolerate_control_in_headers = true;
    p.header_separator_chars = {0x00};
    auto parsed = parse_multipart_lenient(body, ct, p);
    REQUIRE(parsed.ok());
    REQUIRE(parsed->parts.size() == 1);
    CHECK(parsed->parts[0].name == "f1");
    CHECK(parsed->parts[0].body == "payload");
}

TEST_CASE("language inclusion: strict-accepted inputs parse identically "
          "under every profile") {
    Bytes bodies[] = {
        body_of(testutil::simple_multipart_request()),
        "--B\r\nContent-Disposition: form-data; name=\"a\"\r\n\r\n\r\n--B--",
        "--B  \r\nContent-Disposition: form-data; name=\"x\"; "
        "filename=\"f.bin\"\r\nContent-Type: application/octet-stream\r\n\r\n"
        "\x01\x02\x03\r\n--B--",
    };
    Bytes cts[] = {
        "multipart/form-data; boundary=1234",
        "multipart/form-data; boundary=B",
        "multipart/form-data; boundary=B",
    };
    std::vector<LeniencyProfile> profiles = {
        LeniencyProfile::strictest(),
        LeniencyProfile::permissive(),
    };
    LeniencyProfile mid;
    mid.tolerate_missing_final_delimiter = true;
    mid.tolerate_bare_lf = true;
    profiles.push_back(mid);

    for (int i = 0; i < 3; ++i) {
        auto strict = parse_multipart_strict(bodies[i], mt_of(cts[i]));
        REQUIRE(strict.ok());
        for (const auto &p : profiles) {
            auto lenient = parse_multipart_lenient(bodies[i], mt_of(cts[i]), p);
            REQUIRE(lenient.ok());
            REQUIRE(lenient->parts.size() == strict->body.parts.size());
            for (size_t k = 0; k < lenient->parts.size(); ++k) {
                CHECK(lenient->parts[k].name == strict->body.parts[k].name);
                CHECK(lenient->parts[k].body == strict->body.parts[k].body);
            }
        }
    }
}

TEST_CASE("payload preservation: part bodies are exact slices of the input") {
    Bytes bodies[] = {
        body_of(testutil::simple_multipart_request()),
        body_of(testutil::messy_upload_request()),
    };
    Bytes cts[] = {
        "multipart/form-data; boundary=1234",
        "multipart/FoRm-dAtA; boundary=\"1234\"",
    };
    for (int i = 0; i < 2; ++i) {
        auto parsed = parse_multipart_strict(bodies[i], mt_of(cts[i]));
        REQUIRE(parsed.ok());
        for (const auto &part : parsed->body.parts)
            CHECK(bodies[i].find(part.body) != Bytes::npos);
    }
}

TEST_CASE("boundary validation follows the bchars set") {
    CHECK(is_valid_boundary("1234"));
    CHECK(is_valid_boundary("a'()+_,-./:=? z"));
    CHECK(is_valid_boundary(Bytes(70, 'x')));
    CHECK_FALSE(is_valid_boundary(Bytes(71, 'x')));
    CHECK_FALSE(is_valid_boundary(""));
    CHECK_FALSE(is_valid_boundary("ends-in-space "));
    CHECK_FALSE(is_valid_boundary("no{brace}"));
}
