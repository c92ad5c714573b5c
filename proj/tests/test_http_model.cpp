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
#include "wafdiff/http_model.hpp"

using namespace wafdiff;

TEST_CASE("multipart attack request parses byte-faithfully") {
    Bytes octets = testutil::simple_multipart_request();
    auto req = parse_request(octets);
    REQUIRE(req.ok());
    CHECK(req->method == "POST");
    CHECK(req->target == "/");
    CHECK(req->headers.size() == 3); // Host, Content-Length, Content-Type
    CHECK(req->body.find("<script>alert(document.cookie)</script>") != Bytes::npos);
    CHECK(serialize_request(*req) == octets);
}

TEST_CASE("minimal request has no headers and an empty body") {
    auto req = parse_request("GET / HTTP/1.1\r\n\r\n");
    REQUIRE(req.ok());
    CHECK(req->headers.empty());
    CHECK(req->body.empty());
}

TEST_CASE("mangled content-type value is preserved byte-exactly") {
    auto req = parse_request(testutil::messy_upload_request());
    REQUIRE(req.ok());
    auto ct = req->header_value("content-type");
    REQUIRE(ct.has_value());
    CHECK(*ct == "multipart/FoRm-dAtA; boundary=\"1234\"");
    CHECK(serialize_request(*req) == testutil::messy_upload_request());
}

TEST_CASE("header lookup is case-insensitive, raw bytes preserved") {
    auto req = parse_request("GET / HTTP/1.1\r\nhOsT: a\r\n\r\n");
    REQUIRE(req.ok());
    REQUIRE(req->find_header("Host") != nullptr);
    CHECK(req->find_header("Host")->name == "hOsT");
}

TEST_CASE("recompute rewrites a stale content-length") {
    Bytes body = "0123456789abc"; // 13 octets, counted by construction
    Bytes octets = "POST / HTTP/1.1\r\nContent-Length: 90\r\n\r\n" + body;
    auto req = parse_request(octets);
    REQUIRE(req.ok());
    CHECK(req->body.size() == 13);
    Bytes out = serialize_request(*req, RecomputeLength::On);
    CHECK(out.find("Content-Length: 13\r\n") != Bytes::npos);
    CHECK(out.find("Content-Length: 90") == Bytes::npos);
}

TEST_CASE("duplicate headers are emitted in original order") {
    Bytes octets = "POST / HTTP/1.1\r\nContent-Type: a/b\r\nContent-Type: c/d\r\n\r\n";
    auto req = parse_request(octets);
    REQUIRE(req.ok());
    CHECK(req->headers.size() == 2);
    CHECK(serialize_request(*req) == octets);
}

TEST_CASE("bare LF line endings are tolerated and recorded") {
    Bytes octets = "GET / HTTP/1.1\nHost: a\n\nbody";
    auto req = parse_request(octets);
    REQUIRE(req.ok());
    CHECK(req->used_bare_lf());
    CHECK(req->body == "body");
    CHECK(serialize_request(*req) == octets);
}

TEST_CASE("header line without a colon stays representable") {
    Bytes octets = "POST / HTTP/1.1\r\napplication/xml\r\n\r\n<a/>";
    auto req = parse_request(octets);
    REQUIRE(req.ok());
    CHECK(req->headers.size() == 1);
    CHECK(req->headers[0].name == "application/xml");
    CHECK(req->headers[0].sep.empty());
    CHECK(serialize_request(*req) == octets);
}

TEST_CASE("structural errors name the offending input") {
    CHECK_FALSE(parse_request("").ok());
    CHECK_FALSE(parse_request("GET / HTTP/1.1\r\nHost: a\r\n").ok()); // no blank line
    CHECK_FALSE(parse_request("GET / HTTP/2\r\n\r\n").ok());
    CHECK_FALSE(parse_request("GET  HTTP/1.1\r\n\r\n").ok());
    Bytes many = "GET / HTTP/1.1\r\n";
    for (int i = 0; i < 300; ++i)
        many += "X-H" + std::to_string(i) + ": v\r\n";
    many += "\r\n";
    CHECK_FALSE(parse_request(many).ok());
}

TEST_CASE("lossless round-trip holds on generated requests") {
    DetRng rng(7);
    for (int i = 0; i < 200; ++i) {
        Bytes octets = testutil::random_valid_request(rng);
        auto req = parse_request(octets);
        REQUIRE(req.ok());
        CHECK(serialize_request(*req) == octets);
    }
}

TEST_CASE("media type: plain boundary parameter") {
    auto mt = parse_media_type("multipart/form-data; boundary=1234");
    REQUIRE(mt.ok());
    CHECK(mt->type == "multipart");
    CHECK(mt->subtype == "form-data");
    REQUIRE(mt->parameters.size() == 1);
    CHECK(mt->parameters[0].name == "boundary");
    CHECK(mt->parameters[0].value == "1234");
    CHECK_FALSE(mt->parameters[0].continuation_index.has_value());
}

TEST_CASE("media type: continuation segments are annotated, never joined") {
    auto mt = parse_media_type("multipart/form-data; "
                               "boundary=fake-boundary;boundary*0=real-;"
                               "boundary*1=boundary");
    REQUIRE(mt.ok());
    REQUIRE(mt->parameters.size() == 3); // one per ;-separated attribute
    CHECK_FALSE(mt->parameters[0].continuation_index.has_value());
    CHECK(mt->parameters[0].value == "fake-boundary");
    CHECK(mt->parameters[1].continuation_index == 0);
    CHECK(mt->parameters[1].value == "real-");
    CHECK(mt->parameters[2].continuation_index == 1);
    CHECK(mt->parameters[2].value == "boundary");
    CHECK(mt->has_continuation());
}

TEST_CASE("media type: parameterless") {
    auto mt = parse_media_type("application/json");
    REQUIRE(mt.ok());
    CHECK(mt->type == "application");
    CHECK(mt->subtype == "json");
    CHECK(mt->parameters.empty());
}

TEST_CASE("media type errors") {
    CHECK_FALSE(parse_media_type("application").ok());       // no slash
    CHECK_FALSE(parse_media_type("/json").ok());              // empty type
    CHECK_FALSE(parse_media_type("application/").ok());       // empty subtype
    CHECK_FALSE(parse_media_type("a/b; x=\"unterminated").ok());
    CHECK_FALSE(parse_media_type("a/b; ").ok());              // empty parameter
    CHECK_FALSE(parse_media_type("a/b; boundary=1234;").ok());
    CHECK_FALSE(parse_media_type("a/b; boundary=re\ral").ok()); // CR in token
    Bytes nul_value = "a/b; boundary=";
    nul_value += '\x00';
    nul_value += "1234";
    CHECK_FALSE(parse_media_type(nul_value).ok());
}

TEST_CASE("media type canonical serialization is idempotent") {
    const char *inputs[] = {
        "multipart/FoRm-dAtA; boundary=\"1234\"",
        "Application/JSON",
        "text/plain;charset=UTF-8",
        "a/b; x=\"quoted value\"; y=token",
    };
    for (const char *in : inputs) {
        auto mt = parse_media_type(in);
        REQUIRE(mt.ok());
        Bytes canon = media_type_canonical(*mt);
        auto again = parse_media_type(canon);
        REQUIRE(again.ok());
        CHECK(media_type_canonical(*again) == canon);
    }
    auto mt = parse_media_type("multipart/FoRm-dAtA; boundary=\"1234\"");
    CHECK(media_type_canonical(*mt) == "multipart/form-data; boundary=1234");
}
