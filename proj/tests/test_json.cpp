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

#include "wafdiff/json_codec.hpp"

using namespace wafdiff;

namespace {
const Bytes kPayload = "<script>alert(document.cookie)</script>";
}

TEST_CASE("strict parse of the attack object") {
    auto v = parse_json_strict("{\"field1\": \"" + kPayload + "\"}");
    REQUIRE(v.ok());
    REQUIRE(v->kind == JsonValue::Kind::Object);
    REQUIRE(v->members.size() == 1);
    CHECK(v->members[0].first == "field1");
    CHECK(v->members[0].second.str == kPayload);
}

TEST_CASE("raw NUL in a member name rejects at the NUL offset") {
    Bytes body = "{ \"f";
    body += '\x00';
    body += "eld1\": \"v\" }";
    auto v = parse_json_strict(body);
    REQUIRE_FALSE(v.ok());
    CHECK(v.error().category == RejectCategory::MalformedBody);
    CHECK(v.error().offset == 4);
}

TEST_CASE("empty object") {
    auto v = parse_json_strict("{}");
    REQUIRE(v.ok());
    CHECK(v->members.empty());
}

TEST_CASE("strict acceptance is exactly RFC-shaped") {
    CHECK(parse_json_strict("[1,2.5,-3e2,\"s\",true,false,null]").ok());
    CHECK(parse_json_strict("\"top level string\"").ok());
    CHECK(parse_json_strict("42").ok());
    CHECK(parse_json_strict("{\"a\":1,\"a\":2}").ok()); // duplicates kept
    CHECK_FALSE(parse_json_strict("").ok());
    CHECK_FALSE(parse_json_strict("{\"a\":01}").ok());
    CHECK_FALSE(parse_json_strict("{'a':1}").ok());
    CHECK_FALSE(parse_json_strict("{\"a\":1,}").ok());
    CHECK_FALSE(parse_json_strict("{\"a\":1} extra").ok());
    CHECK_FALSE(parse_json_strict("{\"a\":\"\\x\"}").ok());
    CHECK_FALSE(parse_json_strict("{\"a\":\"\\ud800\"}").ok());
    CHECK_FALSE(parse_json_strict("\"\xff\"").ok()); // invalid UTF-8
}

TEST_CASE("duplicate names are all kept in order") {
    auto v = parse_json_strict("{\"a\":1,\"a\":2}");
    REQUIRE(v.ok());
    REQUIRE(v->members.size() == 2);
    CHECK(v->members[0].second.number_text == "1");
    CHECK(v->members[1].second.number_text == "2");
}

TEST_CASE("lenient: bytes between name and colon") {
    Bytes body = "{ \"field1\" ";
    body += '\x00';
    body += ": \"" + kPayload + "\" }";
    CHECK_FALSE(parse_json_strict(body).ok());

    JsonLeniency p;
    p.bytes_between_name_and_colon = {0x00};
    auto v = parse_json_lenient(body, p);
    REQUIRE(v.ok());
    REQUIRE(v->members.size() == 1);
    CHECK(v->members[0].first == "field1");
    CHECK(v->members[0].second.str == kPayload);
}

TEST_CASE("lenient: raw control bytes retained in names and strings") {
    Bytes body = "{ \"f";
    body += '\x00';
    body += "eld1\": \"" + kPayload + "\" }";
    JsonLeniency p;
    p.allow_unescaped_control_in_strings = true;
    auto v = parse_json_lenient(body, p);
    REQUIRE(v.ok());
    Bytes expect_name = "f";
    expect_name += '\x00';
    expect_name += "eld1";
    CHECK(v->members[0].first == expect_name);
    CHECK(v->members[0].second.str == kPayload);
}

TEST_CASE("lenient: missing closing quote on a member name") {
    Bytes body = "{ \"field1";
    body += '\x00';
    body += ": \"" + kPayload + "\" }";
    auto v = parse_json_lenient(body, JsonLeniency::permissive());
    REQUIRE(v.ok());
    REQUIRE(v->members.size() == 1);
    Bytes expect_name = "field1";
    expect_name += '\x00';
    CHECK(v->members[0].first == expect_name);
    CHECK(v->members[0].second.str == kPayload);
}

TEST_CASE("strict-valid input parses identically under any profile") {
    const Bytes inputs[] = {
        "{\"field1\":\"" + kPayload + "\"}",
        "[1,{\"a\":null},\"x\"]",
        "{\"nested\":{\"deep\":[true,false]}}",
    };
    for (const auto &body : inputs) {
        auto strict = parse_json_strict(body);
        REQUIRE(strict.ok());
        auto lenient = parse_json_lenient(body, JsonLeniency::permissive());
        REQUIRE(lenient.ok());
        CHECK(*strict == *lenient);
        auto strict_profile = parse_json_lenient(body, JsonLeniency::strict());
        REQUIRE(strict_profile.ok());
        CHECK(*strict == *strict_profile);
    }
}

TEST_CASE("canonical serialization") {
    JsonValue obj = JsonValue::object();
    obj.add("field1", JsonValue::string("v"));
    CHECK(serialize_json_canonical(obj) == "{\"field1\":\"v\"}");

    Bytes with_nul = "a";
    with_nul += '\x00';
    with_nul += "b";
    CHECK(serialize_json_canonical(JsonValue::string(with_nul)) ==
          "\"a\\u0000b\"");
}

TEST_CASE("canonical output never emits control octets and round-trips") {
    Bytes weird = "tab\tnl\nnul";
    weird += '\x00';
    JsonValue v = JsonValue::object();
    v.add("k", JsonValue::string(weird));
    v.add("n", JsonValue::number(Bytes("12.50e-1")));
    JsonValue arr = JsonValue::array();
    arr.push(JsonValue::boolean_value(true));
    arr.push(JsonValue::null());
    v.add("a", std::move(arr));

    Bytes canon = serialize_json_canonical(v);
    for (unsigned char c : canon)
        CHECK(c >= 0x20);
    auto again = parse_json_strict(canon);
    REQUIRE(again.ok());
    CHECK(*again == v);
    CHECK(serialize_json_canonical(*again) == canon);
    CHECK(again->find("n")->number_text == "12.50e-1"); // source text kept
}

TEST_CASE("rejection offsets are monotone past the valid prefix") {
    Bytes valid = "{\"field1\":\"value\"";
    for (size_t cut = 1; cut < valid.size(); ++cut) {
        Bytes broken = valid.substr(0, cut);
        broken += '\x1f'; // unescaped control wherever it lands
        auto v = parse_json_strict(broken);
        if (!v.ok() && v.error().offset)
            CHECK(*v.error().offset >= cut - 1);
    }
}

TEST_CASE("flattened fields carry payload text") {
    auto v = parse_json_strict(
        "{\"a\":{\"b\":\"x\"},\"c\":[\"y\",7],\"d\":true}");
    REQUIRE(v.ok());
    auto fields = flatten_json_fields(*v);
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == std::pair<Bytes, Bytes>{"a/b", "x"});
    CHECK(fields[1] == std::pair<Bytes, Bytes>{"c/0", "y"});
    CHECK(fields[2] == std::pair<Bytes, Bytes>{"c/1", "7"});
    CHECK(fields[3] == std::pair<Bytes, Bytes>{"d", "true"});
}
