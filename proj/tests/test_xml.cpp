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

#include "wafdiff/xml_codec.hpp"

using namespace wafdiff;

TEST_CASE("well-formed tree with field text") {
    auto d = parse_xml_strict("<a><field1>value1</field1></a>");
    REQUIRE(d.ok());
    CHECK(d->root.name == "a");
    REQUIRE(d->root.children.size() == 1);
    const XmlNode &f = d->root.children[0];
    REQUIRE(f.kind == XmlNode::Kind::Element);
    REQUIRE(f.element.children.size() == 1);
    CHECK(f.element.children[0].text == "value1");
}

TEST_CASE("stray bracket after a DOCTYPE is rejected strictly") {
    auto d = parse_xml_strict(
        "<!DOCTYPE BOOK [...]><BOOK><field1>value1</field1>]</BOOK>");
    REQUIRE_FALSE(d.ok());
    CHECK(d.error().category == RejectCategory::MalformedBody);
}

TEST_CASE("text before the root element is rejected strictly") {
    auto d = parse_xml_strict("value1<a><field1>value1</field1></a>");
    REQUIRE_FALSE(d.ok());
    CHECK(d.error().offset == 0);
}

TEST_CASE("junk before a close tag is tolerable only under leniency") {
    Bytes body = "<genre:schema><field1>payload</field1>j</genre:schema>";
    CHECK_FALSE(parse_xml_strict(body).ok());
    XmlLeniency p;
    p.tolerate_junk_before_close_tag = true;
    auto d = parse_xml_lenient(body, p);
    REQUIRE(d.ok());
    auto fields = collect_text_fields(*d);
    bool found = false;
    for (const auto &[path, text] : fields)
        if (path == "genre:schema/field1" && text == "payload")
            found = true;
    CHECK(found);
}

TEST_CASE("misplaced pre-root text is captured under leniency") {
    Bytes body = "value1<a><field1>value1</field1></a>";
    XmlLeniency p;
    p.tolerate_text_outside_root = true;
    auto d = parse_xml_lenient(body, p);
    REQUIRE(d.ok());
    CHECK(d->synthetic_root());
    auto fields = collect_text_fields(*d);
    REQUIRE(fields.size() == 2);
    CHECK(fields[0] == std::pair<Bytes, Bytes>{"", "value1"});
    CHECK(fields[1] == std::pair<Bytes, Bytes>{"a/field1", "value1"});
}

TEST_CASE("sibling roots need the duplicate-siblings tolerance") {
    Bytes body = "<field1>v</field1><field2 attr=\"history\">hi</field2>";
    CHECK_FALSE(parse_xml_strict(body).ok());
    XmlLeniency p;
    p.tolerate_duplicate_siblings = true;
    auto d = parse_xml_lenient(body, p);
    REQUIRE(d.ok());
    auto fields = collect_text_fields(*d);
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == std::pair<Bytes, Bytes>{"field1", "v"});
    CHECK(fields[1] == std::pair<Bytes, Bytes>{"field2/@attr", "history"});
    CHECK(fields[2] == std::pair<Bytes, Bytes>{"field2", "hi"});
}

TEST_CASE("strict-valid documents parse identically under any profile") {
    const Bytes inputs[] = {
        "<a><f>x</f></a>",
        "<?xml version=\"1.0\"?><r><f attr=\"v\">t</f></r>",
        "<r><![CDATA[<script>alert(1)</script>]]></r>",
        "<r>&lt;tag&gt; &amp; more</r>",
    };
    for (const auto &body : inputs) {
        auto strict = parse_xml_strict(body);
        REQUIRE(strict.ok());
        auto lenient = parse_xml_lenient(body, XmlLeniency::permissive());
        REQUIRE(lenient.ok());
        CHECK(collect_text_fields(*strict) == collect_text_fields(*lenient));
        CHECK(serialize_xml_canonical(*strict) ==
              serialize_xml_canonical(*lenient));
    }
}

TEST_CASE("collect_text_fields ordering and attribute paths") {
    auto d = parse_xml_strict("<a><f>x</f></a>");
    REQUIRE(d.ok());
    auto fields = collect_text_fields(*d);
    REQUIRE(fields.size() == 1);
    CHECK(fields[0] == std::pair<Bytes, Bytes>{"a/f", "x"});

    auto attr = parse_xml_strict("<f attr=\"history\">hi</f>");
    REQUIRE(attr.ok());
    auto afields = collect_text_fields(*attr);
    REQUIRE(afields.size() == 2);
    CHECK(afields[0] == std::pair<Bytes, Bytes>{"f/@attr", "history"});
    CHECK(afields[1] == std::pair<Bytes, Bytes>{"f", "hi"});

    auto empty = parse_xml_strict("<f/>");
    REQUIRE(empty.ok());
    CHECK(collect_text_fields(*empty).empty());
}

TEST_CASE("CDATA preserves payload octets exactly") {
    Bytes payload = "<script>alert(document.cookie)</script>";
    auto d = parse_xml_strict("<r><f><![CDATA[" + payload + "]]></f></r>");
    REQUIRE(d.ok());
    auto fields = collect_text_fields(*d);
    REQUIRE(fields.size() == 1);
    CHECK(fields[0].second == payload);
}

TEST_CASE("doctype internal subsets are skipped opaquely, never expanded") {
    auto d = parse_xml_strict(
        "<!DOCTYPE r [<!ENTITY x \"boom\">]><r><f>&amp;ok</f></r>");
    REQUIRE(d.ok());
    CHECK(d->has_doctype());
    auto fields = collect_text_fields(*d);
    REQUIRE(fields.size() == 1);
    CHECK(fields[0].second == "&ok");
    // unknown entities are a strict error, not an expansion
    CHECK_FALSE(parse_xml_strict("<r>&x;</r>").ok());
}

TEST_CASE("strict rejects constructs outside the subset") {
    CHECK_FALSE(parse_xml_strict("<r><!-- comment --></r>").ok());
    CHECK_FALSE(parse_xml_strict("<r><?pi data?></r>").ok());
    CHECK_FALSE(parse_xml_strict("<r>").ok());
    CHECK_FALSE(parse_xml_strict("<r></s>").ok());
    CHECK_FALSE(parse_xml_strict("<r x=\"1\" x=\"2\"/>").ok());
    Bytes ctl = "<r>";
    ctl += '\x02';
    ctl += "</r>";
    CHECK_FALSE(parse_xml_strict(ctl).ok());
}

TEST_CASE("invalid UTF-8: strict rejects, lenient replaces") {
    Bytes body = "<r><f>a\xffz</f></r>";
    auto strict = parse_xml_strict(body);
    REQUIRE_FALSE(strict.ok());
    CHECK(strict.error().offset == 7);
    auto lenient = parse_xml_lenient(body, XmlLeniency::permissive());
    REQUIRE(lenient.ok());
    auto fields = collect_text_fields(*lenient);
    REQUIRE(fields.size() == 1);
    CHECK(fields[0].second == Bytes("a\xef\xbf\xbdz"));
}

TEST_CASE("canonical serialization re-parses to the same tree") {
    const Bytes inputs[] = {
        "<r>\n  <f a='1'>text</f>\n  <g/>\n</r>",
        "<r><![CDATA[<raw>]]></r>",
        "<?xml version=\"1.0\"?><r><f>x</f></r>",
    };
    for (const auto &body : inputs) {
        auto d = parse_xml_strict(body);
        REQUIRE(d.ok());
        Bytes canon = serialize_xml_canonical(*d);
        auto again = parse_xml_strict(canon);
        REQUIRE(again.ok());
        CHECK(serialize_xml_canonical(*again) == canon);
        CHECK(collect_text_fields(*again) == collect_text_fields(*d));
    }
}
