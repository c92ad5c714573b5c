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

#include <utility>
#include <vector>

#include "wafdiff/bytes.hpp"
#include "wafdiff/reject.hpp"
#include "wafdiff/result.hpp"

namespace wafdiff {

struct XmlNode;

// Element names keep their namespace prefix verbatim; no URI resolution.
struct XmlElement {
    Bytes name;
    std::vector<std::pair<Bytes, Bytes>> attributes;
    std::vector<XmlNode> children;
};

struct XmlNode {
    enum class Kind { Element, Text };
    Kind kind = Kind::Text;
    XmlElement element;
    Bytes text;

    static XmlNode make_text(Bytes t);
    static XmlNode make_element(XmlElement e);
};

// Exactly one root under strict parsing. Lenient parsing may wrap pre-root
// text or sibling roots in a synthetic root with an empty name. The prolog
// and DOCTYPE are carried verbatim; internal subsets are skipped opaquely and
// never interpreted.
struct XmlDocument {
    Bytes prolog_raw;  // "<?xml ...?>" if present
    Bytes doctype_raw; // "<!DOCTYPE ...>" if present
    XmlElement root;

    bool has_doctype() const { return !doctype_raw.empty(); }
    bool synthetic_root() const { return root.name.empty(); }
};

struct XmlLeniency {
    bool tolerate_text_outside_root = false;
    bool tolerate_stray_bracket_after_doctype = false;
    bool tolerate_junk_before_close_tag = false;
    bool tolerate_duplicate_siblings = false;

    bool is_strict() const;
    static XmlLeniency strict() { return {}; }
    static XmlLeniency permissive();
};

// Pragmatic strict subset: optional prolog, optional DOCTYPE (subset skipped
// opaquely), elements, attributes, character data and CDATA. Mixed content
// (text adjacent to child elements), comments, PIs, control octets and
// invalid UTF-8 are rejected with the offending offset.
Result<XmlDocument, RejectReason> parse_xml_strict(BytesView body);

Result<XmlDocument, LenientError> parse_xml_lenient(BytesView body,
                                                    const XmlLeniency &p);

// Depth-first, document order. Attribute values appear before the element's
// text, with `@name` path segments; a synthetic root contributes no segment.
std::vector<std::pair<Bytes, Bytes>> collect_text_fields(const XmlDocument &d);

// Prolog and DOCTYPE verbatim, then the element tree with double-quoted
// attributes and entity-escaped text (CDATA is re-emitted as escaped text).
Bytes serialize_xml_canonical(const XmlDocument &d);

} // namespace wafdiff
