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

#include "wafdiff/xml_codec.hpp"

#include <algorithm>

namespace wafdiff {

XmlNode XmlNode::make_text(Bytes t) {
    XmlNode n;
    n.kind = Kind::Text;
    n.text = std::move(t);
    return n;
}

XmlNode XmlNode::make_element(XmlElement e) {
    XmlNode n;
    n.kind = Kind::Element;
    n.element = std::move(e);
    return n;
}

bool XmlLeniency::is_strict() const {
    return !tolerate_text_outside_root && !tolerate_stray_bracket_after_doctype &&
           !tolerate_junk_before_close_tag && !tolerate_duplicate_siblings;
}

XmlLeniency XmlLeniency::permissive() {
    XmlLeniency p;
    p.tolerate_text_outside_root = true;
    p.tolerate_stray_bracket_after_doctype = true;
    p.tolerate_junk_before_close_tag = true;
    p.tolerate_duplicate_siblings = true;
    return p;
}

namespace {

constexpr int kMaxDepth = 256;

bool is_xml_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

bool is_name_start(unsigned char c) {
    return is_alpha(c) || c == '_' || c == ':';
}

bool is_name_char(unsigned char c) {
    return is_alpha(c) || is_digit(c) || c == '_' || c == ':' || c == '-' ||
           c == '.';
}

bool ws_only(BytesView s) {
    return std::all_of(s.begin(), s.end(), is_xml_ws);
}

size_t utf8_invalid_at(BytesView s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = s[i];
        size_t len;
        unsigned cp_min;
        if (c < 0x80) {
            i += 1;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            len = 2;
            cp_min = 0x80;
        } else if ((c & 0xf0) == 0xe0) {
            len = 3;
            cp_min = 0x800;
        } else if ((c & 0xf8) == 0xf0) {
            len = 4;
            cp_min = 0x10000;
        } else {
            return i;
        }
        if (i + len > s.size())
            return i;
        unsigned cp = c & (0xff >> (len + 1));
        bool ok = true;
        for (size_t k = 1; k < len && ok; ++k) {
            unsigned char cc = s[i + k];
            if ((cc & 0xc0) != 0x80)
                return i + k;
            cp = (cp << 6) | (cc & 0x3f);
        }
        if (cp < cp_min || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff))
            return i;
        i += len;
    }
    return BytesView::npos;
}

Bytes replace_invalid_utf8(BytesView s) {
    Bytes out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        BytesView rest = s.substr(i);
        size_t bad = utf8_invalid_at(rest);
        if (bad == BytesView::npos) {
            out += rest;
            break;
        }
        out += rest.substr(0, bad);
        out += "\xef\xbf\xbd";
        i += bad + 1;
    }
    return out;
}

void append_utf8(Bytes &out, unsigned cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

struct TopItem {
    XmlNode node;
    size_t offset = 0;
};

struct XmlParser {
    BytesView s;
    size_t pos = 0;
    const XmlLeniency &p;
    bool strict;
    bool has_doctype = false;
    RejectReason err{RejectCategory::MalformedBody, "", 0};

    bool fail(Bytes message, size_t at) {
        err = RejectReason{RejectCategory::MalformedBody, std::move(message), at};
        return false;
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && is_xml_ws(peek()))
            ++pos;
    }
    bool starts(BytesView prefix) const {
        return s.substr(pos).starts_with(prefix);
    }

    bool read_name(Bytes &out) {
        size_t start = pos;
        if (done() || !is_name_start(static_cast<unsigned char>(peek())))
            return fail("expected name", pos);
        ++pos;
        while (!done() && is_name_char(static_cast<unsigned char>(peek())))
            ++pos;
        out = Bytes(s.substr(start, pos - start));
        return true;
    }

    // Decodes one entity reference starting at '&'. In lenient mode an
    // unknown or bare '&' is kept verbatim.
    bool read_entity(Bytes &out) {
        size_t amp = pos;
        size_t semi = s.find(';', pos);
        if (semi != BytesView::npos && semi - pos <= 10) {
            BytesView ent = s.substr(pos + 1, semi - pos - 1);
            if (ent == "lt") { out += '<'; pos = semi + 1; return true; }
            if (ent == "gt") { out += '>'; pos = semi + 1; return true; }
            if (ent == "amp") { out += '&'; pos = semi + 1; return true; }
            if (ent == "apos") { out += '\''; pos = semi + 1; return true; }
            if (ent == "quot") { out += '"'; pos = semi + 1; return true; }
            if (!ent.empty() && ent[0] == '#') {
                unsigned cp = 0;
                bool ok = false;
                if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
                    for (size_t i = 2; i < ent.size(); ++i) {
                        char c = ent[i];
                        int v = -1;
                        if (c >= '0' && c <= '9') v = c - '0';
                        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
                        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
                        if (v < 0) { ok = false; break; }
                        cp = cp * 16 + static_cast<unsigned>(v);
                        ok = true;
                    }
                } else {
                    for (size_t i = 1; i < ent.size(); ++i) {
                        if (!is_digit(ent[i])) { ok = false; break; }
                        cp = cp * 10 + static_cast<unsigned>(ent[i] - '0');
                        ok = true;
                    }
                }
                if (ok && cp <= 0x10ffff) {
                    append_utf8(out, cp);
                    pos = semi + 1;
                    return true;
                }
            }
        }
        if (strict)
            return fail("malformed entity reference", amp);
        out += '&';
        ++pos;
        return true;
    }

    bool check_text_char(unsigned char c) {
        if (c == '\t' || c == '\r' || c == '\n')
            return true;
        if (c < 0x20)
            return !strict;
        return true;
    }

    bool skip_comment_or_pi() {
        // Returns consumption via pos; caller verified the prefix.
        if (starts("<!--")) {
            size_t end = s.find("-->", pos + 4);
            if (end == BytesView::npos)
                return fail("unterminated comment", pos);
            pos = end + 3;
            return true;
        }
        size_t end = s.find("?>", pos + 2);
        if (end == BytesView::npos)
            return fail("unterminated processing instruction", pos);
        pos = end + 2;
        return true;
    }

    bool parse_attr_value(Bytes &out) {
        if (done() || (peek() != '"' && peek() != '\''))
            return fail("expected attribute value quote", pos);
        char quote = peek();
        ++pos;
        while (!done()) {
            char c = peek();
            if (c == quote) {
                ++pos;
                return true;
            }
            if (c == '<')
                return fail("'<' in attribute value", pos);
            if (c == '&') {
                if (!read_entity(out))
                    return false;
                continue;
            }
            if (!check_text_char(static_cast<unsigned char>(c)))
                return fail("control octet in attribute value", pos);
            out += c;
            ++pos;
        }
        return fail("unterminated attribute value", pos);
    }

    bool parse_element(XmlElement &out, int depth) {
        if (depth > kMaxDepth)
            return fail("nesting too deep", pos);
        ++pos; // '<'
        if (!read_name(out.name))
            return false;
        // attributes
        while (true) {
            skip_ws();
            if (done())
                return fail("unterminated start tag", pos);
            if (peek() == '/') {
                if (!starts("/>"))
                    return fail("malformed empty-element tag", pos);
                pos += 2;
                return true;
            }
            if (peek() == '>') {
                ++pos;
                break;
            }
            Bytes aname;
            size_t astart = pos;
            if (!read_name(aname))
                return false;
            skip_ws();
            if (done() || peek() != '=')
                return fail("attribute without value", pos);
            ++pos;
            skip_ws();
            Bytes avalue;
            if (!parse_attr_value(avalue))
                return false;
            if (strict) {
                for (const auto &[n, v] : out.attributes)
                    if (n == aname)
                        return fail("duplicate attribute", astart);
            }
            out.attributes.emplace_back(std::move(aname), std::move(avalue));
        }
        return parse_content(out, depth);
    }

    bool parse_content(XmlElement &out, int depth) {
        struct PendingText {
            Bytes text;
            size_t offset;
        };
        std::vector<PendingText> texts;
        std::vector<std::pair<XmlElement, size_t>> elements;
        std::vector<std::pair<XmlNode, size_t>> ordered;

        auto flush_text = [&](Bytes t, size_t off) {
            if (t.empty())
                return;
            texts.push_back({t, off});
            ordered.emplace_back(XmlNode::make_text(std::move(t)), off);
        };

        Bytes run;
        size_t run_start = pos;
        while (true) {
            if (done())
                return fail("unterminated element " + out.name, pos);
            char c = peek();
            if (c == '<') {
                if (starts("</")) {
                    flush_text(std::move(run), run_start);
                    run.clear();
                    pos += 2;
                    Bytes close;
                    size_t cstart = pos;
                    if (!read_name(close))
                        return false;
                    skip_ws();
                    if (done() || peek() != '>')
                        return fail("malformed close tag", pos);
                    ++pos;
                    if (close != out.name)
                        return fail("mismatched close tag " + close, cstart);
                    break;
                }
                if (starts("<![CDATA[")) {
                    size_t end = s.find("]]>", pos + 9);
                    if (end == BytesView::npos)
                        return fail("unterminated CDATA section", pos);
                    run += Bytes(s.substr(pos + 9, end - pos - 9));
                    pos = end + 3;
                    continue;
                }
                if (starts("<!--") || starts("<?")) {
                    if (strict)
                        return fail("unsupported construct in content", pos);
                    if (!skip_comment_or_pi())
                        return false;
                    continue;
                }
                flush_text(std::move(run), run_start);
                run.clear();
                size_t estart = pos;
                XmlElement child;
                if (!parse_element(child, depth + 1))
                    return false;
                elements.emplace_back(child, estart);
                ordered.emplace_back(XmlNode::make_element(std::move(child)),
                                     estart);
                run_start = pos;
                continue;
            }
            if (run.empty())
                run_start = pos;
            if (c == '&') {
                if (!read_entity(run))
                    return false;
                continue;
            }
            if (!check_text_char(static_cast<unsigned char>(c)))
                return fail("control octet in text content", pos);
            if (c == ']' && starts("]]>") && strict)
                return fail("']]>' in text content", pos);
            run += c;
            ++pos;
        }

        // Mixed-content discipline: character data and child elements may not
        // be siblings in the strict subset; whitespace-only runs between
        // elements are dropped.
        bool has_elements = !elements.empty();
        if (has_elements) {
            for (auto &node : ordered) {
                if (node.first.kind != XmlNode::Kind::Text)
                    continue;
                if (ws_only(node.first.text)) {
                    node.first.text.clear();
                    continue;
                }
                if (strict)
                    return fail("text content adjacent to child elements",
                                node.second);
                bool stray_bracket =
                    p.tolerate_stray_bracket_after_doctype && has_doctype &&
                    ws_only_except_brackets(node.first.text);
                if (!stray_bracket && !p.tolerate_junk_before_close_tag)
                    return fail("text content adjacent to child elements",
                                node.second);
            }
        }
        for (auto &node : ordered) {
            if (node.first.kind == XmlNode::Kind::Text &&
                node.first.text.empty())
                continue;
            out.children.push_back(std::move(node.first));
        }
        return true;
    }

    static bool ws_only_except_brackets(BytesView t) {
        return std::all_of(t.begin(), t.end(), [](char c) {
            return is_xml_ws(c) || c == ']' || c == '[';
        });
    }

    bool parse_document(XmlDocument &doc) {
        std::vector<TopItem> tops;
        bool prolog_allowed = true;
        while (true) {
            size_t text_start = pos;
            Bytes text;
            while (!done() && peek() != '<') {
                char c = peek();
                if (c == '&') {
                    if (!read_entity(text))
                        return false;
                    continue;
                }
                if (!check_text_char(static_cast<unsigned char>(c)))
                    return fail("control octet outside markup", pos);
                text += c;
                ++pos;
            }
            if (!ws_only(text)) {
                tops.push_back({XmlNode::make_text(std::move(text)), text_start});
                prolog_allowed = false;
            }
            if (done())
                break;
            if (starts("<?xml") && prolog_allowed && doc.prolog_raw.empty() &&
                tops.empty()) {
                size_t end = s.find("?>", pos);
                if (end == BytesView::npos)
                    return fail("unterminated XML declaration", pos);
                doc.prolog_raw = Bytes(s.substr(pos, end + 2 - pos));
                pos = end + 2;
                continue;
            }
            if (starts("<!DOCTYPE")) {
                if (!parse_doctype(doc))
                    return false;
                has_doctype = true;
                continue;
            }
            if (starts("<!--") || starts("<?")) {
                if (strict)
                    return fail("unsupported construct", pos);
                if (!skip_comment_or_pi())
                    return false;
                continue;
            }
            if (starts("<![CDATA[")) {
                size_t end = s.find("]]>", pos + 9);
                if (end == BytesView::npos)
                    return fail("unterminated CDATA section", pos);
                tops.push_back(
                    {XmlNode::make_text(Bytes(s.substr(pos + 9, end - pos - 9))),
                     pos});
                pos = end + 3;
                prolog_allowed = false;
                continue;
            }
            size_t estart = pos;
            XmlElement elem;
            if (!parse_element(elem, 0))
                return false;
            tops.push_back({XmlNode::make_element(std::move(elem)), estart});
            prolog_allowed = false;
        }

        size_t element_count = 0;
        for (const auto &t : tops)
            if (t.node.kind == XmlNode::Kind::Element)
                ++element_count;
        if (element_count == 0)
            return fail("no root element", s.size());
        if (strict) {
            for (const auto &t : tops)
                if (t.node.kind == XmlNode::Kind::Text)
                    return fail("text outside root element", t.offset);
            if (element_count > 1) {
                size_t seen = 0;
                for (const auto &t : tops) {
                    if (t.node.kind == XmlNode::Kind::Element && ++seen == 2)
                        return fail("multiple root elements", t.offset);
                }
            }
            doc.root = tops.front().node.element;
            return true;
        }
        for (const auto &t : tops) {
            if (t.node.kind == XmlNode::Kind::Text &&
                !p.tolerate_text_outside_root) {
                bool stray_bracket = p.tolerate_stray_bracket_after_doctype &&
                                     has_doctype &&
                                     ws_only_except_brackets(t.node.text);
                if (!stray_bracket)
                    return fail("text outside root element", t.offset);
            }
        }
        if (element_count > 1 && !p.tolerate_duplicate_siblings) {
            size_t seen = 0;
            for (const auto &t : tops)
                if (t.node.kind == XmlNode::Kind::Element && ++seen == 2)
                    return fail("multiple root elements", t.offset);
        }
        if (tops.size() == 1 && tops.front().node.kind == XmlNode::Kind::Element) {
            doc.root = tops.front().node.element;
        } else {
            // Synthetic wrapper keeps pre/post-root text and sibling roots
            // addressable.
            XmlElement wrapper;
            for (auto &t : tops)
                wrapper.children.push_back(std::move(t.node));
            doc.root = std::move(wrapper);
        }
        return true;
    }

    bool parse_doctype(XmlDocument &doc) {
        size_t start = pos;
        pos += 9; // "<!DOCTYPE"
        // The internal subset is skipped opaquely; entities are never
        // expanded.
        bool in_subset = false;
        while (!done()) {
            char c = peek();
            if (c == '[')
                in_subset = true;
            else if (c == ']')
                in_subset = false;
            else if (c == '>' && !in_subset) {
                ++pos;
                doc.doctype_raw = Bytes(s.substr(start, pos - start));
                return true;
            }
            ++pos;
        }
        return fail("unterminated DOCTYPE", start);
    }
};

} // namespace

Result<XmlDocument, RejectReason> parse_xml_strict(BytesView body) {
    size_t bad = utf8_invalid_at(body);
    if (bad != BytesView::npos)
        return RejectReason{RejectCategory::MalformedBody, "invalid UTF-8", bad};
    XmlLeniency strict_profile;
    XmlParser parser{body, 0, strict_profile, true};
    XmlDocument doc;
    if (!parser.parse_document(doc))
        return parser.err;
    return doc;
}

Result<XmlDocument, LenientError> parse_xml_lenient(BytesView body,
                                                    const XmlLeniency &p) {
    if (p.is_strict()) {
        auto strict = parse_xml_strict(body);
        if (!strict)
            return LenientError{strict.error().detail + " at offset " +
                                std::to_string(strict.error().offset.value_or(0))};
        return std::move(*strict);
    }
    Bytes sanitized = replace_invalid_utf8(body);
    XmlParser parser{sanitized, 0, p, false};
    XmlDocument doc;
    if (!parser.parse_document(doc))
        return LenientError{parser.err.detail + " at offset " +
                            std::to_string(parser.err.offset.value_or(0))};
    return doc;
}

namespace {

void collect_walk(const XmlElement &e, const Bytes &prefix,
                  std::vector<std::pair<Bytes, Bytes>> &out) {
    Bytes path;
    if (e.name.empty())
        path = prefix; // synthetic root contributes no segment
    else
        path = prefix.empty() ? e.name : prefix + "/" + e.name;
    for (const auto &[aname, avalue] : e.attributes)
        out.emplace_back(path.empty() ? "@" + aname : path + "/@" + aname,
                         avalue);
    for (const auto &child : e.children) {
        if (child.kind == XmlNode::Kind::Text)
            out.emplace_back(path, child.text);
        else
            collect_walk(child.element, path, out);
    }
}

Bytes escape_text(BytesView s) {
    Bytes out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

Bytes escape_attr(BytesView s) {
    Bytes out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '"')
            out += "&quot;";
        else
            out += c;
    }
    return out;
}

void emit_element(const XmlElement &e, Bytes &out) {
    out += '<';
    out += e.name;
    for (const auto &[aname, avalue] : e.attributes) {
        out += ' ';
        out += aname;
        out += "=\"";
        out += escape_attr(avalue);
        out += '"';
    }
    if (e.children.empty()) {
        out += "/>";
        return;
    }
    out += '>';
    for (const auto &child : e.children) {
        if (child.kind == XmlNode::Kind::Text)
            out += escape_text(child.text);
        else
            emit_element(child.element, out);
    }
    out += "</";
    out += e.name;
    out += '>';
}

} // namespace

std::vector<std::pair<Bytes, Bytes>> collect_text_fields(const XmlDocument &d) {
    std::vector<std::pair<Bytes, Bytes>> out;
    collect_walk(d.root, "", out);
    return out;
}

Bytes serialize_xml_canonical(const XmlDocument &d) {
    Bytes out = d.prolog_raw;
    out += d.doctype_raw;
    if (d.synthetic_root()) {
        for (const auto &child : d.root.children) {
            if (child.kind == XmlNode::Kind::Text)
                out += escape_text(child.text);
            else
                emit_element(child.element, out);
        }
    } else {
        emit_element(d.root, out);
    }
    return out;
}

} // namespace wafdiff
