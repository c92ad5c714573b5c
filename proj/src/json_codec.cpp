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

#include "wafdiff/json_codec.hpp"

#include <algorithm>

namespace wafdiff {

JsonValue JsonValue::number(long long n) {
    return number(std::to_string(n));
}

JsonValue &JsonValue::add(Bytes name, JsonValue v) {
    members.emplace_back(std::move(name), std::move(v));
    return *this;
}

JsonValue &JsonValue::push(JsonValue v) {
    items.push_back(std::move(v));
    return *this;
}

const JsonValue *JsonValue::find(BytesView name) const {
    for (const auto &[n, v] : members)
        if (n == name)
            return &v;
    return nullptr;
}

bool operator==(const JsonValue &a, const JsonValue &b) {
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case JsonValue::Kind::Object:
        return a.members == b.members;
    case JsonValue::Kind::Array:
        return a.items == b.items;
    case JsonValue::Kind::String:
        return a.str == b.str;
    case JsonValue::Kind::Number:
        return a.number_text == b.number_text;
    case JsonValue::Kind::Boolean:
        return a.boolean == b.boolean;
    case JsonValue::Kind::Null:
        return true;
    }
    return false;
}

bool JsonLeniency::is_strict() const {
    return !allow_unescaped_control_in_strings && !allow_missing_closing_quote &&
           bytes_between_name_and_colon.empty();
}

JsonLeniency JsonLeniency::permissive() {
    JsonLeniency p;
    p.allow_unescaped_control_in_strings = true;
    p.allow_missing_closing_quote = true;
    p.bytes_between_name_and_colon = {0x00, 0x01, 0x02, 0x09, 0x0b};
    return p;
}

namespace {

constexpr int kMaxDepth = 256;

// Offset of the first invalid UTF-8 byte, or npos when the buffer is valid.
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
        for (size_t k = 1; k < len; ++k) {
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

struct JsonParser {
    BytesView s;
    size_t pos = 0;
    const JsonLeniency &p;
    bool strict;
    RejectReason err{RejectCategory::MalformedBody, "", 0};

    bool fail(Bytes message, size_t at) {
        err = RejectReason{RejectCategory::MalformedBody, std::move(message), at};
        return false;
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' ||
                           s[pos] == '\r'))
            ++pos;
    }

    struct StringToken {
        Bytes value;
        size_t content_start = 0; // just after the opening quote
        size_t content_end = 0;   // at the closing quote
    };

    bool parse_string(StringToken &out) {
        if (done() || peek() != '"')
            return fail("expected string", pos);
        ++pos;
        out.content_start = pos;
        out.value.clear();
        while (!done()) {
            unsigned char c = peek();
            if (c == '"') {
                out.content_end = pos;
                ++pos;
                return true;
            }
            if (c == '\\') {
                size_t esc_at = pos;
                ++pos;
                if (done())
                    return fail("truncated escape", esc_at);
                char e = peek();
                ++pos;
                switch (e) {
                case '"': out.value.push_back('"'); break;
                case '\\': out.value.push_back('\\'); break;
                case '/': out.value.push_back('/'); break;
                case 'b': out.value.push_back('\b'); break;
                case 'f': out.value.push_back('\f'); break;
                case 'n': out.value.push_back('\n'); break;
                case 'r': out.value.push_back('\r'); break;
                case 't': out.value.push_back('\t'); break;
                case 'u': {
                    unsigned cp = 0;
                    if (!read_hex4(cp))
                        return fail("malformed \\u escape", esc_at);
                    if (cp >= 0xd800 && cp <= 0xdbff) {
                        if (pos + 1 < s.size() && s[pos] == '\\' &&
                            s[pos + 1] == 'u') {
                            pos += 2;
                            unsigned lo = 0;
                            if (!read_hex4(lo) || lo < 0xdc00 || lo > 0xdfff)
                                return fail("unpaired surrogate", esc_at);
                            cp = 0x10000 + ((cp - 0xd800) << 10) + (lo - 0xdc00);
                        } else {
                            return fail("unpaired surrogate", esc_at);
                        }
                    } else if (cp >= 0xdc00 && cp <= 0xdfff) {
                        return fail("unpaired surrogate", esc_at);
                    }
                    append_utf8(out.value, cp);
                    break;
                }
                default:
                    return fail("invalid escape", esc_at);
                }
                continue;
            }
            if (c < 0x20) {
                if (!p.allow_unescaped_control_in_strings)
                    return fail("unescaped control character in string", pos);
                out.value.push_back(static_cast<char>(c));
                ++pos;
                continue;
            }
            out.value.push_back(static_cast<char>(c));
            ++pos;
        }
        return fail("unterminated string", out.content_start - 1);
    }

    bool read_hex4(unsigned &cp) {
        cp = 0;
        for (int i = 0; i < 4; ++i) {
            if (done())
                return false;
            char c = peek();
            int v;
            if (c >= '0' && c <= '9')
                v = c - '0';
            else if (c >= 'a' && c <= 'f')
                v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F')
                v = c - 'A' + 10;
            else
                return false;
            cp = (cp << 4) | static_cast<unsigned>(v);
            ++pos;
        }
        return true;
    }

    bool parse_number(JsonValue &out) {
        size_t start = pos;
        if (!done() && peek() == '-')
            ++pos;
        if (done() || !is_digit(peek()))
            return fail("malformed number", start);
        if (peek() == '0') {
            ++pos;
        } else {
            while (!done() && is_digit(peek()))
                ++pos;
        }
        if (!done() && peek() == '.') {
            ++pos;
            if (done() || !is_digit(peek()))
                return fail("malformed number fraction", pos);
            while (!done() && is_digit(peek()))
                ++pos;
        }
        if (!done() && (peek() == 'e' || peek() == 'E')) {
            ++pos;
            if (!done() && (peek() == '+' || peek() == '-'))
                ++pos;
            if (done() || !is_digit(peek()))
                return fail("malformed number exponent", pos);
            while (!done() && is_digit(peek()))
                ++pos;
        }
        out = JsonValue::number(Bytes(s.substr(start, pos - start)));
        return true;
    }

    bool skip_name_colon_filler() {
        // whitespace plus any octets the profile allows between a member
        // name and its colon
        bool progressed = true;
        while (progressed && !done()) {
            progressed = false;
            size_t before = pos;
            skip_ws();
            while (!done() &&
                   std::find(p.bytes_between_name_and_colon.begin(),
                             p.bytes_between_name_and_colon.end(),
                             static_cast<unsigned char>(peek())) !=
                       p.bytes_between_name_and_colon.end())
                ++pos;
            progressed = pos != before;
        }
        return true;
    }

    bool parse_value(JsonValue &out, int depth) {
        if (depth > kMaxDepth)
            return fail("nesting too deep", pos);
        skip_ws();
        if (done())
            return fail("unexpected end of input", pos);
        char c = peek();
        if (c == '{')
            return parse_object(out, depth);
        if (c == '[')
            return parse_array(out, depth);
        if (c == '"') {
            StringToken t;
            if (!parse_string(t))
                return false;
            out = JsonValue::string(std::move(t.value));
            return true;
        }
        if (c == '-' || is_digit(c))
            return parse_number(out);
        if (s.substr(pos).starts_with("true")) {
            pos += 4;
            out = JsonValue::boolean_value(true);
            return true;
        }
        if (s.substr(pos).starts_with("false")) {
            pos += 5;
            out = JsonValue::boolean_value(false);
            return true;
        }
        if (s.substr(pos).starts_with("null")) {
            pos += 4;
            out = JsonValue::null();
            return true;
        }
        return fail("unexpected byte", pos);
    }

    bool parse_object(JsonValue &out, int depth) {
        out = JsonValue::object();
        ++pos; // '{'
        skip_ws();
        if (!done() && peek() == '}') {
            ++pos;
            return true;
        }
        while (true) {
            skip_ws();
            StringToken name;
            if (!parse_string(name))
                return false;
            Bytes member_name = std::move(name.value);

            skip_name_colon_filler();
            if (done() || peek() != ':') {
                // Missing-closing-quote recovery: the scanned name swallowed
                // the colon and the value's opening quote. Re-split the raw
                // span at the first colon inside it.
                size_t colon_in_raw = BytesView::npos;
                if (p.allow_missing_closing_quote)
                    colon_in_raw = s.substr(name.content_start,
                                            name.content_end - name.content_start)
                                       .find(':');
                if (colon_in_raw == BytesView::npos)
                    return fail("expected colon after member name", pos);
                BytesView raw_name = s.substr(name.content_start, colon_in_raw);
                while (!raw_name.empty() && is_ows(raw_name.back()))
                    raw_name.remove_suffix(1);
                member_name = Bytes(raw_name);
                pos = name.content_start + colon_in_raw;
            }
            ++pos; // ':'
            JsonValue v;
            if (!parse_value(v, depth + 1))
                return false;
            out.add(std::move(member_name), std::move(v));
            skip_ws();
            if (done())
                return fail("unterminated object", pos);
            if (peek() == ',') {
                ++pos;
                continue;
            }
            if (peek() == '}') {
                ++pos;
                return true;
            }
            return fail("expected comma or closing brace", pos);
        }
    }

    bool parse_array(JsonValue &out, int depth) {
        out = JsonValue::array();
        ++pos; // '['
        skip_ws();
        if (!done() && peek() == ']') {
            ++pos;
            return true;
        }
        while (true) {
            JsonValue v;
            if (!parse_value(v, depth + 1))
                return false;
            out.push(std::move(v));
            skip_ws();
            if (done())
                return fail("unterminated array", pos);
            if (peek() == ',') {
                ++pos;
                continue;
            }
            if (peek() == ']') {
                ++pos;
                return true;
            }
            return fail("expected comma or closing bracket", pos);
        }
    }

    bool parse_document(JsonValue &out) {
        JsonValue v;
        if (!parse_value(v, 0))
            return false;
        skip_ws();
        if (!done())
            return fail("content after top-level value", pos);
        out = std::move(v);
        return true;
    }
};

} // namespace

Result<JsonValue, RejectReason> parse_json_strict(BytesView body) {
    size_t bad = utf8_invalid_at(body);
    if (bad != BytesView::npos)
        return RejectReason{RejectCategory::MalformedBody, "invalid UTF-8", bad};
    JsonLeniency strict_profile;
    JsonParser parser{body, 0, strict_profile, true};
    JsonValue out;
    if (!parser.parse_document(out))
        return parser.err;
    return out;
}

Result<JsonValue, LenientError> parse_json_lenient(BytesView body,
                                                   const JsonLeniency &p) {
    if (p.is_strict()) {
        auto strict = parse_json_strict(body);
        if (!strict)
            return LenientError{strict.error().detail + " at offset " +
                                std::to_string(strict.error().offset.value_or(0))};
        return std::move(*strict);
    }
    JsonParser parser{body, 0, p, false};
    JsonValue out;
    if (!parser.parse_document(out))
        return LenientError{parser.err.detail + " at offset " +
                            std::to_string(parser.err.offset.value_or(0))};
    return out;
}

namespace {

void emit_string(Bytes &out, BytesView s) {
    static const char *hex = "0123456789abcdef";
    out += '"';
    for (unsigned char c : s) {
        if (c == '"') {
            out += "\\\"";
        } else if (c == '\\') {
            out += "\\\\";
        } else if (c < 0x20) {
            out += "\\u00";
            out += hex[c >> 4];
            out += hex[c & 0xf];
        } else {
            out += static_cast<char>(c);
        }
    }
    out += '"';
}

void emit(Bytes &out, const JsonValue &v) {
    switch (v.kind) {
    case JsonValue::Kind::Object: {
        out += '{';
        bool first = true;
        for (const auto &[name, member] : v.members) {
            if (!first)
                out += ',';
            first = false;
            emit_string(out, name);
            out += ':';
            emit(out, member);
        }
        out += '}';
        break;
    }
    case JsonValue::Kind::Array: {
        out += '[';
        bool first = true;
        for (const auto &item : v.items) {
            if (!first)
                out += ',';
            first = false;
            emit(out, item);
        }
        out += ']';
        break;
    }
    case JsonValue::Kind::String:
        emit_string(out, v.str);
        break;
    case JsonValue::Kind::Number:
        out += v.number_text;
        break;
    case JsonValue::Kind::Boolean:
        out += v.boolean ? "true" : "false";
        break;
    case JsonValue::Kind::Null:
        out += "null";
        break;
    }
}

void flatten(const JsonValue &v, const Bytes &path,
             std::vector<std::pair<Bytes, Bytes>> &out) {
    auto child_path = [&](const Bytes &segment) {
        return path.empty() ? segment : path + "/" + segment;
    };
    switch (v.kind) {
    case JsonValue::Kind::Object:
        for (const auto &[name, member] : v.members)
            flatten(member, child_path(name), out);
        break;
    case JsonValue::Kind::Array:
        for (size_t i = 0; i < v.items.size(); ++i)
            flatten(v.items[i], child_path(std::to_string(i)), out);
        break;
    case JsonValue::Kind::String:
        out.emplace_back(path, v.str);
        break;
    case JsonValue::Kind::Number:
        out.emplace_back(path, v.number_text);
        break;
    case JsonValue::Kind::Boolean:
        out.emplace_back(path, v.boolean ? "true" : "false");
        break;
    case JsonValue::Kind::Null:
        out.emplace_back(path, "null");
        break;
    }
}

} // namespace

Bytes serialize_json_canonical(const JsonValue &v) {
    Bytes out;
    emit(out, v);
    return out;
}

std::vector<std::pair<Bytes, Bytes>> flatten_json_fields(const JsonValue &v) {
    std::vector<std::pair<Bytes, Bytes>> out;
    flatten(v, "", out);
    return out;
}

} // namespace wafdiff
