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

#include "wafdiff/http_model.hpp"

#include <algorithm>

namespace wafdiff {

BytesView line_ending_bytes(LineEnding e) {
    return e == LineEnding::Crlf ? BytesView("\r\n") : BytesView("\n");
}

const HeaderField *RawRequest::find_header(BytesView name) const {
    for (const auto &h : headers)
        if (ascii_ieq(h.name, name))
            return &h;
    return nullptr;
}

HeaderField *RawRequest::find_header(BytesView name) {
    for (auto &h : headers)
        if (ascii_ieq(h.name, name))
            return &h;
    return nullptr;
}

std::optional<BytesView> RawRequest::header_value(BytesView name) const {
    const HeaderField *h = find_header(name);
    if (!h)
        return std::nullopt;
    return BytesView(h->value);
}

bool RawRequest::used_bare_lf() const {
    if (request_line_ending == LineEnding::Lf ||
        blank_line_ending == LineEnding::Lf)
        return true;
    return std::any_of(headers.begin(), headers.end(), [](const HeaderField &h) {
        return h.ending == LineEnding::Lf;
    });
}

namespace {

// Scans one line: CRLF or bare LF terminates. A CR not followed by LF is
// ordinary content. Returns false when no terminator exists before EOF.
bool next_line(BytesView data, size_t pos, BytesView &line, size_t &next,
               LineEnding &ending) {
    for (size_t i = pos; i < data.size(); ++i) {
        if (data[i] == '\n') {
            bool crlf = i > pos && data[i - 1] == '\r';
            line = data.substr(pos, i - pos - (crlf ? 1 : 0));
            next = i + 1;
            ending = crlf ? LineEnding::Crlf : LineEnding::Lf;
            return true;
        }
    }
    return false;
}

bool is_http_method(BytesView s) {
    return !s.empty() && is_token(s);
}

} // namespace

Result<RawRequest, StructuralError> parse_request(BytesView octets) {
    if (octets.empty())
        return StructuralError{0, "empty input"};
    if (octets.size() > kMaxRequestBytes)
        return StructuralError{kMaxRequestBytes, "request exceeds 16 MiB cap"};

    RawRequest req;
    BytesView line;
    size_t pos = 0;
    size_t next = 0;

    if (!next_line(octets, pos, line, next, req.request_line_ending))
        return StructuralError{octets.size(), "no request line terminator"};

    // Exactly `method SP target SP HTTP/1.1`; anything looser would not
    // round-trip through the field-based serializer.
    size_t sp1 = line.find(' ');
    if (sp1 == BytesView::npos)
        return StructuralError{pos, "request line: missing method separator"};
    size_t sp2 = line.find(' ', sp1 + 1);
    if (sp2 == BytesView::npos)
        return StructuralError{pos + sp1 + 1, "request line: missing target separator"};
    BytesView method = line.substr(0, sp1);
    BytesView target = line.substr(sp1 + 1, sp2 - sp1 - 1);
    BytesView version = line.substr(sp2 + 1);
    if (!is_http_method(method))
        return StructuralError{pos, "request line: malformed method"};
    if (target.empty() || target.find(' ') != BytesView::npos)
        return StructuralError{pos + sp1 + 1, "request line: malformed target"};
    if (version != "HTTP/1.1")
        return StructuralError{pos + sp2 + 1, "unsupported HTTP version"};
    req.method = Bytes(method);
    req.target = Bytes(target);

    pos = next;
    bool saw_blank = false;
    while (true) {
        LineEnding ending;
        if (!next_line(octets, pos, line, next, ending))
            return StructuralError{octets.size(),
                                   "no header/body separator reachable"};
        if (line.empty()) {
            req.blank_line_ending = ending;
            saw_blank = true;
            pos = next;
            break;
        }
        if (req.headers.size() >= kMaxHeaderCount)
            return StructuralError{pos, "more than 256 headers"};
        HeaderField h;
        h.ending = ending;
        size_t colon = line.find(':');
        if (colon == BytesView::npos) {
            // Malformed but representable: mutations strip names and colons.
            h.name = Bytes(line);
        } else {
            h.name = Bytes(line.substr(0, colon));
            size_t vstart = colon + 1;
            while (vstart < line.size() && is_ows(line[vstart]))
                ++vstart;
            h.sep = Bytes(line.substr(colon, vstart - colon));
            h.value = Bytes(line.substr(vstart));
        }
        req.headers.push_back(std::move(h));
        pos = next;
    }
    (void)saw_blank;

    // Content-Length is advisory; the body is everything after the blank
    // line. Mutants deliberately desynchronize length fields.
    req.body = Bytes(octets.substr(pos));
    return req;
}

Bytes serialize_request(const RawRequest &req, RecomputeLength recompute) {
    Bytes out;
    out.reserve(req.body.size() + 256);
    out += req.method;
    out += ' ';
    out += req.target;
    out += " HTTP/1.1";
    out += line_ending_bytes(req.request_line_ending);

    bool length_written = false;
    for (const auto &h : req.headers) {
        if (recompute == RecomputeLength::On && !length_written &&
            ascii_ieq(h.name, "Content-Length")) {
            out += h.name;
            out += h.sep.empty() ? Bytes(": ") : h.sep;
            out += std::to_string(req.body.size());
            out += line_ending_bytes(h.ending);
            length_written = true;
            continue;
        }
        out += h.name;
        out += h.sep;
        out += h.value;
        out += line_ending_bytes(h.ending);
    }
    if (recompute == RecomputeLength::On && !length_written &&
        !req.body.empty()) {
        out += "Content-Length: ";
        out += std::to_string(req.body.size());
        out += "\r\n";
    }
    out += line_ending_bytes(req.blank_line_ending);
    out += req.body;
    return out;
}

// ---------------------------------------------------------------------------
// Media types

bool is_tchar(unsigned char c) {
    if (is_digit(c) || is_alpha(c))
        return true;
    switch (c) {
    case '!': case '#': case '$': case '%': case '&': case '\'': case '*':
    case '+': case '-': case '.': case '^': case '_': case '`': case '|':
    case '~':
        return true;
    default:
        return false;
    }
}

bool is_token(BytesView s) {
    if (s.empty())
        return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return is_tchar(static_cast<unsigned char>(c)); });
}

const MediaTypeParam *MediaType::first_param(BytesView name) const {
    for (const auto &p : parameters)
        if (p.name == name && !p.continuation_index)
            return &p;
    return nullptr;
}

bool MediaType::has_continuation() const {
    return std::any_of(parameters.begin(), parameters.end(),
                       [](const MediaTypeParam &p) {
                           return p.continuation_index.has_value();
                       });
}

namespace {

struct MtCursor {
    BytesView s;
    size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ows() {
        while (!done() && is_ows(peek()))
            ++pos;
    }
};

Result<Bytes, MediaTypeError> read_token(MtCursor &c, const char *what) {
    size_t start = c.pos;
    while (!c.done() && is_tchar(static_cast<unsigned char>(c.peek())))
        ++c.pos;
    if (c.pos == start)
        return MediaTypeError{start, Bytes("empty ") + what};
    return Bytes(c.s.substr(start, c.pos - start));
}

Result<Bytes, MediaTypeError> read_quoted(MtCursor &c) {
    size_t start = c.pos;
    ++c.pos; // opening quote
    Bytes out;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == '"') {
            ++c.pos;
            return out;
        }
        if (ch == '\\') {
            ++c.pos;
            if (c.done())
                break;
            out.push_back(c.peek());
            ++c.pos;
            continue;
        }
        if (is_ctl(static_cast<unsigned char>(ch)) && ch != '\t')
            return MediaTypeError{c.pos, "control octet in quoted string"};
        out.push_back(ch);
        ++c.pos;
    }
    return MediaTypeError{start, "unterminated quoted string"};
}

} // namespace

Result<MediaType, MediaTypeError> parse_media_type(BytesView raw) {
    MtCursor c{trim_ows(raw)};
    MediaType mt;

    auto type = read_token(c, "type");
    if (!type)
        return type.error();
    if (c.done() || c.peek() != '/')
        return MediaTypeError{c.pos, "missing slash"};
    ++c.pos;
    auto subtype = read_token(c, "subtype");
    if (!subtype)
        return subtype.error();
    mt.type = ascii_lower_copy(*type);
    mt.subtype = ascii_lower_copy(*subtype);

    while (true) {
        c.skip_ows();
        if (c.done())
            break;
        if (c.peek() != ';')
            return MediaTypeError{c.pos, "junk after subtype"};
        ++c.pos;
        c.skip_ows();
        if (c.done() || c.peek() == ';')
            return MediaTypeError{c.pos, "empty parameter"};
        auto attr = read_token(c, "parameter name");
        if (!attr)
            return attr.error();
        if (c.done() || c.peek() != '=')
            return MediaTypeError{c.pos, "parameter without value"};
        ++c.pos;

        MediaTypeParam param;
        Bytes name = ascii_lower_copy(*attr);
        // RFC 2231 continuation syntax: name*N. Segments are annotated, never
        // joined; the count of parameters matches the attribute count.
        size_t star = name.find('*');
        if (star != Bytes::npos && star + 1 < name.size()) {
            BytesView idx = BytesView(name).substr(star + 1);
            bool all_digits = std::all_of(idx.begin(), idx.end(), [](char d) {
                return is_digit(d);
            });
            if (all_digits) {
                param.continuation_index = std::stoi(Bytes(idx));
                name = name.substr(0, star);
            }
        }
        param.name = name;

        if (!c.done() && c.peek() == '"') {
            auto q = read_quoted(c);
            if (!q)
                return q.error();
            param.value = *q;
            param.quoted = true;
        } else {
            auto v = read_token(c, "parameter value");
            if (!v)
                return v.error();
            param.value = *v;
        }
        mt.parameters.push_back(std::move(param));
    }
    return mt;
}

Bytes media_type_canonical(const MediaType &mt) {
    Bytes out = mt.type + "/" + mt.subtype;
    for (const auto &p : mt.parameters) {
        out += "; ";
        out += p.name;
        if (p.continuation_index)
            out += "*" + std::to_string(*p.continuation_index);
        out += '=';
        if (is_token(p.value)) {
            out += p.value;
        } else {
            out += '"';
            for (char ch : p.value) {
                if (ch == '"' || ch == '\\')
                    out += '\\';
                out += ch;
            }
            out += '"';
        }
    }
    return out;
}

} // namespace wafdiff
