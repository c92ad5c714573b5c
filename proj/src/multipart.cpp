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

#include "wafdiff/multipart.hpp"

#include <algorithm>
#include <map>

namespace wafdiff {

bool is_valid_boundary(BytesView b) {
    if (b.empty() || b.size() > 70)
        return false;
    if (b.back() == ' ')
        return false;
    for (char c : b) {
        if (is_digit(c) || is_alpha(c))
            continue;
        switch (c) {
        case '\'': case '(': case ')': case '+': case '_': case ',':
        case '-': case '.': case '/': case ':': case '=': case '?':
        case ' ':
            continue;
        default:
            return false;
        }
    }
    return true;
}

bool LeniencyProfile::is_strictest() const {
    return !join_continuation_params && boundary_pick == BoundaryPick::First &&
           !tolerate_control_in_headers && !tolerate_missing_final_delimiter &&
           !tolerate_bare_lf && header_separator_chars.empty();
}

LeniencyProfile LeniencyProfile::permissive() {
    LeniencyProfile p;
    p.join_continuation_params = true;
    p.boundary_pick = BoundaryPick::Joined;
    p.tolerate_control_in_headers = true;
    p.tolerate_missing_final_delimiter = true;
    p.tolerate_bare_lf = true;
    p.header_separator_chars = {0x00, 0x01, 0x02, 0x09, 0x0b};
    return p;
}

namespace {

// Octets that may appear in a disposition parameter value under strict
// parsing; control octets there have their own reject category.
bool has_ctl(BytesView s) {
    return std::any_of(s.begin(), s.end(), [](char c) {
        return is_ctl(static_cast<unsigned char>(c));
    });
}

struct StrictCursor {
    BytesView s;
    size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    bool starts(BytesView prefix) const {
        return s.substr(pos).starts_with(prefix);
    }
};

struct DispositionFields {
    Bytes name;
    std::optional<Bytes> filename;
};

// Strict Content-Disposition parse for one part header. The body-relative
// `base` offset positions reject reasons.
Result<DispositionFields, RejectReason>
parse_disposition_strict(BytesView value, size_t base,
                         MultipartParseNotes &notes) {
    StrictCursor c{value};
    size_t tstart = c.pos;
    while (!c.done() && is_tchar(static_cast<unsigned char>(c.peek())))
        ++c.pos;
    BytesView type = value.substr(tstart, c.pos - tstart);
    if (!ascii_ieq(type, "form-data"))
        return RejectReason{RejectCategory::MalformedPartHeader,
                            "disposition type is not form-data", base + tstart};
    if (type != "form-data")
        notes.case_deviation = true;

    DispositionFields out;
    bool saw_name = false;
    while (true) {
        size_t ows_start = c.pos;
        while (!c.done() && is_ows(c.peek()))
            ++c.pos;
        if (c.done())
            break;
        if (c.peek() != ';')
            return RejectReason{RejectCategory::MalformedPartHeader,
                                "junk in disposition parameters", base + c.pos};
        ++c.pos;
        size_t ows2 = c.pos;
        while (!c.done() && is_ows(c.peek()))
            ++c.pos;
        // canonical separator between parameters is "; "
        if (value.substr(ows_start, c.pos - ows_start) != "; ")
            notes.whitespace_deviation = true;
        (void)ows2;

        size_t astart = c.pos;
        while (!c.done() && is_tchar(static_cast<unsigned char>(c.peek())))
            ++c.pos;
        BytesView attr = value.substr(astart, c.pos - astart);
        if (attr.empty() || c.done() || c.peek() != '=')
            return RejectReason{RejectCategory::MalformedPartHeader,
                                "malformed disposition parameter", base + astart};
        ++c.pos;

        Bytes v;
        bool quoted = false;
        if (!c.done() && c.peek() == '"') {
            quoted = true;
            ++c.pos;
            bool closed = false;
            while (!c.done()) {
                char ch = c.peek();
                if (ch == '"') {
                    ++c.pos;
                    closed = true;
                    break;
                }
                if (ch == '\\') {
                    ++c.pos;
                    if (c.done())
                        break;
                    char escaped = c.peek();
                    v.push_back(escaped);
                    ++c.pos;
                    // canonical output escapes exactly " and backslash
                    if (escaped != '"' && escaped != '\\')
                        notes.quote_deviation = true;
                    continue;
                }
                v.push_back(ch);
                ++c.pos;
            }
            if (!closed)
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "unterminated quoted string", base + astart};
        } else {
            size_t vstart = c.pos;
            while (!c.done() && is_tchar(static_cast<unsigned char>(c.peek())))
                ++c.pos;
            v = Bytes(value.substr(vstart, c.pos - vstart));
            if (v.empty())
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "empty disposition parameter value",
                                    base + vstart};
        }

        Bytes attr_l = ascii_lower_copy(attr);
        if (Bytes(attr) != attr_l)
            notes.case_deviation = true;
        if (attr_l == "name") {
            if (saw_name)
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "duplicate name parameter", base + astart};
            if (v.empty())
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "empty part name", base + astart};
            if (has_ctl(v))
                return RejectReason{RejectCategory::ControlBytes,
                                    "control octets in part name", base + astart};
            if (!quoted)
                notes.quote_deviation = true; // canonical always quotes
            out.name = v;
            saw_name = true;
        } else if (attr_l == "filename") {
            if (out.filename)
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "duplicate filename parameter", base + astart};
            if (has_ctl(v))
                return RejectReason{RejectCategory::ControlBytes,
                                    "control octets in filename", base + astart};
            if (!quoted)
                notes.quote_deviation = true;
            out.filename = v;
        } else {
            return RejectReason{RejectCategory::MalformedPartHeader,
                                "unsupported disposition parameter " + attr_l,
                                base + astart};
        }
    }
    if (!saw_name)
        return RejectReason{RejectCategory::MalformedPartHeader,
                            "disposition without name parameter", base};
    return out;
}

// Reads one strict CRLF-terminated line starting at `pos`. A bare LF is a
// BareLineEnding reject; EOF before a terminator returns false.
Result<bool, RejectReason> next_strict_line(BytesView s, size_t pos,
                                            BytesView &line, size_t &next) {
    for (size_t i = pos; i < s.size(); ++i) {
        if (s[i] == '\n') {
            if (i == pos || s[i - 1] != '\r')
                return RejectReason{RejectCategory::BareLineEnding,
                                    "bare LF line ending", i};
            line = s.substr(pos, i - pos - 1);
            next = i + 1;
            return true;
        }
    }
    return false;
}

} // namespace

Result<MultipartStrictParse, RejectReason>
parse_multipart_strict(BytesView body, const MediaType &ct) {
    MultipartStrictParse out;
    MultipartParseNotes &notes = out.notes;

    // Boundary discipline comes first: RFC 2231 continuation on any
    // parameter is a deprecated feature and fails closed.
    if (ct.has_continuation())
        return RejectReason{RejectCategory::DeprecatedFeature,
                            "parameter value continuation in content-type", {}};
    const MediaTypeParam *bp = nullptr;
    for (const auto &p : ct.parameters) {
        if (p.name != "boundary")
            continue;
        if (bp)
            return RejectReason{RejectCategory::InvalidBoundary,
                                "duplicate boundary parameter", {}};
        bp = &p;
    }
    if (!bp)
        return RejectReason{RejectCategory::InvalidBoundary,
                            "missing boundary parameter", {}};
    if (!is_valid_boundary(bp->value))
        return RejectReason{RejectCategory::InvalidBoundary,
                            "boundary outside the bchars set or too long", {}};
    if (bp->quoted && is_token(bp->value))
        notes.quote_deviation = true;
    out.body.boundary = bp->value;

    const Bytes dash = "--" + bp->value;

    if (!BytesView(body).starts_with(dash)) {
        return RejectReason{RejectCategory::MalformedFraming,
                            "content before first boundary delimiter", 0};
    }
    size_t pos = dash.size();

    enum class Tail { Open, Close };
    // After `--boundary`, only transport padding then CRLF (next part) or
    // `--` (close) may follow.
    auto delimiter_tail = [&](size_t &p) -> Result<Tail, RejectReason> {
        size_t pad = 0;
        while (p < body.size() && is_ows(body[p])) {
            ++p;
            ++pad;
        }
        if (pad > 0)
            notes.whitespace_deviation = true;
        if (body.substr(p).starts_with("--")) {
            p += 2;
            return Tail::Close;
        }
        if (body.substr(p).starts_with("\r\n")) {
            p += 2;
            return Tail::Open;
        }
        if (p < body.size() && body[p] == '\n')
            return RejectReason{RejectCategory::BareLineEnding,
                                "bare LF after boundary delimiter", p};
        return RejectReason{RejectCategory::MalformedFraming,
                            "junk after boundary delimiter", p};
    };

    auto tail = delimiter_tail(pos);
    if (!tail)
        return tail.error();
    if (*tail == Tail::Close)
        return RejectReason{RejectCategory::MalformedFraming,
                            "multipart body without parts", pos};

    while (true) {
        Part part;
        bool saw_disposition = false;
        bool saw_content_type = false;

        // part headers
        while (true) {
            BytesView line;
            size_t next = 0;
            auto got = next_strict_line(body, pos, line, next);
            if (!got)
                return got.error();
            if (!*got)
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "truncated part headers", body.size()};
            if (line.empty()) {
                pos = next;
                break;
            }
            size_t colon = line.find(':');
            if (colon == BytesView::npos)
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "part header without colon", pos};
            BytesView hname = line.substr(0, colon);
            if (!is_token(hname))
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "malformed part header name", pos};
            size_t vstart = colon + 1;
            while (vstart < line.size() && is_ows(line[vstart]))
                ++vstart;
            if (line.substr(colon, vstart - colon) != ": ")
                notes.whitespace_deviation = true;
            BytesView value = line.substr(vstart);
            if (!value.empty() && is_ows(value.back())) {
                notes.whitespace_deviation = true;
                value = trim_ows(value);
            }

            if (ascii_ieq(hname, "content-disposition")) {
                if (saw_disposition)
                    return RejectReason{RejectCategory::MalformedPartHeader,
                                        "duplicate content-disposition", pos};
                if (hname != "Content-Disposition")
                    notes.case_deviation = true;
                auto d = parse_disposition_strict(value, pos + vstart, notes);
                if (!d)
                    return d.error();
                part.name = d->name;
                part.filename = d->filename;
                saw_disposition = true;
            } else if (ascii_ieq(hname, "content-type")) {
                if (saw_content_type)
                    return RejectReason{RejectCategory::MalformedPartHeader,
                                        "duplicate part content-type", pos};
                if (hname != "Content-Type")
                    notes.case_deviation = true;
                auto mt = parse_media_type(value);
                if (!mt)
                    return RejectReason{RejectCategory::MalformedPartHeader,
                                        "unparseable part content-type: " +
                                            mt.error().message,
                                        pos + vstart + mt.error().offset};
                // charset and friends are preserved verbatim, but only when
                // they are valid tokens
                for (const auto &p : mt->parameters) {
                    if (!is_token(p.value))
                        return RejectReason{RejectCategory::MalformedPartHeader,
                                            "part content-type parameter is "
                                            "not a token",
                                            pos + vstart};
                    if (p.quoted)
                        notes.quote_deviation = true;
                }
                Bytes canon = media_type_canonical(*mt);
                if (Bytes(value) != canon) {
                    if (ascii_ieq(value, canon))
                        notes.case_deviation = true;
                    else
                        notes.whitespace_deviation = true;
                }
                part.content_type = std::move(*mt);
                saw_content_type = true;
            } else if (ascii_ieq(hname, "content-transfer-encoding")) {
                return RejectReason{RejectCategory::DeprecatedFeature,
                                    "content-transfer-encoding part header",
                                    pos};
            } else {
                // The canonical structure has no slot for other part headers;
                // fail closed rather than silently drop them.
                return RejectReason{RejectCategory::MalformedPartHeader,
                                    "unsupported part header " +
                                        ascii_lower_copy(hname),
                                    pos};
            }
            pos = next;
        }

        if (!saw_disposition)
            return RejectReason{RejectCategory::MalformedPartHeader,
                                "part without content-disposition", pos};

        // part body runs to the next CRLF + dash-boundary
        size_t found = body.find(Bytes("\r\n") + dash, pos);
        if (found == BytesView::npos) {
            if (body.find(Bytes("\n") + dash, pos) != BytesView::npos)
                return RejectReason{RejectCategory::BareLineEnding,
                                    "bare LF before boundary delimiter",
                                    body.find(Bytes("\n") + dash, pos)};
            return RejectReason{RejectCategory::MissingFinalDelimiter,
                                "final boundary delimiter not found",
                                body.size()};
        }
        part.body = Bytes(body.substr(pos, found - pos));
        out.body.parts.push_back(std::move(part));
        pos = found + 2 + dash.size();

        auto t = delimiter_tail(pos);
        if (!t)
            return t.error();
        if (*t == Tail::Close)
            break;
    }

    // Whitespace-only epilogues (e.g. a trailing line ending) are dropped;
    // anything else after the close delimiter is rejected.
    BytesView epilogue = body.substr(pos);
    if (!epilogue.empty()) {
        bool ws_only = std::all_of(epilogue.begin(), epilogue.end(), [](char c) {
            return c == '\r' || c == '\n' || is_ows(c);
        });
        if (!ws_only)
            return RejectReason{RejectCategory::MalformedFraming,
                                "content after close delimiter", pos};
        notes.epilogue_dropped = epilogue.size();
    }
    return out;
}

namespace {

Bytes quote_value(BytesView v) {
    Bytes out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

Bytes serialize_multipart_canonical(const MultipartBody &mp) {
    Bytes out;
    for (const auto &part : mp.parts) {
        out += "--" + mp.boundary + "\r\n";
        out += "Content-Disposition: form-data; name=" + quote_value(part.name);
        if (part.filename)
            out += "; filename=" + quote_value(*part.filename);
        out += "\r\n";
        if (part.content_type)
            out += "Content-Type: " + media_type_canonical(*part.content_type) +
                   "\r\n";
        else if (part.filename)
            out += "Content-Type: text/plain\r\n";
        out += "\r\n";
        out += part.body;
        out += "\r\n";
    }
    out += "--" + mp.boundary + "--";
    return out;
}

// ---------------------------------------------------------------------------
// Lenient parsing

namespace {

// Splits a header parameter list on ';' (and ':', which permissive framework
// parsers treat the same way) outside quotes.
std::vector<Bytes> split_params_lenient(BytesView value) {
    std::vector<Bytes> segments;
    Bytes cur;
    bool in_quote = false;
    for (size_t i = 0; i < value.size(); ++i) {
        char c = value[i];
        if (c == '"')
            in_quote = !in_quote;
        if (!in_quote && (c == ';' || c == ':')) {
            segments.push_back(cur);
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    segments.push_back(cur);
    return segments;
}

Bytes unquote_lenient(BytesView v) {
    v = trim_ows(v);
    if (!v.empty() && v.front() == '"') {
        size_t close = v.find('"', 1);
        if (close != BytesView::npos)
            return Bytes(v.substr(1, close - 1));
        return Bytes(v.substr(1));
    }
    return Bytes(v);
}

struct LenientLineScanner {
    BytesView s;
    size_t pos;
    const LeniencyProfile &p;

    bool is_sep_char(unsigned char c) const {
        return std::find(p.header_separator_chars.begin(),
                         p.header_separator_chars.end(),
                         c) != p.header_separator_chars.end();
    }

    // Returns false at EOF. `line` excludes the terminator.
    bool next(BytesView &line) {
        if (pos >= s.size())
            return false;
        size_t i = pos;
        while (i < s.size()) {
            char c = s[i];
            if (c == '\n') {
                bool crlf = i > pos && s[i - 1] == '\r';
                if (crlf || p.tolerate_bare_lf) {
                    line = s.substr(pos, i - pos - (crlf ? 1 : 0));
                    pos = i + 1;
                    return true;
                }
            }
            if (is_sep_char(static_cast<unsigned char>(c))) {
                line = s.substr(pos, i - pos);
                pos = i + 1;
                return true;
            }
            ++i;
        }
        line = s.substr(pos);
        pos = s.size();
        return true;
    }
};

} // namespace

Result<MultipartBody, LenientError>
parse_multipart_lenient(BytesView body, const MediaType &ct,
                        const LeniencyProfile &profile) {
    // The all-default profile accepts exactly the strict parser's language.
    if (profile.is_strictest()) {
        auto strict = parse_multipart_strict(body, ct);
        if (!strict)
            return LenientError{Bytes(to_string(strict.error().category)) +
                                ": " + strict.error().detail};
        return std::move(strict->body);
    }

    std::vector<Bytes> plains;
    std::map<int, Bytes> segments;
    for (const auto &p : ct.parameters) {
        if (p.name != "boundary")
            continue;
        if (p.continuation_index)
            segments[*p.continuation_index] = p.value;
        else
            plains.push_back(p.value);
    }
    Bytes joined;
    if (profile.join_continuation_params)
        for (const auto &[idx, seg] : segments)
            joined += seg;

    Bytes boundary;
    switch (profile.boundary_pick) {
    case LeniencyProfile::BoundaryPick::First:
        boundary = !plains.empty() ? plains.front() : joined;
        break;
    case LeniencyProfile::BoundaryPick::Last:
        boundary = !plains.empty() ? plains.back() : joined;
        break;
    case LeniencyProfile::BoundaryPick::Joined:
        boundary = !joined.empty() ? joined : (!plains.empty() ? plains.front() : Bytes());
        break;
    }
    // Values recovered from merged header lines stop at the first line break.
    size_t cut = boundary.find_first_of("\r\n");
    if (cut != Bytes::npos)
        boundary.resize(cut);
    if (boundary.empty())
        return LenientError{"no usable boundary"};

    const Bytes dash = "--" + boundary;

    auto at_line_start = [&](size_t off) {
        if (off == 0)
            return true;
        if (body[off - 1] != '\n')
            return false;
        if (off >= 2 && body[off - 2] == '\r')
            return true;
        return profile.tolerate_bare_lf;
    };

    size_t pos = BytesView::npos;
    for (size_t off = body.find(dash); off != BytesView::npos;
         off = body.find(dash, off + 1)) {
        if (at_line_start(off)) {
            pos = off;
            break;
        }
    }
    if (pos == BytesView::npos)
        return LenientError{"first boundary delimiter not found"};
    pos += dash.size();

    MultipartBody out;
    out.boundary = boundary;

    auto consume_delimiter_tail = [&](size_t &p) -> int {
        // 1 = close, 0 = open, -1 = truncated
        if (body.substr(p).starts_with("--"))
            return 1;
        size_t nl = body.find('\n', p);
        if (nl == BytesView::npos)
            return -1;
        p = nl + 1;
        return 0;
    };

    int tail = consume_delimiter_tail(pos);
    if (tail != 0)
        return LenientError{"no part after first delimiter"};

    while (true) {
        // header block
        LenientLineScanner scanner{body, pos, profile};
        std::vector<Bytes> header_lines;
        bool saw_blank = false;
        BytesView line;
        size_t header_region_end = pos;
        while (scanner.next(line)) {
            if (line.empty()) {
                saw_blank = true;
                header_region_end = scanner.pos;
                break;
            }
            header_lines.push_back(Bytes(line));
            header_region_end = scanner.pos;
        }
        if (!saw_blank)
            return LenientError{"part headers never end"};

        // Colon-less fragments rejoin the previous line: separator octets and
        // planted control bytes split lines that permissive parsers still
        // read as one header.
        {
            std::vector<Bytes> folded;
            for (auto &hl : header_lines) {
                if (!folded.empty() && hl.find(':') == Bytes::npos)
                    folded.back() += hl;
                else
                    folded.push_back(std::move(hl));
            }
            header_lines = std::move(folded);
        }

        if (!profile.tolerate_control_in_headers) {
            BytesView region = body.substr(pos, header_region_end - pos);
            for (unsigned char c : region) {
                if (c == '\r' || c == '\n' || c == '\t')
                    continue;
                if (scanner.is_sep_char(c))
                    continue;
                if (is_ctl(c))
                    return LenientError{"control octets in part headers"};
            }
        }
        pos = header_region_end;

        Part part;
        bool have_name = false;
        for (const auto &hl : header_lines) {
            size_t colon = hl.find(':');
            if (colon == Bytes::npos)
                continue;
            Bytes hname = Bytes(trim_ows(BytesView(hl).substr(0, colon)));
            BytesView hvalue = BytesView(hl).substr(colon + 1);
            if (ascii_ieq(hname, "content-disposition")) {
                auto segs = split_params_lenient(hvalue);
                for (size_t i = 1; i < segs.size(); ++i) {
                    BytesView seg = trim_ows(segs[i]);
                    size_t eq = seg.find('=');
                    if (eq == BytesView::npos)
                        continue;
                    Bytes key = ascii_lower_copy(trim_ows(seg.substr(0, eq)));
                    Bytes val = unquote_lenient(seg.substr(eq + 1));
                    if (key == "name" && !have_name) {
                        part.name = val;
                        have_name = true;
                    } else if (key == "filename" && !part.filename) {
                        part.filename = val;
                    }
                }
            } else if (ascii_ieq(hname, "content-type")) {
                auto mt = parse_media_type(trim_ows(hvalue));
                if (mt)
                    part.content_type = std::move(*mt);
            }
        }

        // part body
        size_t found = BytesView::npos;
        for (size_t off = body.find(dash, pos); off != BytesView::npos;
             off = body.find(dash, off + 1)) {
            if (at_line_start(off)) {
                found = off;
                break;
            }
        }
        size_t body_end;
        bool at_end = false;
        if (found == BytesView::npos) {
            if (!profile.tolerate_missing_final_delimiter)
                return LenientError{"final boundary delimiter not found"};
            body_end = body.size();
            at_end = true;
        } else {
            body_end = found;
            // strip the line ending that belongs to the delimiter
            if (body_end >= 2 && body.substr(body_end - 2, 2) == "\r\n")
                body_end -= 2;
            else if (body_end >= 1 && body[body_end - 1] == '\n')
                body_end -= 1;
        }
        part.body = Bytes(body.substr(pos, body_end - pos));
        if (have_name && !part.name.empty())
            out.parts.push_back(std::move(part));

        if (at_end)
            break;
        pos = found + dash.size();
        int t = consume_delimiter_tail(pos);
        if (t != 0)
            break; // close delimiter or truncation; epilogue is ignored
    }

    if (out.parts.empty())
        return LenientError{"no complete part recovered"};
    return out;
}

} // namespace wafdiff
