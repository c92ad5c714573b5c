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

#include "wafdiff/mutation.hpp"

#include <algorithm>

#include "wafdiff/json_codec.hpp"
#include "wafdiff/multipart.hpp"

namespace wafdiff {

namespace {

struct ClassInfo {
    MutationClass cls;
    const char *name;
    SeedContentType content_type;
    bool continuation;
    SiteKind site_kind;
    bool needs_part_ct;
    bool needs_doctype;
    bool needs_benign;
};

constexpr ClassInfo kClassTable[kMutationClassCount] = {
    {MutationClass::BoundaryDelimiterManipulation, "boundary_delimiter_manipulation",
     SeedContentType::Multipart, false, SiteKind::BodyFraming, false, false, false},
    {MutationClass::ContentDispositionDisruption, "content_disposition_disruption",
     SeedContentType::Multipart, false, SiteKind::PartHeader, false, false, false},
    {MutationClass::DistortedHeaderInjectionToBody, "distorted_header_injection_to_body",
     SeedContentType::Multipart, false, SiteKind::PartHeader, false, false, false},
    {MutationClass::ContentTypeTweakInBody, "content_type_tweak_in_body",
     SeedContentType::Multipart, false, SiteKind::PartHeader, true, false, false},
    {MutationClass::CharsetValueAlterationInBody, "charset_value_alteration_in_body",
     SeedContentType::Multipart, false, SiteKind::PartHeader, true, false, false},
    {MutationClass::HeaderSeparatorManipulationInBody, "header_separator_manipulation_in_body",
     SeedContentType::Multipart, false, SiteKind::PartHeader, false, false, false},
    {MutationClass::ContentTypeParameterTweak, "content_type_parameter_tweak",
     SeedContentType::Multipart, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::BoundaryDelimiterRemoval, "boundary_delimiter_removal",
     SeedContentType::Multipart, false, SiteKind::BodyFraming, false, false, false},
    {MutationClass::LinefeedRemoval, "linefeed_removal",
     SeedContentType::Multipart, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::WhitespaceAlteration, "whitespace_alteration",
     SeedContentType::Multipart, true, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::DisruptedBodyField, "disrupted_body_field",
     SeedContentType::Multipart, true, SiteKind::PartHeader, false, false, false},
    {MutationClass::BoundaryHeaderTampering, "boundary_header_tampering",
     SeedContentType::Multipart, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::ExtraFieldAddition, "extra_field_addition",
     SeedContentType::Xml, false, SiteKind::BodyField, false, false, false},
    {MutationClass::DoctypeClosureConfusion, "doctype_closure_confusion",
     SeedContentType::Xml, false, SiteKind::BodyField, false, true, false},
    {MutationClass::SchemaClosureManipulation, "schema_closure_manipulation",
     SeedContentType::Xml, false, SiteKind::BodyField, false, false, false},
    {MutationClass::NewlineAbuse, "newline_abuse",
     SeedContentType::Xml, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::ContentTypeHeaderParameterRemoval, "content_type_header_parameter_removal",
     SeedContentType::Xml, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::ContentTypeHeaderReplacement, "content_type_header_replacement",
     SeedContentType::Xml, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::MisplacedField, "misplaced_field",
     SeedContentType::Xml, false, SiteKind::BodyField, false, false, true},
    {MutationClass::ContentTypeRemoval, "content_type_removal",
     SeedContentType::Json, false, SiteKind::GlobalHeader, false, false, false},
    {MutationClass::FieldWrapperManipulation, "field_wrapper_manipulation",
     SeedContentType::Json, false, SiteKind::BodyField, false, false, false},
    {MutationClass::DoubleQuoteReplacement, "double_quote_replacement",
     SeedContentType::Json, false, SiteKind::BodyField, false, false, false},
    {MutationClass::FieldNameHack, "field_name_hack",
     SeedContentType::Json, false, SiteKind::BodyField, false, false, false},
    {MutationClass::ContentTypeParameterManipulation, "content_type_parameter_manipulation",
     SeedContentType::Json, false, SiteKind::GlobalHeader, false, false, false},
};

const ClassInfo &info(MutationClass c) {
    for (const auto &ci : kClassTable)
        if (ci.cls == c)
            return ci;
    return kClassTable[0];
}

} // namespace

const char *class_name(MutationClass c) { return info(c).name; }

std::optional<MutationClass> class_from_name(BytesView name) {
    for (const auto &ci : kClassTable)
        if (name == ci.name)
            return ci.cls;
    return std::nullopt;
}

std::vector<MutationClass> all_mutation_classes() {
    std::vector<MutationClass> out;
    for (const auto &ci : kClassTable)
        out.push_back(ci.cls);
    return out;
}

namespace {

std::vector<MutationClass> classes_of(SeedContentType t) {
    std::vector<MutationClass> out;
    for (const auto &ci : kClassTable)
        if (ci.content_type == t)
            out.push_back(ci.cls);
    return out;
}

} // namespace

std::vector<MutationClass> multipart_mutation_classes() {
    return classes_of(SeedContentType::Multipart);
}
std::vector<MutationClass> json_mutation_classes() {
    return classes_of(SeedContentType::Json);
}
std::vector<MutationClass> xml_mutation_classes() {
    return classes_of(SeedContentType::Xml);
}

SeedContentType class_content_type(MutationClass c) {
    return info(c).content_type;
}
bool class_requires_continuation(MutationClass c) { return info(c).continuation; }
SiteKind class_site_kind(MutationClass c) { return info(c).site_kind; }

const char *to_string(SiteKind k) {
    switch (k) {
    case SiteKind::GlobalHeader: return "global-header";
    case SiteKind::BodyFraming: return "body-framing";
    case SiteKind::PartHeader: return "part-header";
    case SiteKind::BodyField: return "body-field";
    }
    return "unknown";
}

Bytes default_payload_for(SeedContentType t) {
    // Markup payloads survive in XML only through CDATA; the SQL payload
    // keeps XML seeds plain and exercises the second signature family.
    return t == SeedContentType::Xml ? Bytes(kSqliPayload) : Bytes(kXssPayload);
}

// ---------------------------------------------------------------------------
// Seed generation

namespace {

constexpr const char kSeedHost[] = "target.test";
constexpr const char kSeedBoundary[] = "1234";

RawRequest make_request(BytesView content_type, Bytes body) {
    RawRequest req;
    req.method = "POST";
    req.target = "/";
    HeaderField host{"Host", ": ", kSeedHost, LineEnding::Crlf};
    req.headers.push_back(host);
    HeaderField cl{"Content-Length", ": ", std::to_string(body.size()),
                   LineEnding::Crlf};
    req.headers.push_back(cl);
    if (!content_type.empty()) {
        HeaderField ct{"Content-Type", ": ", Bytes(content_type),
                       LineEnding::Crlf};
        req.headers.push_back(ct);
    }
    req.body = std::move(body);
    return req;
}

Bytes xml_text(BytesView payload) {
    bool needs_cdata = payload.find_first_of("<>&") != BytesView::npos;
    if (!needs_cdata)
        return Bytes(payload);
    return "<![CDATA[" + Bytes(payload) + "]]>";
}

struct SeedBuild {
    SeedSpec spec;
    bool part_content_type = false;
    bool doctype = false;
};

RawRequest make_seed(const SeedBuild &b) {
    const SeedSpec &s = b.spec;
    switch (s.content_type) {
    case SeedContentType::Multipart: {
        Bytes body;
        body += "--" + Bytes(kSeedBoundary) + "\r\n";
        body += "Content-Disposition: form-data; name=\"" + s.field_name +
                "\"\r\n";
        if (b.part_content_type)
            body += "Content-Type: text/plain; charset=UTF-8\r\n";
        body += "\r\n";
        body += s.payload + "\r\n";
        for (int i = 0; i < s.extra_benign_fields; ++i) {
            body += "--" + Bytes(kSeedBoundary) + "\r\n";
            body += "Content-Disposition: form-data; name=\"field" +
                    std::to_string(i + 2) + "\"\r\n\r\n";
            body += "value" + std::to_string(i + 1) + "\r\n";
        }
        body += "--" + Bytes(kSeedBoundary) + "--";
        return make_request(
            "multipart/form-data; boundary=" + Bytes(kSeedBoundary), body);
    }
    case SeedContentType::Json: {
        JsonValue obj = JsonValue::object();
        obj.add(s.field_name, JsonValue::string(s.payload));
        for (int i = 0; i < s.extra_benign_fields; ++i)
            obj.add("field" + std::to_string(i + 2),
                    JsonValue::string("value" + std::to_string(i + 1)));
        return make_request("application/json", serialize_json_canonical(obj));
    }
    case SeedContentType::Xml: {
        Bytes body;
        if (b.doctype)
            body += "<!DOCTYPE root [...]>";
        body += "<root><" + s.field_name + ">" + xml_text(s.payload) + "</" +
                s.field_name + ">";
        for (int i = 0; i < s.extra_benign_fields; ++i)
            body += "<field" + std::to_string(i + 2) + ">value" +
                    std::to_string(i + 1) + "</field" + std::to_string(i + 2) +
                    ">";
        body += "</root>";
        return make_request("application/xml", body);
    }
    }
    return {};
}

} // namespace

RawRequest generate_seed(const SeedSpec &s) { return make_seed({s, false, false}); }

RawRequest rewrite_to_continuation(const RawRequest &req,
                                   BytesView real_boundary,
                                   BytesView fake_boundary,
                                   std::optional<size_t> split) {
    // Carry the original payload part's content and name into the real
    // section; the fake section stays benign.
    Bytes payload = req.body;
    Bytes field_name = "field1";
    auto ct = req.header_value("Content-Type");
    if (ct) {
        auto mt = parse_media_type(*ct);
        if (mt) {
            auto parsed = parse_multipart_strict(req.body, *mt);
            if (parsed && !parsed->body.parts.empty()) {
                payload = parsed->body.parts.front().body;
                field_name = parsed->body.parts.front().name;
            }
        }
    }

    size_t cut = split.value_or(0);
    if (cut == 0 || cut >= real_boundary.size()) {
        size_t dashpos = real_boundary.find('-');
        cut = dashpos != BytesView::npos && dashpos + 1 < real_boundary.size()
                  ? dashpos + 1
                  : real_boundary.size() / 2;
    }
    Bytes seg0 = Bytes(real_boundary.substr(0, cut));
    Bytes seg1 = Bytes(real_boundary.substr(cut));

    Bytes real = Bytes(real_boundary);
    Bytes fake = Bytes(fake_boundary);
    Bytes body;
    body += "--" + fake + "\r\n";
    body += "Content-Disposition: form-data; name=\"" + field_name + "\"\r\n\r\n";
    body += "value1\r\n";
    body += "--" + fake + "--\r\n";
    body += "--" + real + "\r\n";
    body += "Content-Disposition: form-data; name=\"id\"\r\n\r\n";
    body += payload + "\r\n";
    body += "--" + real + "--";

    RawRequest out = req;
    HeaderField *cth = out.find_header("Content-Type");
    Bytes ct_value = "multipart/form-data; boundary=" + fake + ";boundary*0=" +
                     seg0 + ";boundary*1=" + seg1;
    if (cth) {
        cth->value = ct_value;
    } else {
        out.headers.push_back(HeaderField{"Content-Type", ": ", ct_value,
                                          LineEnding::Crlf});
    }
    out.body = std::move(body);
    if (HeaderField *clh = out.find_header("Content-Length"))
        clh->value = std::to_string(out.body.size());
    return out;
}

RawRequest prepare_seed(const SeedSpec &s, MutationClass c) {
    const ClassInfo &ci = info(c);
    SeedBuild build;
    build.spec = s;
    build.spec.content_type = ci.content_type;
    if (ci.needs_benign && build.spec.extra_benign_fields == 0)
        build.spec.extra_benign_fields = 1;
    build.part_content_type = ci.needs_part_ct;
    build.doctype = ci.needs_doctype;
    RawRequest req = make_seed(build);
    if (ci.continuation)
        req = rewrite_to_continuation(req, "real-boundary", "fake-boundary");
    return req;
}

// ---------------------------------------------------------------------------
// Site enumeration and application

namespace {

using SiteEdit = std::vector<Splice>;

struct HeaderSpan {
    size_t line_start = 0;
    size_t name_len = 0;
    size_t sep_len = 0;
    size_t value_len = 0;
    size_t term_len = 2;

    size_t value_start() const { return line_start + name_len + sep_len; }
    size_t line_end() const { return value_start() + value_len; }
    size_t next_start() const { return line_end() + term_len; }
};

struct Layout {
    std::vector<HeaderSpan> headers;
    size_t blank_start = 0;
    size_t body_start = 0;
};

Layout compute_layout(const RawRequest &req) {
    Layout l;
    size_t off = req.method.size() + 1 + req.target.size() + 1 + 8 +
                 line_ending_bytes(req.request_line_ending).size();
    for (const auto &h : req.headers) {
        HeaderSpan span;
        span.line_start = off;
        span.name_len = h.name.size();
        span.sep_len = h.sep.size();
        span.value_len = h.value.size();
        span.term_len = line_ending_bytes(h.ending).size();
        off = span.next_start();
        l.headers.push_back(span);
    }
    l.blank_start = off;
    l.body_start = off + line_ending_bytes(req.blank_line_ending).size();
    return l;
}

int find_header_index(const RawRequest &req, BytesView name) {
    for (size_t i = 0; i < req.headers.size(); ++i)
        if (ascii_ieq(req.headers[i].name, name))
            return static_cast<int>(i);
    return -1;
}

std::optional<Bytes> strict_boundary_of(const RawRequest &req) {
    auto ct = req.header_value("Content-Type");
    if (!ct)
        return std::nullopt;
    auto mt = parse_media_type(*ct);
    if (!mt)
        return std::nullopt;
    const MediaTypeParam *b = mt->first_param("boundary");
    if (!b)
        return std::nullopt;
    return b->value;
}

// Offsets of `--boundary` occurrences that start a line within the body.
std::vector<size_t> delimiter_offsets(BytesView octets, size_t body_start,
                                      const Bytes &dash) {
    std::vector<size_t> out;
    for (size_t off = octets.find(dash, body_start); off != BytesView::npos;
         off = octets.find(dash, off + 1)) {
        if (off == body_start || (off >= 1 && octets[off - 1] == '\n'))
            out.push_back(off);
    }
    return out;
}

// Offsets of case-insensitive needle occurrences within the body.
std::vector<size_t> body_ifind_all(BytesView octets, size_t body_start,
                                   BytesView needle) {
    std::vector<size_t> out;
    for (size_t off = ifind(octets, needle, body_start);
         off != BytesView::npos; off = ifind(octets, needle, off + 1))
        out.push_back(off);
    return out;
}

size_t line_end_from(BytesView octets, size_t pos) {
    size_t nl = octets.find('\n', pos);
    if (nl == BytesView::npos)
        return octets.size();
    if (nl > 0 && octets[nl - 1] == '\r')
        return nl - 1;
    return nl;
}

// Member name spans of a flat JSON object: (quote_open, quote_close, colon).
struct JsonMemberSpan {
    size_t name_open = 0;
    size_t name_close = 0;
    size_t colon = 0;
};

std::vector<JsonMemberSpan> scan_json_members(BytesView body, size_t base) {
    std::vector<JsonMemberSpan> out;
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t' ||
                                     body[pos] == '\n' || body[pos] == '\r'))
            ++pos;
    };
    auto scan_string = [&](size_t &open, size_t &close) -> bool {
        if (pos >= body.size() || body[pos] != '"')
            return false;
        open = pos++;
        while (pos < body.size()) {
            if (body[pos] == '\\') {
                pos += 2;
                continue;
            }
            if (body[pos] == '"') {
                close = pos++;
                return true;
            }
            ++pos;
        }
        return false;
    };
    skip_ws();
    if (pos >= body.size() || body[pos] != '{')
        return out;
    ++pos;
    while (true) {
        skip_ws();
        JsonMemberSpan span;
        if (!scan_string(span.name_open, span.name_close))
            return out;
        skip_ws();
        if (pos >= body.size() || body[pos] != ':')
            return out;
        span.colon = pos++;
        skip_ws();
        // value: string or scalar run
        if (pos < body.size() && body[pos] == '"') {
            size_t o, c;
            if (!scan_string(o, c))
                return out;
        } else {
            while (pos < body.size() && body[pos] != ',' && body[pos] != '}')
                ++pos;
        }
        span.name_open += base;
        span.name_close += base;
        span.colon += base;
        out.push_back(span);
        skip_ws();
        if (pos >= body.size())
            return out;
        if (body[pos] == ',') {
            ++pos;
            continue;
        }
        return out;
    }
}

std::vector<SiteEdit> enumerate_sites(const RawRequest &req, const Bytes &octets,
                                      MutationClass cls,
                                      const Bytes &byte_choice) {
    std::vector<SiteEdit> sites;
    Layout layout = compute_layout(req);
    const size_t body_start = layout.body_start;
    const BytesView view(octets);

    auto slice = [&](size_t off, size_t len) {
        return Bytes(view.substr(off, len));
    };

    switch (cls) {
    case MutationClass::BoundaryDelimiterManipulation: {
        auto b = strict_boundary_of(req);
        if (!b)
            break;
        Bytes dash = "--" + *b;
        Bytes needle = "\r\n" + dash;
        for (size_t off = view.find(needle, body_start); off != BytesView::npos;
             off = view.find(needle, off + 1))
            sites.push_back({Splice{off, "\r\n", ""}});
        if (!byte_choice.empty()) {
            // consistent alteration of the boundary token in the header and
            // every body delimiter
            int ct = find_header_index(req, "Content-Type");
            if (ct >= 0) {
                const HeaderSpan &span = layout.headers[ct];
                size_t vpos = view.find("boundary=", span.value_start());
                if (vpos != BytesView::npos && vpos < span.line_end()) {
                    size_t insert_at = vpos + 9;
                    if (insert_at < view.size() && view[insert_at] == '"')
                        ++insert_at;
                    SiteEdit edit;
                    edit.push_back(Splice{insert_at, "", byte_choice});
                    for (size_t off : delimiter_offsets(view, body_start, dash))
                        edit.push_back(Splice{off + 2, "", byte_choice});
                    sites.push_back(std::move(edit));
                }
            }
        }
        break;
    }
    case MutationClass::ContentDispositionDisruption: {
        if (byte_choice.empty())
            break;
        for (size_t off : body_ifind_all(view, body_start, "content-disposition")) {
            size_t eol = line_end_from(view, off);
            size_t fd = ifind(view.substr(0, eol), "form-data", off);
            if (fd == BytesView::npos)
                continue;
            sites.push_back({Splice{fd + 7, slice(fd + 7, 1), byte_choice}});
        }
        break;
    }
    case MutationClass::DistortedHeaderInjectionToBody: {
        if (byte_choice.empty())
            break;
        for (size_t off : body_ifind_all(view, body_start, "content-disposition")) {
            size_t eol = line_end_from(view, off);
            if (eol + 2 > view.size())
                continue;
            Bytes header_line =
                "conten" + byte_choice + "-extra: something\r\n";
            sites.push_back({Splice{eol + 2, "", header_line}});
        }
        break;
    }
    case MutationClass::ContentTypeTweakInBody: {
        if (byte_choice.empty())
            break;
        for (size_t off : body_ifind_all(view, body_start, "content-type")) {
            size_t eol = line_end_from(view, off);
            size_t colon = view.find(':', off);
            if (colon == BytesView::npos || colon >= eol)
                continue;
            size_t p = colon + 1;
            while (p < eol && is_ows(view[p]))
                ++p;
            bool seen_slash = false;
            while (p < eol &&
                   (is_tchar(static_cast<unsigned char>(view[p])) ||
                    (!seen_slash && view[p] == '/'))) {
                if (view[p] == '/')
                    seen_slash = true;
                ++p;
            }
            sites.push_back({Splice{p, "", byte_choice}});
        }
        break;
    }
    case MutationClass::CharsetValueAlterationInBody: {
        // an empty byte choice is the case-toggle flavour: it alters the
        // charset value without making it unparseable
        for (size_t off : body_ifind_all(view, body_start, "charset=")) {
            size_t v = off + 8;
            if (byte_choice.empty()) {
                if (v < view.size() && is_alpha(view[v])) {
                    char c = view[v];
                    char toggled = (c >= 'a' && c <= 'z')
                                       ? static_cast<char>(c - 'a' + 'A')
                                       : static_cast<char>(c - 'A' + 'a');
                    sites.push_back({Splice{v, slice(v, 1), Bytes(1, toggled)}});
                }
            } else {
                sites.push_back({Splice{v, "", byte_choice}});
            }
        }
        break;
    }
    case MutationClass::HeaderSeparatorManipulationInBody: {
        if (byte_choice.empty())
            break;
        auto b = strict_boundary_of(req);
        Bytes dash = b ? "--" + *b : Bytes();
        if (dash.empty())
            break;
        for (size_t doff : delimiter_offsets(view, body_start, dash)) {
            size_t line_term = view.find("\r\n", doff);
            if (line_term == BytesView::npos)
                continue;
            if (view.substr(doff + dash.size()).starts_with("--"))
                continue; // close delimiter has no part headers
            size_t pos = line_term + 2;
            // CRLFs terminating the part's header lines, blank line included
            while (pos < view.size()) {
                size_t term = view.find("\r\n", pos);
                if (term == BytesView::npos)
                    break;
                sites.push_back({Splice{term, "\r\n", byte_choice}});
                bool was_blank = term == pos;
                pos = term + 2;
                if (was_blank)
                    break;
            }
        }
        break;
    }
    case MutationClass::ContentTypeParameterTweak: {
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        for (size_t i = 0; i < span.name_len; ++i) {
            if (byte_choice.empty())
                sites.push_back(
                    {Splice{span.line_start + i, slice(span.line_start + i, 1), ""}});
            else
                sites.push_back({Splice{span.line_start + i, "", byte_choice}});
        }
        break;
    }
    case MutationClass::BoundaryDelimiterRemoval: {
        auto b = strict_boundary_of(req);
        if (!b)
            break;
        Bytes dash = "--" + *b;
        for (size_t off : delimiter_offsets(view, body_start, dash)) {
            size_t start = off;
            Bytes removed;
            if (off >= 2 && view.substr(off - 2, 2) == "\r\n")
                start = off - 2;
            size_t end = view.find("\r\n", off);
            if (end == BytesView::npos)
                end = view.size();
            else if (start == off)
                end += 2; // first delimiter: take its line ending instead
            removed = slice(start, end - start);
            sites.push_back({Splice{start, removed, ""}});
        }
        break;
    }
    case MutationClass::LinefeedRemoval: {
        for (const auto &span : layout.headers) {
            size_t lf = span.line_end() + span.term_len - 1;
            sites.push_back({Splice{lf, "\n", ""}});
        }
        sites.push_back({Splice{body_start - 1, "\n", ""}});
        break;
    }
    case MutationClass::WhitespaceAlteration: {
        if (byte_choice.empty())
            break;
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        if (span.sep_len >= 2)
            sites.push_back({Splice{span.line_start + span.name_len + 1,
                                    slice(span.line_start + span.name_len + 1, 1),
                                    byte_choice}});
        else
            sites.push_back(
                {Splice{span.line_start + span.name_len + 1, "", byte_choice}});
        break;
    }
    case MutationClass::DisruptedBodyField: {
        if (byte_choice.empty())
            break;
        for (size_t off : body_ifind_all(view, body_start, "name=\"")) {
            size_t close = view.find('"', off + 6);
            if (close == BytesView::npos)
                continue;
            sites.push_back({Splice{close, "", byte_choice}});
        }
        break;
    }
    case MutationClass::BoundaryHeaderTampering: {
        if (byte_choice.empty())
            break;
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        size_t vpos = view.find("boundary=", span.value_start());
        if (vpos == BytesView::npos || vpos >= span.line_end())
            break;
        size_t p = vpos + 9;
        while (p < span.line_end() && view[p] != ';' && !is_ows(view[p]))
            ++p;
        sites.push_back({Splice{p, "", byte_choice}});
        break;
    }
    case MutationClass::ContentTypeRemoval: {
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        sites.push_back({Splice{span.line_start,
                                slice(span.line_start,
                                      span.next_start() - span.line_start),
                                ""}});
        break;
    }
    case MutationClass::FieldWrapperManipulation: {
        if (byte_choice.empty())
            break;
        for (const auto &m : scan_json_members(view.substr(body_start), body_start))
            sites.push_back({Splice{m.colon, "", byte_choice}});
        break;
    }
    case MutationClass::DoubleQuoteReplacement: {
        if (byte_choice.empty())
            break;
        for (const auto &m : scan_json_members(view.substr(body_start), body_start))
            sites.push_back(
                {Splice{m.name_close, slice(m.name_close, 1), byte_choice}});
        break;
    }
    case MutationClass::FieldNameHack: {
        if (byte_choice.empty())
            break;
        for (const auto &m : scan_json_members(view.substr(body_start), body_start)) {
            if (m.name_close - m.name_open < 3)
                continue; // name needs at least two characters
            sites.push_back(
                {Splice{m.name_open + 2, slice(m.name_open + 2, 1), byte_choice}});
        }
        break;
    }
    case MutationClass::ContentTypeParameterManipulation: {
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        size_t hyphen = span.line_start + 7;
        if (view[hyphen] != '-')
            break;
        sites.push_back({Splice{hyphen, "-", byte_choice}});
        break;
    }
    case MutationClass::ExtraFieldAddition: {
        for (size_t off = view.find("</", body_start); off != BytesView::npos;
             off = view.find("</", off + 1)) {
            size_t gt = view.find('>', off);
            if (gt == BytesView::npos)
                break;
            sites.push_back({Splice{gt + 1, "",
                                    "<field2 attr=\"history\">hi</field2>"}});
        }
        break;
    }
    case MutationClass::DoctypeClosureConfusion: {
        if (view.find("<!DOCTYPE", body_start) == BytesView::npos)
            break;
        for (size_t off = view.find("</", body_start); off != BytesView::npos;
             off = view.find("</", off + 1))
            sites.push_back({Splice{off, "", "]"}});
        break;
    }
    case MutationClass::SchemaClosureManipulation: {
        if (byte_choice.empty())
            break;
        for (size_t off = view.find("</", body_start); off != BytesView::npos;
             off = view.find("</", off + 1))
            sites.push_back({Splice{off, "", byte_choice}});
        break;
    }
    case MutationClass::NewlineAbuse: {
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        sites.push_back({Splice{layout.headers[ct].line_start, "", "\r\n"}});
        break;
    }
    case MutationClass::ContentTypeHeaderParameterRemoval: {
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        sites.push_back({Splice{span.line_start,
                                slice(span.line_start,
                                      span.name_len + span.sep_len),
                                ""}});
        break;
    }
    case MutationClass::ContentTypeHeaderReplacement: {
        int ct = find_header_index(req, "Content-Type");
        if (ct < 0)
            break;
        const HeaderSpan &span = layout.headers[ct];
        sites.push_back({Splice{span.line_start, slice(span.line_start, span.name_len),
                                Bytes(req.headers[ct].value)}});
        break;
    }
    case MutationClass::MisplacedField: {
        size_t vpos = view.find("<field2>", body_start);
        if (vpos == BytesView::npos)
            break;
        size_t vend = view.find("</field2>", vpos);
        if (vend == BytesView::npos)
            break;
        Bytes benign = slice(vpos + 8, vend - vpos - 8);
        size_t root = body_start;
        if (view.substr(root).starts_with("<?xml")) {
            size_t e = view.find("?>", root);
            if (e != BytesView::npos)
                root = e + 2;
        }
        if (view.substr(root).starts_with("<!DOCTYPE")) {
            size_t e = view.find('>', root);
            if (e != BytesView::npos)
                root = e + 1;
        }
        sites.push_back({Splice{root, "", benign}});
        break;
    }
    }
    return sites;
}

Bytes apply_splices(BytesView octets, const SiteEdit &edit) {
    // splice from the back so earlier offsets stay valid
    SiteEdit sorted = edit;
    std::sort(sorted.begin(), sorted.end(),
              [](const Splice &a, const Splice &b) { return a.offset > b.offset; });
    Bytes out(octets);
    for (const auto &s : sorted) {
        out.erase(s.offset, s.removed.size());
        out.insert(s.offset, s.inserted);
    }
    return out;
}

} // namespace

Result<AppliedMutation, InapplicableError>
apply_mutation(const RawRequest &req, const MutationSpec &spec) {
    if (spec.requires_continuation || class_requires_continuation(spec.cls)) {
        auto ct = req.header_value("Content-Type");
        bool has_continuation = false;
        if (ct) {
            auto mt = parse_media_type(*ct);
            has_continuation = mt && mt->has_continuation();
        }
        if (!has_continuation)
            return InapplicableError{
                "class requires a continuation-form boundary"};
    }
    Bytes octets = serialize_request(req);
    auto sites = enumerate_sites(req, octets, spec.cls, spec.byte_choice);
    if (sites.empty())
        return InapplicableError{Bytes("no eligible site for ") +
                                 class_name(spec.cls)};
    if (spec.site_index < 0 ||
        static_cast<size_t>(spec.site_index) >= sites.size())
        return InapplicableError{
            "site index " + std::to_string(spec.site_index) + " out of range (" +
            std::to_string(sites.size()) + " sites)"};

    const SiteEdit &edit = sites[static_cast<size_t>(spec.site_index)];
    for (const auto &s : edit) {
        if (BytesView(octets).substr(s.offset, s.removed.size()) != s.removed)
            return InapplicableError{"edit does not match request octets"};
    }
    Bytes mutated = apply_splices(octets, edit);
    auto parsed = parse_request(mutated);
    if (!parsed)
        return InapplicableError{"mutant is not structurally parseable: " +
                                 parsed.error().message};
    return AppliedMutation{std::move(*parsed), edit};
}

Result<RawRequest, InapplicableError>
build_mutant(const SeedSpec &seed, const std::vector<MutationSpec> &specs) {
    SeedBuild build;
    build.spec = seed;
    bool continuation = false;
    for (const auto &s : specs) {
        const ClassInfo &ci = info(s.cls);
        build.part_content_type |= ci.needs_part_ct;
        build.doctype |= ci.needs_doctype;
        if (ci.needs_benign && build.spec.extra_benign_fields == 0)
            build.spec.extra_benign_fields = 1;
        continuation |= ci.continuation || s.requires_continuation;
    }
    RawRequest req = make_seed(build);
    if (continuation)
        req = rewrite_to_continuation(req, "real-boundary", "fake-boundary");
    for (const auto &s : specs) {
        auto applied = apply_mutation(req, s);
        if (!applied)
            return applied.error();
        req = std::move(applied->request);
    }
    return req;
}

// ---------------------------------------------------------------------------
// Corpus generation

namespace {

std::vector<Bytes> byte_domain(MutationClass cls) {
    static const std::vector<Bytes> kStd = {Bytes(1, '\x00'), Bytes(1, '\x01'),
                                            Bytes(1, '\x02'), Bytes(1, '\x09'),
                                            Bytes(1, '\x0b')};
    switch (cls) {
    case MutationClass::ContentTypeParameterTweak: {
        std::vector<Bytes> d = kStd;
        d.insert(d.begin(), "");
        return d;
    }
    case MutationClass::BoundaryHeaderTampering: {
        std::vector<Bytes> d = kStd;
        d.insert(d.begin(), ";");
        return d;
    }
    case MutationClass::SchemaClosureManipulation: {
        std::vector<Bytes> d = kStd;
        d.insert(d.begin(), "j");
        return d;
    }
    case MutationClass::ContentTypeParameterManipulation:
        // deletion and space-substitution variants of the same strike
        return {"", " "};
    case MutationClass::BoundaryDelimiterRemoval:
    case MutationClass::LinefeedRemoval:
    case MutationClass::ContentTypeRemoval:
    case MutationClass::NewlineAbuse:
    case MutationClass::ContentTypeHeaderParameterRemoval:
    case MutationClass::ContentTypeHeaderReplacement:
    case MutationClass::MisplacedField:
    case MutationClass::ExtraFieldAddition:
    case MutationClass::DoctypeClosureConfusion:
        return {""};
    case MutationClass::BoundaryDelimiterManipulation: {
        std::vector<Bytes> d = kStd;
        d.insert(d.begin(), ""); // CRLF-removal flavour ignores the byte
        return d;
    }
    case MutationClass::CharsetValueAlterationInBody: {
        std::vector<Bytes> d = kStd;
        d.push_back(""); // case-toggle flavour
        return d;
    }
    default:
        return kStd;
    }
}

size_t count_sites(const RawRequest &req, MutationClass cls, const Bytes &byte) {
    Bytes octets = serialize_request(req);
    return enumerate_sites(req, octets, cls, byte).size();
}

} // namespace

std::vector<CorpusEntry> generate_corpus(const CorpusOptions &opts) {
    std::vector<CorpusEntry> out;
    DetRng rng(opts.rng_seed);
    size_t index = 0;

    for (MutationClass cls : opts.classes) {
        SeedSpec seed;
        seed.content_type = class_content_type(cls);
        seed.payload =
            opts.payload ? *opts.payload : default_payload_for(seed.content_type);
        if (info(cls).needs_benign)
            seed.extra_benign_fields = 1;

        std::vector<MutationClass> stack_pool;
        for (const auto &ci : kClassTable)
            if (ci.content_type == seed.content_type && ci.cls != cls &&
                ci.continuation == info(cls).continuation && !ci.needs_doctype)
                stack_pool.push_back(ci.cls);

        for (int k = 0; k < opts.per_class; ++k) {
            std::vector<MutationSpec> specs;
            RawRequest current = prepare_seed(seed, cls);
            bool ok = true;
            int want = std::max(1, opts.stack);
            for (int j = 0; j < want; ++j) {
                if (j > 0 && stack_pool.empty())
                    break;
                MutationClass jcls =
                    j == 0 ? cls : stack_pool[rng.below(stack_pool.size())];
                bool applied_one = false;
                for (int attempt = 0; attempt < 8 && !applied_one; ++attempt) {
                    auto domain = byte_domain(jcls);
                    Bytes byte = domain[rng.below(domain.size())];
                    size_t n = count_sites(current, jcls, byte);
                    if (n == 0)
                        continue;
                    MutationSpec spec;
                    spec.cls = jcls;
                    spec.site_index = static_cast<int>(rng.below(n));
                    spec.byte_choice = byte;
                    spec.requires_continuation = class_requires_continuation(jcls);
                    auto applied = apply_mutation(current, spec);
                    if (!applied)
                        continue;
                    current = std::move(applied->request);
                    specs.push_back(std::move(spec));
                    applied_one = true;
                }
                if (!applied_one && j == 0) {
                    ok = false;
                    break;
                }
            }
            if (!ok || specs.empty())
                continue;
            CorpusEntry entry;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "m%04zu", index++);
            entry.name = Bytes(buf) + "_" + class_name(cls);
            entry.request = std::move(current);
            entry.specs = std::move(specs);
            entry.seed = seed;
            out.push_back(std::move(entry));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exemplars

namespace {

Exemplar from_spec(MutationClass cls, const MutationSpec &spec,
                   const SeedSpec &seed) {
    Exemplar e;
    e.cls = cls;
    e.payload = seed.payload;
    RawRequest base = prepare_seed(seed, cls);
    auto applied = apply_mutation(base, spec);
    e.request = std::move(applied->request);
    return e;
}

Exemplar from_fixture(MutationClass cls, BytesView content_type, Bytes body,
                      Bytes payload) {
    Exemplar e;
    e.cls = cls;
    e.payload = std::move(payload);
    e.request = make_request(content_type, std::move(body));
    return e;
}

} // namespace

Exemplar class_exemplar(MutationClass cls) {
    SeedSpec mp_seed; // multipart, XSS payload
    SeedSpec json_seed;
    json_seed.content_type = SeedContentType::Json;
    SeedSpec xml_seed;
    xml_seed.content_type = SeedContentType::Xml;
    xml_seed.payload = kSqliPayload;

    const Bytes nul(1, '\x00');
    switch (cls) {
    case MutationClass::BoundaryDelimiterManipulation: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, mp_seed);
        e.must_not_contain.push_back("\r\n--1234--");
        return e;
    }
    case MutationClass::ContentDispositionDisruption: {
        Exemplar e = from_spec(cls, {cls, 0, nul, false}, mp_seed);
        e.must_contain.push_back("form-da" + nul + "a");
        return e;
    }
    case MutationClass::DistortedHeaderInjectionToBody: {
        Exemplar e = from_spec(cls, {cls, 0, nul, false}, mp_seed);
        e.must_contain.push_back("conten" + nul + "-extra: something");
        return e;
    }
    case MutationClass::ContentTypeTweakInBody: {
        Exemplar e = from_spec(cls, {cls, 0, nul, false}, mp_seed);
        e.must_contain.push_back("Content-Type: text/plain" + nul +
                                 "; charset=UTF-8");
        return e;
    }
    case MutationClass::CharsetValueAlterationInBody: {
        Exemplar e = from_spec(cls, {cls, 0, nul, false}, mp_seed);
        e.must_contain.push_back("charset=" + nul + "UTF-8");
        return e;
    }
    case MutationClass::HeaderSeparatorManipulationInBody: {
        Exemplar e = from_spec(cls, {cls, 0, nul, false}, mp_seed);
        e.must_contain.push_back("name=\"field1\"" + nul);
        return e;
    }
    case MutationClass::ContentTypeParameterTweak: {
        Exemplar e = from_spec(cls, {cls, 1, "", false}, mp_seed);
        e.must_contain.push_back("Cntent-Type: multipart/form-data");
        return e;
    }
    case MutationClass::BoundaryDelimiterRemoval: {
        RawRequest base = prepare_seed(mp_seed, cls);
        size_t n = count_sites(base, cls, "");
        Exemplar e = from_spec(cls, {cls, static_cast<int>(n - 1), "", false},
                               mp_seed);
        e.must_not_contain.push_back("--1234--");
        return e;
    }
    case MutationClass::LinefeedRemoval: {
        Exemplar e = from_spec(cls, {cls, 1, "", false}, mp_seed);
        e.must_contain.push_back("\rContent-Type: multipart/form-data");
        return e;
    }
    case MutationClass::WhitespaceAlteration: {
        Exemplar e = from_spec(cls, {cls, 0, "\t", true}, mp_seed);
        e.must_contain.push_back("Content-Type:\tmultipart/form-data");
        e.must_contain.push_back("boundary*0=real-;boundary*1=boundary");
        return e;
    }
    case MutationClass::DisruptedBodyField: {
        Exemplar e = from_spec(cls, {cls, 0, nul, true}, mp_seed);
        e.must_contain.push_back("name=\"field1" + nul + "\"");
        return e;
    }
    case MutationClass::BoundaryHeaderTampering: {
        Exemplar e = from_spec(cls, {cls, 0, ";", false}, mp_seed);
        e.must_contain.push_back("boundary=1234;");
        return e;
    }
    case MutationClass::ContentTypeRemoval: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, json_seed);
        e.must_not_contain.push_back("Content-Type");
        return e;
    }
    case MutationClass::FieldWrapperManipulation:
        return from_fixture(cls, "application/json",
                            "{ \"field1\" " + nul + ": \"" +
                                Bytes(kXssPayload) + "\" }",
                            kXssPayload);
    case MutationClass::DoubleQuoteReplacement:
        return from_fixture(cls, "application/json",
                            "{ \"field1" + nul + ": \"" + Bytes(kXssPayload) +
                                "\" }",
                            kXssPayload);
    case MutationClass::FieldNameHack:
        return from_fixture(cls, "application/json",
                            "{ \"f" + nul + "eld1\": \"" + Bytes(kXssPayload) +
                                "\" }",
                            kXssPayload);
    case MutationClass::ContentTypeParameterManipulation: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, json_seed);
        e.must_contain.push_back("ContentType: application/json");
        return e;
    }
    case MutationClass::ExtraFieldAddition:
        return from_fixture(cls, "application/xml",
                            "<field1>" + Bytes(kSqliPayload) +
                                "</field1><field2 attr=\"history\">hi</field2>",
                            kSqliPayload);
    case MutationClass::DoctypeClosureConfusion:
        return from_fixture(cls, "application/xml",
                            "<!DOCTYPE BOOK [...]><BOOK><field1>" +
                                Bytes(kSqliPayload) + "</field1>]</BOOK>",
                            kSqliPayload);
    case MutationClass::SchemaClosureManipulation:
        return from_fixture(cls, "application/xml",
                            "<genre:schema><field1>" + Bytes(kSqliPayload) +
                                "</field1>j</genre:schema>",
                            kSqliPayload);
    case MutationClass::NewlineAbuse: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, xml_seed);
        e.must_contain.push_back("\r\n\r\nContent-Type: application/xml");
        return e;
    }
    case MutationClass::ContentTypeHeaderParameterRemoval: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, xml_seed);
        e.must_contain.push_back("\r\napplication/xml\r\n");
        e.must_not_contain.push_back("Content-Type:");
        return e;
    }
    case MutationClass::ContentTypeHeaderReplacement: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, xml_seed);
        e.must_contain.push_back("application/xml: application/xml");
        return e;
    }
    case MutationClass::MisplacedField: {
        Exemplar e = from_spec(cls, {cls, 0, "", false}, xml_seed);
        e.must_contain.push_back("value1<root>");
        return e;
    }
    }
    return {};
}

} // namespace wafdiff
