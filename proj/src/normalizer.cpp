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

#include "wafdiff/normalizer.hpp"

#include <algorithm>

#include "wafdiff/json_codec.hpp"
#include "wafdiff/multipart.hpp"
#include "wafdiff/xml_codec.hpp"

namespace wafdiff {

const char *to_string(ChangeKind k) {
    switch (k) {
    case ChangeKind::CaseFolded: return "CaseFolded";
    case ChangeKind::WhitespaceCanonicalized: return "WhitespaceCanonicalized";
    case ChangeKind::QuoteNormalized: return "QuoteNormalized";
    case ChangeKind::LineEndingFixed: return "LineEndingFixed";
    case ChangeKind::PartContentTypeInserted: return "PartContentTypeInserted";
    case ChangeKind::LengthRecomputed: return "LengthRecomputed";
    case ChangeKind::TrailingBytesDropped: return "TrailingBytesDropped";
    }
    return "Unknown";
}

bool Normalized::has_change(ChangeKind k) const {
    return std::any_of(changes.begin(), changes.end(),
                       [k](const ChangeNote &n) { return n.kind == k; });
}

NormalizerPolicy normalize_policy_default() { return {}; }

namespace {

Bytes collapse_ws(BytesView s) {
    Bytes out;
    for (char c : s)
        if (!is_ows(c) && c != '\r' && c != '\n')
            out += c;
    return out;
}

Bytes strip_quotes(BytesView s) {
    Bytes out;
    for (char c : s)
        if (c != '"' && c != '\'' && c != '\\')
            out += c;
    return out;
}

// Attributes a byte-level difference between an input fragment and its
// canonical form to change kinds. The canonicalizers only fold case,
// normalize whitespace, and normalize quoting/escaping, so the cascade is
// exhaustive; the fallback covers combined escape rewrites.
void diff_kinds(BytesView raw, BytesView canon, const Bytes &location,
                std::vector<ChangeNote> &notes) {
    if (raw == canon)
        return;
    if (ascii_ieq(raw, canon)) {
        notes.push_back({ChangeKind::CaseFolded, location});
        return;
    }
    Bytes cw_r = collapse_ws(raw);
    Bytes cw_c = collapse_ws(canon);
    if (cw_r == cw_c) {
        notes.push_back({ChangeKind::WhitespaceCanonicalized, location});
        return;
    }
    if (ascii_ieq(cw_r, cw_c)) {
        notes.push_back({ChangeKind::CaseFolded, location});
        notes.push_back({ChangeKind::WhitespaceCanonicalized, location});
        return;
    }
    // Quoting/escape rewrites (quote removal, CDATA and entity re-encoding)
    // land here; whitespace and case flags ride along when present.
    if (cw_r != raw || cw_c != canon)
        notes.push_back({ChangeKind::WhitespaceCanonicalized, location});
    Bytes sq_r = strip_quotes(cw_r);
    Bytes sq_c = strip_quotes(cw_c);
    if (sq_r != sq_c && ascii_ieq(sq_r, sq_c))
        notes.push_back({ChangeKind::CaseFolded, location});
    notes.push_back({ChangeKind::QuoteNormalized, location});
}

// Whitespace outside JSON strings, removed. Used to tell pure-whitespace
// canonicalization apart from escape normalization.
Bytes json_strip_interstitial_ws(BytesView s) {
    Bytes out;
    bool in_string = false;
    bool escaped = false;
    for (char c : s) {
        if (in_string) {
            out += c;
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
            out += c;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            continue;
        out += c;
    }
    return out;
}

bool head_has_control_octets(const RawRequest &req) {
    auto bad = [](BytesView s) {
        return std::any_of(s.begin(), s.end(), [](char c) {
            unsigned char u = static_cast<unsigned char>(c);
            return is_ctl(u) && c != '\t';
        });
    };
    if (bad(req.method) || bad(req.target))
        return true;
    for (const auto &h : req.headers)
        if (bad(h.name) || bad(h.value))
            return true;
    return false;
}

const BytesView kInScopeTypes[] = {"multipart/form-data", "application/json",
                                   "application/xml", "text/xml"};

// Headers whose values legitimately carry media-type tokens; everything else
// mentioning an in-scope type without being a Content-Type header is treated
// as a disguised content type.
bool accept_like(BytesView name) {
    Bytes l = ascii_lower_copy(name);
    return l == "accept" || l.starts_with("accept-");
}

bool has_disguised_content_type(const RawRequest &req) {
    for (const auto &h : req.headers) {
        if (accept_like(h.name))
            continue;
        Bytes line = h.line();
        for (BytesView t : kInScopeTypes)
            if (ifind(line, t) != BytesView::npos)
                return true;
    }
    return false;
}

struct BodyNormalization {
    Bytes canonical_body;
    std::vector<ChangeNote> notes;
};

Result<BodyNormalization, RejectReason>
normalize_multipart_body(BytesView body, const MediaType &mt) {
    auto parsed = parse_multipart_strict(body, mt);
    if (!parsed)
        return parsed.error();
    BodyNormalization out;
    out.canonical_body = serialize_multipart_canonical(parsed->body);

    const MultipartParseNotes &n = parsed->notes;
    if (n.case_deviation)
        out.notes.push_back({ChangeKind::CaseFolded, "body"});
    if (n.whitespace_deviation)
        out.notes.push_back({ChangeKind::WhitespaceCanonicalized, "body"});
    if (n.quote_deviation)
        out.notes.push_back({ChangeKind::QuoteNormalized, "body"});
    if (n.epilogue_dropped > 0)
        out.notes.push_back({ChangeKind::TrailingBytesDropped, "body"});
    for (size_t i = 0; i < parsed->body.parts.size(); ++i) {
        const Part &p = parsed->body.parts[i];
        if (p.filename && !p.content_type)
            out.notes.push_back({ChangeKind::PartContentTypeInserted,
                                 "part " + std::to_string(i)});
    }
    return out;
}

Result<BodyNormalization, RejectReason> normalize_json_body(BytesView body) {
    auto parsed = parse_json_strict(body);
    if (!parsed)
        return parsed.error();
    BodyNormalization out;
    out.canonical_body = serialize_json_canonical(*parsed);
    if (Bytes(body) != out.canonical_body) {
        Bytes stripped = json_strip_interstitial_ws(body);
        if (stripped != Bytes(body))
            out.notes.push_back({ChangeKind::WhitespaceCanonicalized, "body"});
        if (stripped != out.canonical_body)
            out.notes.push_back({ChangeKind::QuoteNormalized, "body"});
    }
    return out;
}

Result<BodyNormalization, RejectReason> normalize_xml_body(BytesView body) {
    auto parsed = parse_xml_strict(body);
    if (!parsed)
        return parsed.error();
    // DTDs are the classic request-borne entity-expansion vector; a gateway
    // has no business forwarding them.
    if (parsed->has_doctype())
        return RejectReason{RejectCategory::DeprecatedFeature,
                            "DOCTYPE declaration in request body", {}};
    BodyNormalization out;
    out.canonical_body = serialize_xml_canonical(*parsed);
    diff_kinds(body, out.canonical_body, "body", out.notes);
    return out;
}

} // namespace

NormalizationOutcome normalize(const RawRequest &req,
                               const NormalizerPolicy &policy) {
    if (req.body.size() > policy.max_body_bytes)
        return {RejectReason{RejectCategory::MalformedBody,
                             "body exceeds configured size limit", {}}};
    if (head_has_control_octets(req))
        return {RejectReason{RejectCategory::ControlBytes,
                             "control octet in request head", {}}};

    size_t ct_count = 0;
    const HeaderField *ct_header = nullptr;
    for (const auto &h : req.headers) {
        if (ascii_ieq(h.name, "Content-Type")) {
            ++ct_count;
            if (!ct_header)
                ct_header = &h;
        }
    }
    if (ct_count > 1)
        return {RejectReason{RejectCategory::UnparseableContentType,
                             "multiple content-type headers", {}}};

    auto out_of_scope = [&](const Bytes &why) -> NormalizationOutcome {
        if (policy.unknown_content_type ==
            NormalizerPolicy::UnknownContentType::Reject)
            return {RejectReason{RejectCategory::UnsupportedContentType, why, {}}};
        return {PassedThrough{why}};
    };

    if (!ct_header) {
        if (has_disguised_content_type(req))
            return {RejectReason{RejectCategory::UnparseableContentType,
                                 "content-type-like header with a malformed "
                                 "name or placement",
                                 {}}};
        return out_of_scope("no content-type header");
    }

    auto mt = parse_media_type(ct_header->value);
    if (!mt)
        return {RejectReason{RejectCategory::UnparseableContentType,
                             mt.error().message, mt.error().offset}};

    Result<BodyNormalization, RejectReason> body_result =
        RejectReason{RejectCategory::UnsupportedContentType, "", {}};
    bool in_scope = true;
    if (mt->is("multipart", "form-data") && policy.normalize_multipart)
        body_result = normalize_multipart_body(req.body, *mt);
    else if (mt->is("application", "json") && policy.normalize_json)
        body_result = normalize_json_body(req.body);
    else if ((mt->is("application", "xml") || mt->is("text", "xml")) &&
             policy.normalize_xml)
        body_result = normalize_xml_body(req.body);
    else
        in_scope = false;

    if (!in_scope)
        return out_of_scope("content type " + mt->type + "/" + mt->subtype +
                            " is out of scope");
    if (!body_result)
        return {body_result.error()};

    Normalized result;
    std::vector<ChangeNote> notes = std::move(body_result->notes);

    RawRequest out = req;
    out.body = std::move(body_result->canonical_body);

    // Canonical Content-Type value; other headers are forwarded byte-exactly.
    Bytes ct_canon = media_type_canonical(*mt);
    HeaderField *ct_mut = out.find_header("Content-Type");
    if (ct_mut->value != ct_canon || ct_mut->sep != ": ") {
        diff_kinds(ct_mut->value, ct_canon, "content-type header", notes);
        if (ct_mut->sep != ": " && ct_mut->value == ct_canon)
            notes.push_back(
                {ChangeKind::WhitespaceCanonicalized, "content-type header"});
        ct_mut->value = ct_canon;
        ct_mut->sep = ": ";
    }

    if (policy.recompute_length) {
        Bytes want = std::to_string(out.body.size());
        bool changed = false;
        bool have = false;
        std::vector<HeaderField> kept;
        kept.reserve(out.headers.size());
        for (auto &h : out.headers) {
            if (ascii_ieq(h.name, "Content-Length")) {
                if (have) { // duplicate lengths collapse to one
                    changed = true;
                    continue;
                }
                have = true;
                if (h.value != want || h.sep != ": ") {
                    h.value = want;
                    h.sep = ": ";
                    changed = true;
                }
            }
            kept.push_back(std::move(h));
        }
        out.headers = std::move(kept);
        if (!have && !out.body.empty()) {
            HeaderField cl;
            cl.name = "Content-Length";
            cl.sep = ": ";
            cl.value = want;
            out.headers.push_back(std::move(cl));
            changed = true;
        }
        if (changed)
            notes.push_back({ChangeKind::LengthRecomputed, "content-length header"});
    }

    if (out.used_bare_lf()) {
        out.request_line_ending = LineEnding::Crlf;
        out.blank_line_ending = LineEnding::Crlf;
        for (auto &h : out.headers)
            h.ending = LineEnding::Crlf;
        notes.push_back({ChangeKind::LineEndingFixed, "request head"});
    }

    if (policy.inject_client_headers) {
        auto add_if_absent = [&](BytesView name, BytesView value) {
            if (out.find_header(name))
                return;
            HeaderField h;
            h.name = Bytes(name);
            h.sep = ": ";
            h.value = Bytes(value);
            out.headers.push_back(std::move(h));
        };
        add_if_absent("Accept", "*/*");
        add_if_absent("Accept-Encoding", "gzip, deflate");
        add_if_absent("User-Agent", "wafdiff-normalizer/1.0");
    }

    if (policy.mode == NormalizerPolicy::Mode::RejectOnly && !notes.empty())
        return {RejectReason{RejectCategory::NotCanonical,
                             "request is not in canonical form", {}}};

    result.request = std::move(out);
    result.changes = std::move(notes);
    return {std::move(result)};
}

Result<NormalizerPolicy, Bytes> parse_policy(BytesView text) {
    NormalizerPolicy policy;
    size_t pos = 0;
    size_t line_no = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        BytesView line = eol == BytesView::npos ? text.substr(pos)
                                                : text.substr(pos, eol - pos);
        pos = eol == BytesView::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        BytesView trimmed = trim_ows(line);
        if (trimmed.empty() || trimmed[0] == '#')
            continue;
        size_t eq = trimmed.find('=');
        if (eq == BytesView::npos)
            return Bytes("line " + std::to_string(line_no) + ": expected key=value");
        Bytes key = ascii_lower_copy(trim_ows(trimmed.substr(0, eq)));
        Bytes value = ascii_lower_copy(trim_ows(trimmed.substr(eq + 1)));

        auto flag = [&](bool &target) -> std::optional<Bytes> {
            if (value == "on" || value == "true")
                target = true;
            else if (value == "off" || value == "false")
                target = false;
            else
                return Bytes("line " + std::to_string(line_no) +
                             ": expected on/off");
            return std::nullopt;
        };

        std::optional<Bytes> err;
        if (key == "mode") {
            if (value == "normalize")
                policy.mode = NormalizerPolicy::Mode::Normalize;
            else if (value == "reject-only")
                policy.mode = NormalizerPolicy::Mode::RejectOnly;
            else
                err = Bytes("line " + std::to_string(line_no) + ": unknown mode");
        } else if (key == "unknown_content_type") {
            if (value == "pass-through")
                policy.unknown_content_type =
                    NormalizerPolicy::UnknownContentType::PassThrough;
            else if (value == "reject")
                policy.unknown_content_type =
                    NormalizerPolicy::UnknownContentType::Reject;
            else
                err = Bytes("line " + std::to_string(line_no) +
                            ": unknown unknown_content_type action");
        } else if (key == "recompute_length") {
            err = flag(policy.recompute_length);
        } else if (key == "inject_client_headers") {
            err = flag(policy.inject_client_headers);
        } else if (key == "normalize_multipart") {
            err = flag(policy.normalize_multipart);
        } else if (key == "normalize_json") {
            err = flag(policy.normalize_json);
        } else if (key == "normalize_xml") {
            err = flag(policy.normalize_xml);
        } else if (key == "max_body_bytes") {
            try {
                policy.max_body_bytes = std::stoull(value);
            } catch (...) {
                err = Bytes("line " + std::to_string(line_no) +
                            ": malformed max_body_bytes");
            }
        } else {
            err = Bytes("line " + std::to_string(line_no) + ": unknown key " + key);
        }
        if (err)
            return *err;
    }
    return policy;
}

} // namespace wafdiff
