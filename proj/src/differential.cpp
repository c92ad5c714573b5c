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

#include "wafdiff/differential.hpp"

#include <algorithm>
#include <thread>

namespace wafdiff {

const char *to_string(Outcome::Kind k) {
    switch (k) {
    case Outcome::Kind::Blocked: return "blocked";
    case Outcome::Kind::Bypass: return "bypass";
    case Outcome::Kind::Malformed: return "malformed";
    case Outcome::Kind::BenignPass: return "benign-pass";
    }
    return "unknown";
}

namespace {

Bytes percent_decode(BytesView s) {
    Bytes out;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '+') {
            out += ' ';
            continue;
        }
        if (c == '%' && i + 2 < s.size()) {
            auto nib = [](char h) -> int {
                if (h >= '0' && h <= '9') return h - '0';
                if (h >= 'a' && h <= 'f') return h - 'a' + 10;
                if (h >= 'A' && h <= 'F') return h - 'A' + 10;
                return -1;
            };
            int hi = nib(s[i + 1]);
            int lo = nib(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>((hi << 4) | lo);
                i += 2;
                continue;
            }
        }
        out += c;
    }
    return out;
}

std::vector<std::pair<Bytes, Bytes>> parse_url_params(BytesView target) {
    std::vector<std::pair<Bytes, Bytes>> out;
    size_t q = target.find('?');
    if (q == BytesView::npos)
        return out;
    BytesView query = target.substr(q + 1);
    size_t pos = 0;
    while (pos <= query.size()) {
        size_t amp = query.find('&', pos);
        BytesView pair = amp == BytesView::npos ? query.substr(pos)
                                                : query.substr(pos, amp - pos);
        pos = amp == BytesView::npos ? query.size() + 1 : amp + 1;
        if (pair.empty())
            continue;
        size_t eq = pair.find('=');
        if (eq == BytesView::npos)
            out.emplace_back(percent_decode(pair), "");
        else
            out.emplace_back(percent_decode(pair.substr(0, eq)),
                             percent_decode(pair.substr(eq + 1)));
    }
    return out;
}

enum class BodyKind { None, Multipart, Json, Xml, Other };

BodyKind media_kind(const MediaType &mt) {
    if (mt.is("multipart", "form-data"))
        return BodyKind::Multipart;
    if (mt.is("application", "json"))
        return BodyKind::Json;
    if (mt.is("application", "xml") || mt.is("text", "xml"))
        return BodyKind::Xml;
    return BodyKind::Other;
}

} // namespace

WafModel::Decision WafModel::decide(const RawRequest &req) const {
    Decision d;
    d.view.url_params = parse_url_params(req.target);
    for (const auto &h : req.headers)
        d.view.headers.emplace_back(h.name, h.value);
    d.view.raw_body = req.body;

    // Strict body inspection: exact Content-Type header, strict media-type
    // parse, strict codec. Anything less yields no body fields.
    BodyKind kind = BodyKind::None;
    std::optional<MediaType> mt;
    if (auto ct = req.header_value("Content-Type")) {
        auto parsed_mt = parse_media_type(*ct);
        if (parsed_mt) {
            mt = std::move(*parsed_mt);
            kind = media_kind(*mt);
        } else {
            d.body_parse_failed = !req.body.empty();
        }
    } else if (!req.body.empty()) {
        d.body_parse_failed = true;
    }

    if (mt && !req.body.empty()) {
        switch (kind) {
        case BodyKind::Multipart: {
            auto parsed = parse_multipart_strict(req.body, *mt);
            if (!parsed) {
                d.body_parse_failed = true;
            } else {
                for (const auto &part : parsed->body.parts)
                    d.view.body_fields.emplace_back(part.name, part.body);
            }
            break;
        }
        case BodyKind::Json: {
            auto parsed = parse_json_strict(req.body);
            if (!parsed)
                d.body_parse_failed = true;
            else
                d.view.body_fields = flatten_json_fields(*parsed);
            break;
        }
        case BodyKind::Xml: {
            auto parsed = parse_xml_strict(req.body);
            if (!parsed)
                d.body_parse_failed = true;
            else
                d.view.body_fields = collect_text_fields(*parsed);
            break;
        }
        case BodyKind::Other:
        case BodyKind::None:
            break; // out-of-scope types are not a parse failure
        }
    }

    if (d.body_parse_failed && fail_closed) {
        d.blocked = true;
        return d;
    }
    Verdict v = evaluate(rules, d.view);
    if (v.action == Verdict::Action::Block) {
        d.blocked = true;
        d.rule_id = v.matched_rule;
    }
    return d;
}

WafModel waf_fail_open_strict() {
    return WafModel{"fail-open-strict", parsed_field_signatures(), false};
}

WafModel waf_fail_closed_strict() {
    return WafModel{"fail-closed-strict", parsed_field_signatures(), true};
}

WafModel waf_raw_scan() {
    return WafModel{"raw-scan", default_signatures(), false};
}

// ---------------------------------------------------------------------------
// Framework model

namespace {

// How permissive parsers read a media type out of damaged header bytes:
// segments split on ';' outside quotes, empty segments skipped, values cut at
// the first CR/LF, control octets otherwise retained.
std::optional<MediaType> lenient_media_parse(BytesView raw) {
    MediaType mt;
    Bytes work(raw);
    std::vector<Bytes> segments;
    Bytes cur;
    bool in_quote = false;
    for (char c : work) {
        if (c == '"')
            in_quote = !in_quote;
        if (!in_quote && c == ';') {
            segments.push_back(cur);
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    segments.push_back(cur);

    if (segments.empty())
        return std::nullopt;
    Bytes head = Bytes(trim_ows(segments[0]));
    // strip leading control bytes left over from separator mutations
    size_t start = 0;
    while (start < head.size() &&
           is_ctl(static_cast<unsigned char>(head[start])))
        ++start;
    head = head.substr(start);
    size_t slash = head.find('/');
    if (slash == Bytes::npos || slash == 0)
        return std::nullopt;
    mt.type = ascii_lower_copy(BytesView(head).substr(0, slash));
    Bytes sub = head.substr(slash + 1);
    size_t sub_end = 0;
    while (sub_end < sub.size() &&
           !is_ows(sub[sub_end]) &&
           !is_ctl(static_cast<unsigned char>(sub[sub_end])))
        ++sub_end;
    mt.subtype = ascii_lower_copy(BytesView(sub).substr(0, sub_end));
    if (mt.type.empty() || mt.subtype.empty())
        return std::nullopt;

    for (size_t i = 1; i < segments.size(); ++i) {
        BytesView seg = trim_ows(segments[i]);
        if (seg.empty())
            continue;
        size_t eq = seg.find('=');
        if (eq == BytesView::npos)
            continue;
        MediaTypeParam param;
        Bytes name = ascii_lower_copy(trim_ows(seg.substr(0, eq)));
        size_t star = name.find('*');
        if (star != Bytes::npos && star + 1 < name.size()) {
            BytesView idx = BytesView(name).substr(star + 1);
            if (std::all_of(idx.begin(), idx.end(),
                            [](char d) { return is_digit(d); })) {
                param.continuation_index = std::stoi(Bytes(idx));
                name = name.substr(0, star);
            }
        }
        param.name = name;
        Bytes value = Bytes(trim_ows(seg.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
            param.quoted = true;
        }
        size_t value_cut = value.find_first_of("\r\n");
        if (value_cut != Bytes::npos)
            value.resize(value_cut);
        param.value = std::move(value);
        mt.parameters.push_back(std::move(param));
    }
    return mt;
}

const BytesView kTypeTokens[] = {"multipart/form-data", "application/json",
                                 "application/xml", "text/xml"};

// Media type recovered the way frameworks do: the exact header first, then
// any header line carrying an in-scope type token.
std::optional<MediaType> recover_media_type(const RawRequest &req) {
    if (auto ct = req.header_value("Content-Type")) {
        if (auto strict = parse_media_type(*ct))
            return std::move(*strict);
        if (auto loose = lenient_media_parse(*ct))
            return loose;
    }
    for (const auto &h : req.headers) {
        Bytes line = h.line();
        for (BytesView token : kTypeTokens) {
            size_t at = ifind(line, token);
            if (at == BytesView::npos)
                continue;
            size_t end = line.find_first_of("\r\n", at);
            BytesView slice = BytesView(line).substr(
                at, end == Bytes::npos ? line.size() - at : end - at);
            if (auto loose = lenient_media_parse(slice))
                return loose;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::vector<std::pair<Bytes, Bytes>>>
FrameworkModel::parse_fields(const RawRequest &req) const {
    std::optional<MediaType> mt = recover_media_type(req);

    if (mt) {
        switch (media_kind(*mt)) {
        case BodyKind::Multipart:
            if (multipart_profile) {
                auto parsed =
                    parse_multipart_lenient(req.body, *mt, *multipart_profile);
                if (!parsed)
                    return std::nullopt;
                std::vector<std::pair<Bytes, Bytes>> fields;
                for (const auto &part : parsed->parts)
                    fields.emplace_back(part.name, part.body);
                return fields;
            }
            return std::nullopt;
        case BodyKind::Json:
            if (json_profile) {
                auto parsed = parse_json_lenient(req.body, *json_profile);
                if (!parsed)
                    return std::nullopt;
                return flatten_json_fields(*parsed);
            }
            return std::nullopt;
        case BodyKind::Xml:
            if (xml_profile) {
                auto parsed = parse_xml_lenient(req.body, *xml_profile);
                if (!parsed)
                    return std::nullopt;
                return collect_text_fields(*parsed);
            }
            return std::nullopt;
        default:
            break;
        }
    }

    // No usable media type anywhere: parsers that expect a specific body
    // format process it anyway. Multipart cannot be attempted without a
    // boundary.
    if (json_profile && !req.body.empty()) {
        auto parsed = parse_json_lenient(req.body, *json_profile);
        if (parsed)
            return flatten_json_fields(*parsed);
    }
    if (xml_profile && !req.body.empty()) {
        auto parsed = parse_xml_lenient(req.body, *xml_profile);
        if (parsed)
            return collect_text_fields(*parsed);
    }
    return std::nullopt;
}

FrameworkModel framework_joined_boundary_tolerant() {
    FrameworkModel fw;
    fw.name = "joined-boundary-tolerant";
    fw.multipart_profile = LeniencyProfile::permissive();
    return fw;
}

FrameworkModel framework_control_char_tolerant_json() {
    FrameworkModel fw;
    fw.name = "control-char-tolerant-json";
    fw.json_profile = JsonLeniency::permissive();
    return fw;
}

FrameworkModel framework_lenient_xml() {
    FrameworkModel fw;
    fw.name = "lenient-xml";
    fw.xml_profile = XmlLeniency::permissive();
    return fw;
}

FrameworkModel framework_strict_mirror() {
    FrameworkModel fw;
    fw.name = "strict-mirror";
    fw.multipart_profile = LeniencyProfile::strictest();
    fw.json_profile = JsonLeniency::strict();
    fw.xml_profile = XmlLeniency::strict();
    return fw;
}

std::vector<FrameworkModel> default_frameworks() {
    return {framework_joined_boundary_tolerant(),
            framework_control_char_tolerant_json(), framework_lenient_xml()};
}

std::optional<FrameworkModel> framework_by_name(BytesView name) {
    for (auto &fw : default_frameworks())
        if (fw.name == name)
            return fw;
    if (name == "strict-mirror")
        return framework_strict_mirror();
    return std::nullopt;
}

Outcome run_differential(const RawRequest &req, const WafModel &waf,
                         const FrameworkModel &fw, BytesView payload) {
    WafModel::Decision d = waf.decide(req);
    Outcome out;
    if (d.blocked) {
        out.kind = Outcome::Kind::Blocked;
        if (d.rule_id)
            out.rule_id = *d.rule_id;
        return out;
    }
    auto fields = fw.parse_fields(req);
    if (!fields) {
        out.kind = Outcome::Kind::Malformed;
        return out;
    }
    for (const auto &[path, value] : *fields) {
        if (fw.payload_field_policy == FrameworkModel::PayloadFieldPolicy::NamedField) {
            BytesView last = path;
            size_t slash = path.rfind('/');
            if (slash != Bytes::npos)
                last = BytesView(path).substr(slash + 1);
            if (last != fw.payload_field_name)
                continue;
        }
        if (value.find(payload) != Bytes::npos) {
            out.kind = Outcome::Kind::Bypass;
            out.framework = fw.name;
            out.field_path = path;
            return out;
        }
    }
    // Both sides parsed but the payload never surfaced: a degenerate mutant,
    // not a bypass. A fail-open allow without a parse stays Malformed.
    out.kind = d.body_parse_failed ? Outcome::Kind::Malformed
                                   : Outcome::Kind::BenignPass;
    return out;
}

std::vector<MatrixRecord> run_matrix(const std::vector<CorpusEntry> &corpus,
                                     const std::vector<WafModel> &wafs,
                                     const std::vector<FrameworkModel> &fws,
                                     int jobs) {
    struct Job {
        const CorpusEntry *entry;
        const WafModel *waf;
        const FrameworkModel *fw;
    };
    std::vector<Job> work;
    for (const auto &entry : corpus)
        for (const auto &waf : wafs)
            for (const auto &fw : fws)
                work.push_back({&entry, &waf, &fw});

    std::vector<MatrixRecord> records(work.size());
    auto run_range = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const Job &j = work[i];
            Bytes payload = j.entry->seed.payload.empty()
                                ? default_payload_for(j.entry->seed.content_type)
                                : j.entry->seed.payload;
            MatrixRecord rec;
            rec.request_name = j.entry->name;
            rec.request_hash = fnv1a64(serialize_request(j.entry->request));
            rec.waf_id = j.waf->id;
            rec.framework_id = j.fw->name;
            rec.outcome = run_differential(j.entry->request, *j.waf, *j.fw,
                                           payload);
            records[i] = std::move(rec);
        }
    };

    if (jobs <= 1 || work.size() < 2) {
        run_range(0, work.size());
    } else {
        size_t n = std::min<size_t>(static_cast<size_t>(jobs), work.size());
        std::vector<std::thread> threads;
        size_t chunk = (work.size() + n - 1) / n;
        for (size_t t = 0; t < n; ++t) {
            size_t begin = t * chunk;
            size_t end = std::min(work.size(), begin + chunk);
            if (begin >= end)
                break;
            threads.emplace_back(run_range, begin, end);
        }
        for (auto &t : threads)
            t.join();
    }

    std::sort(records.begin(), records.end(),
              [](const MatrixRecord &a, const MatrixRecord &b) {
                  if (a.request_hash != b.request_hash)
                      return a.request_hash < b.request_hash;
                  if (a.waf_id != b.waf_id)
                      return a.waf_id < b.waf_id;
                  if (a.framework_id != b.framework_id)
                      return a.framework_id < b.framework_id;
                  // duplicate mutants share a hash; the name breaks the tie
                  return a.request_name < b.request_name;
              });
    return records;
}

} // namespace wafdiff
