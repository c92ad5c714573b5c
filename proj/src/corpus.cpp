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

#include "wafdiff/corpus.hpp"

#include <algorithm>
#include <fstream>

#include "wafdiff/json_codec.hpp"

namespace fs = std::filesystem;

namespace wafdiff {

Result<Bytes, FileError> read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        return FileError{"cannot open " + p.string()};
    Bytes data((std::istreambuf_iterator<char>(in)),
               std::istreambuf_iterator<char>());
    return data;
}

Result<bool, Bytes> write_file(const fs::path &p, BytesView data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        return Bytes("cannot write " + p.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out)
        return Bytes("short write to " + p.string());
    return true;
}

namespace {

const char kManifestName[] = "manifest.jsonl";

JsonValue spec_to_json(const MutationSpec &s) {
    JsonValue o = JsonValue::object();
    o.add("class", JsonValue::string(class_name(s.cls)));
    o.add("site_index", JsonValue::number(s.site_index));
    o.add("byte_choice", JsonValue::string(hex_octets(s.byte_choice)));
    o.add("requires_continuation", JsonValue::boolean_value(s.requires_continuation));
    return o;
}

Result<MutationSpec, Bytes> spec_from_json(const JsonValue &o) {
    MutationSpec s;
    const JsonValue *cls = o.find("class");
    const JsonValue *site = o.find("site_index");
    const JsonValue *byte = o.find("byte_choice");
    const JsonValue *cont = o.find("requires_continuation");
    if (!cls || !site || !byte || !cont)
        return Bytes("manifest spec record missing fields");
    auto parsed = class_from_name(cls->str);
    if (!parsed)
        return Bytes("unknown mutation class " + cls->str);
    s.cls = *parsed;
    s.site_index = std::stoi(site->number_text);
    s.byte_choice = from_hex_octets(byte->str);
    s.requires_continuation = cont->boolean;
    return s;
}

const char *content_type_name(SeedContentType t) {
    switch (t) {
    case SeedContentType::Multipart: return "multipart";
    case SeedContentType::Json: return "json";
    case SeedContentType::Xml: return "xml";
    }
    return "multipart";
}

std::optional<SeedContentType> content_type_from_name(BytesView n) {
    if (n == "multipart")
        return SeedContentType::Multipart;
    if (n == "json")
        return SeedContentType::Json;
    if (n == "xml")
        return SeedContentType::Xml;
    return std::nullopt;
}

} // namespace

Bytes manifest_line(const CorpusEntry &e) {
    JsonValue o = JsonValue::object();
    o.add("file", JsonValue::string(e.name + ".http"));
    JsonValue specs = JsonValue::array();
    for (const auto &s : e.specs)
        specs.push(spec_to_json(s));
    o.add("specs", std::move(specs));
    JsonValue seed = JsonValue::object();
    seed.add("content_type", JsonValue::string(content_type_name(e.seed.content_type)));
    seed.add("payload", JsonValue::string(hex_octets(e.seed.payload)));
    seed.add("field_name", JsonValue::string(e.seed.field_name));
    seed.add("extra_benign_fields", JsonValue::number(e.seed.extra_benign_fields));
    o.add("seed", std::move(seed));
    o.add("request_hash",
          JsonValue::string(hex_u64(fnv1a64(serialize_request(e.request)))));
    return serialize_json_canonical(o);
}

Result<bool, Bytes> write_corpus(const fs::path &dir,
                                 const std::vector<CorpusEntry> &entries) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        return Bytes("cannot create " + dir.string());
    Bytes manifest;
    for (const auto &e : entries) {
        auto w = write_file(dir / (e.name + ".http"), serialize_request(e.request));
        if (!w)
            return w.error();
        manifest += manifest_line(e);
        manifest += '\n';
    }
    return write_file(dir / kManifestName, manifest);
}

Result<std::vector<CorpusEntry>, Bytes>
read_corpus_with_manifest(const fs::path &dir) {
    auto manifest = read_file(dir / kManifestName);
    if (!manifest)
        return manifest.error().message;
    std::vector<CorpusEntry> entries;
    size_t pos = 0;
    BytesView text(*manifest);
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        BytesView line = eol == BytesView::npos ? text.substr(pos)
                                                : text.substr(pos, eol - pos);
        pos = eol == BytesView::npos ? text.size() : eol + 1;
        if (trim_ows(line).empty())
            continue;
        auto record = parse_json_strict(line);
        if (!record)
            return Bytes("malformed manifest line: " + record.error().detail);
        const JsonValue *file = record->find("file");
        const JsonValue *specs = record->find("specs");
        const JsonValue *seed = record->find("seed");
        if (!file || !specs || !seed)
            return Bytes("manifest record missing fields");

        CorpusEntry entry;
        Bytes fname = file->str;
        entry.name = fname.ends_with(".http") ? fname.substr(0, fname.size() - 5)
                                              : fname;
        auto octets = read_file(dir / fname);
        if (!octets)
            return octets.error().message;
        auto parsed = parse_request(*octets);
        if (!parsed)
            return Bytes(fname + ": " + parsed.error().message);
        entry.request = std::move(*parsed);
        for (const auto &s : specs->items) {
            auto spec = spec_from_json(s);
            if (!spec)
                return spec.error();
            entry.specs.push_back(std::move(*spec));
        }
        const JsonValue *ct = seed->find("content_type");
        const JsonValue *payload = seed->find("payload");
        const JsonValue *field = seed->find("field_name");
        const JsonValue *benign = seed->find("extra_benign_fields");
        if (!ct || !payload || !field || !benign)
            return Bytes("manifest seed record missing fields");
        auto ctype = content_type_from_name(ct->str);
        if (!ctype)
            return Bytes("unknown seed content type " + ct->str);
        entry.seed.content_type = *ctype;
        entry.seed.payload = from_hex_octets(payload->str);
        entry.seed.field_name = field->str;
        entry.seed.extra_benign_fields = std::stoi(benign->number_text);
        entries.push_back(std::move(entry));
    }
    return entries;
}

Result<std::vector<CorpusEntry>, Bytes> read_http_dir(const fs::path &dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        return Bytes(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto &de : fs::directory_iterator(dir)) {
        if (de.is_regular_file() && de.path().extension() == ".http")
            files.push_back(de.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<CorpusEntry> entries;
    for (const auto &f : files) {
        auto octets = read_file(f);
        if (!octets)
            return octets.error().message;
        auto parsed = parse_request(*octets);
        if (!parsed)
            return Bytes(f.filename().string() + ": " + parsed.error().message);
        CorpusEntry entry;
        entry.name = f.stem().string();
        entry.request = std::move(*parsed);
        entries.push_back(std::move(entry));
    }
    return entries;
}

Bytes matrix_record_line(const MatrixRecord &r) {
    JsonValue o = JsonValue::object();
    o.add("request", JsonValue::string(r.request_name));
    o.add("hash", JsonValue::string(hex_u64(r.request_hash)));
    o.add("waf", JsonValue::string(r.waf_id));
    o.add("framework", JsonValue::string(r.framework_id));
    o.add("outcome", JsonValue::string(to_string(r.outcome.kind)));
    o.add("field", JsonValue::string(r.outcome.field_path));
    o.add("rule", JsonValue::string(r.outcome.rule_id));
    return serialize_json_canonical(o);
}

Bytes bypass_record_line(const BypassRecord &r) {
    JsonValue o = JsonValue::object();
    o.add("request", JsonValue::string(r.request_name));
    o.add("hash", JsonValue::string(hex_u64(r.request_hash)));
    o.add("waf", JsonValue::string(r.waf_id));
    o.add("framework", JsonValue::string(r.framework_id));
    JsonValue muts = JsonValue::array();
    for (const auto &s : r.mutation_set)
        muts.push(spec_to_json(s));
    o.add("mutations", std::move(muts));
    JsonValue sets = JsonValue::array();
    for (const auto &set : r.minimal_sets) {
        JsonValue inner = JsonValue::array();
        for (const auto &s : set)
            inner.push(spec_to_json(s));
        sets.push(std::move(inner));
    }
    o.add("minimal_sets", std::move(sets));
    o.add("class", JsonValue::string(r.assigned_class
                                         ? class_name(*r.assigned_class)
                                         : "ambiguous"));
    o.add("site_kind",
          JsonValue::string(r.assigned_class
                                ? to_string(class_site_kind(*r.assigned_class))
                                : ""));
    o.add("unique", JsonValue::boolean_value(r.unique));
    return serialize_json_canonical(o);
}

} // namespace wafdiff
