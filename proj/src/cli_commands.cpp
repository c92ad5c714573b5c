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

#include "wafdiff/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include "wafdiff/json_codec.hpp"
#include "wafdiff/normalizer.hpp"

namespace fs = std::filesystem;

namespace wafdiff::cli {

namespace {

std::vector<Bytes> split_csv(BytesView csv) {
    std::vector<Bytes> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        BytesView item = comma == BytesView::npos ? csv.substr(pos)
                                                  : csv.substr(pos, comma - pos);
        pos = comma == BytesView::npos ? csv.size() + 1 : comma + 1;
        item = trim_ows(item);
        if (!item.empty())
            out.push_back(Bytes(item));
    }
    return out;
}

void print_table(std::ostream &out,
                 const std::vector<std::pair<Bytes, Bytes>> &rows) {
    size_t width = 0;
    for (const auto &[k, v] : rows)
        width = std::max(width, k.size());
    for (const auto &[k, v] : rows)
        out << "  " << std::left << std::setw(static_cast<int>(width) + 2) << k
            << v << "\n";
}

} // namespace

Result<std::vector<MutationClass>, Bytes> resolve_classes(BytesView csv) {
    if (csv.empty() || csv == "all")
        return all_mutation_classes();
    if (csv == "multipart")
        return multipart_mutation_classes();
    if (csv == "json")
        return json_mutation_classes();
    if (csv == "xml")
        return xml_mutation_classes();
    std::vector<MutationClass> out;
    for (const auto &name : split_csv(csv)) {
        auto cls = class_from_name(name);
        if (!cls)
            return Bytes("unknown mutation class: " + name);
        out.push_back(*cls);
    }
    return out;
}

Result<std::vector<WafModel>, Bytes> resolve_wafs(BytesView csv,
                                                  BytesView rules_file) {
    std::vector<WafModel> out;
    std::vector<Bytes> names = split_csv(csv.empty() ? "fail-open-strict" : csv);
    if (names.size() == 1 && names[0] == "all")
        names = {"fail-open-strict", "fail-closed-strict", "raw-scan"};
    for (const auto &name : names) {
        if (name == "fail-open-strict")
            out.push_back(waf_fail_open_strict());
        else if (name == "fail-closed-strict")
            out.push_back(waf_fail_closed_strict());
        else if (name == "raw-scan")
            out.push_back(waf_raw_scan());
        else
            return Bytes("unknown waf model: " + name);
    }
    if (!rules_file.empty()) {
        auto text = read_file(fs::path(Bytes(rules_file)));
        if (!text)
            return text.error().message;
        auto rules = parse_rules(*text);
        if (!rules)
            return Bytes("rules file: " + rules.error());
        for (auto &waf : out)
            waf.rules = *rules;
    }
    return out;
}

Result<std::vector<FrameworkModel>, Bytes> resolve_frameworks(BytesView csv) {
    if (csv.empty() || csv == "all")
        return default_frameworks();
    std::vector<FrameworkModel> out;
    for (const auto &name : split_csv(csv)) {
        auto fw = framework_by_name(name);
        if (!fw)
            return Bytes("unknown framework model: " + name);
        out.push_back(std::move(*fw));
    }
    return out;
}

int cmd_generate(const GenerateOptions &opts, std::ostream &out,
                 std::ostream &err) {
    auto classes = resolve_classes(opts.classes);
    if (!classes) {
        err << classes.error() << "\n";
        return kUsageError;
    }
    if (opts.per_class < 1 || opts.out_dir.empty()) {
        err << "generate: --out and --per-class >= 1 required\n";
        return kUsageError;
    }
    CorpusOptions copts;
    copts.classes = *classes;
    copts.per_class = opts.per_class;
    copts.rng_seed = opts.seed;
    copts.stack = opts.stack;
    if (!opts.payload.empty())
        copts.payload = opts.payload;
    auto corpus = generate_corpus(copts);
    auto written = write_corpus(fs::path(opts.out_dir), corpus);
    if (!written) {
        err << written.error() << "\n";
        return kItemFailure;
    }
    out << "generated " << corpus.size() << " mutants across "
        << classes->size() << " classes into " << opts.out_dir << "\n";
    return kOk;
}

int cmd_normalize(const NormalizeOptions &opts, std::ostream &out,
                  std::ostream &err) {
    NormalizerPolicy policy = normalize_policy_default();
    if (!opts.policy_file.empty()) {
        auto text = read_file(fs::path(opts.policy_file));
        if (!text) {
            err << text.error().message << "\n";
            return kUsageError;
        }
        auto parsed = parse_policy(*text);
        if (!parsed) {
            err << "policy: " << parsed.error() << "\n";
            return kUsageError;
        }
        policy = *parsed;
    }

    std::vector<CorpusEntry> entries;
    fs::path input(opts.input);
    std::error_code ec;
    bool structural_failure = false;
    if (fs::is_directory(input, ec)) {
        auto loaded = fs::exists(input / "manifest.jsonl", ec)
                          ? read_corpus_with_manifest(input)
                          : read_http_dir(input);
        if (!loaded) {
            err << loaded.error() << "\n";
            return kItemFailure;
        }
        entries = std::move(*loaded);
    } else {
        auto octets = read_file(input);
        if (!octets) {
            err << octets.error().message << "\n";
            return kUsageError;
        }
        auto parsed = parse_request(*octets);
        if (!parsed) {
            err << input.string() << ": " << parsed.error().message << "\n";
            return kItemFailure;
        }
        CorpusEntry e;
        e.name = input.stem().string();
        e.request = std::move(*parsed);
        entries.push_back(std::move(e));
    }

    fs::path out_dir;
    if (!opts.out_dir.empty()) {
        out_dir = fs::path(opts.out_dir);
        fs::create_directories(out_dir, ec);
    }

    size_t normalized = 0;
    size_t rejected = 0;
    size_t passed = 0;
    Bytes report;
    for (const auto &e : entries) {
        NormalizationOutcome o = normalize(e.request, policy);
        JsonValue rec = JsonValue::object();
        rec.add("file", JsonValue::string(e.name + ".http"));
        if (o.is_normalized()) {
            ++normalized;
            rec.add("outcome", JsonValue::string("normalized"));
            JsonValue changes = JsonValue::array();
            for (const auto &c : o.normalized().changes) {
                JsonValue ch = JsonValue::object();
                ch.add("kind", JsonValue::string(to_string(c.kind)));
                ch.add("location", JsonValue::string(c.location));
                changes.push(std::move(ch));
            }
            rec.add("changes", std::move(changes));
            if (!out_dir.empty()) {
                auto w = write_file(out_dir / (e.name + ".http"),
                                    serialize_request(o.normalized().request));
                if (!w) {
                    err << w.error() << "\n";
                    structural_failure = true;
                }
            }
        } else if (o.is_rejected()) {
            ++rejected;
            rec.add("outcome", JsonValue::string("rejected"));
            rec.add("category", JsonValue::string(to_string(o.rejected().category)));
            rec.add("detail", JsonValue::string(o.rejected().detail));
        } else {
            ++passed;
            rec.add("outcome", JsonValue::string("passed-through"));
            rec.add("why", JsonValue::string(o.passed_through().why));
        }
        report += serialize_json_canonical(rec);
        report += '\n';
    }
    if (!out_dir.empty()) {
        auto w = write_file(out_dir / "normalize_report.jsonl", report);
        if (!w) {
            err << w.error() << "\n";
            structural_failure = true;
        }
    }

    out << "normalize summary (" << entries.size() << " requests)\n";
    print_table(out, {
                         {"normalized", std::to_string(normalized)},
                         {"rejected", std::to_string(rejected)},
                         {"passed-through", std::to_string(passed)},
                     });
    return structural_failure ? kItemFailure : kOk;
}

int cmd_diff(const DiffOptions &opts, std::ostream &out, std::ostream &err) {
    auto wafs = resolve_wafs(opts.wafs, opts.rules_file);
    if (!wafs) {
        err << wafs.error() << "\n";
        return kUsageError;
    }
    auto fws = resolve_frameworks(opts.frameworks);
    if (!fws) {
        err << fws.error() << "\n";
        return kUsageError;
    }
    fs::path dir(opts.in_dir);
    std::error_code ec;
    auto corpus = fs::exists(dir / "manifest.jsonl", ec)
                      ? read_corpus_with_manifest(dir)
                      : read_http_dir(dir);
    if (!corpus) {
        err << corpus.error() << "\n";
        return kItemFailure;
    }

    auto records = run_matrix(*corpus, *wafs, *fws, opts.jobs);
    Bytes report;
    std::map<Bytes, size_t> totals;
    for (const auto &r : records) {
        report += matrix_record_line(r);
        report += '\n';
        ++totals[to_string(r.outcome.kind)];
    }
    if (!opts.report_path.empty()) {
        auto w = write_file(fs::path(opts.report_path), report);
        if (!w) {
            err << w.error() << "\n";
            return kItemFailure;
        }
    } else {
        out << report;
    }
    out << "differential summary (" << records.size() << " evaluations)\n";
    std::vector<std::pair<Bytes, Bytes>> rows;
    for (const auto &[k, v] : totals)
        rows.emplace_back(k, std::to_string(v));
    print_table(out, rows);
    return kOk;
}

int cmd_minimize(const MinimizeOptions &opts, std::ostream &out,
                 std::ostream &err) {
    auto wafs = resolve_wafs(opts.waf, "");
    if (!wafs || wafs->size() != 1) {
        err << "minimize: exactly one waf model required\n";
        return kUsageError;
    }
    auto fws = resolve_frameworks(opts.frameworks);
    if (!fws) {
        err << fws.error() << "\n";
        return kUsageError;
    }
    auto corpus = read_corpus_with_manifest(fs::path(opts.in_dir));
    if (!corpus) {
        err << corpus.error() << "\n";
        return kItemFailure;
    }

    std::vector<BypassRecord> records;
    for (const auto &entry : *corpus) {
        if (entry.specs.empty())
            continue;
        for (const auto &fw : *fws) {
            Outcome o = run_differential(entry.request, wafs->front(), fw,
                                         entry.seed.payload);
            if (o.kind != Outcome::Kind::Bypass)
                continue;
            BypassRecord rec;
            rec.request_hash = fnv1a64(serialize_request(entry.request));
            rec.request_name = entry.name;
            rec.mutation_set = entry.specs;
            rec.outcome = o;
            rec.waf_id = wafs->front().id;
            rec.framework_id = fw.name;
            auto minimal = minimize(entry.seed, entry.specs, wafs->front(), fw);
            if (minimal)
                rec.minimal_sets = std::move(*minimal);
            auto cls = classify(rec);
            if (cls)
                rec.assigned_class = *cls;
            records.push_back(std::move(rec));
        }
    }
    records = dedupe(std::move(records));

    Bytes report;
    for (const auto &r : records) {
        report += bypass_record_line(r);
        report += '\n';
    }
    if (!opts.report_path.empty()) {
        auto w = write_file(fs::path(opts.report_path), report);
        if (!w) {
            err << w.error() << "\n";
            return kItemFailure;
        }
    } else {
        out << report;
    }

    auto counts = per_class_counts(records);
    out << "unique bypasses per class (" << records.size() << " records)\n";
    std::vector<std::pair<Bytes, Bytes>> rows;
    for (const auto &[cls, n] : counts)
        rows.emplace_back(class_name(cls), std::to_string(n));
    print_table(out, rows);
    return kOk;
}

int cmd_report(const ReportOptions &opts, std::ostream &out, std::ostream &err) {
    auto text = read_file(fs::path(opts.records_path));
    if (!text) {
        err << text.error().message << "\n";
        return kUsageError;
    }
    std::map<Bytes, size_t> outcomes;
    std::map<Bytes, size_t> classes;
    size_t total = 0;
    BytesView view(*text);
    size_t pos = 0;
    while (pos < view.size()) {
        size_t eol = view.find('\n', pos);
        BytesView line = eol == BytesView::npos ? view.substr(pos)
                                                : view.substr(pos, eol - pos);
        pos = eol == BytesView::npos ? view.size() : eol + 1;
        if (trim_ows(line).empty())
            continue;
        auto rec = parse_json_strict(line);
        if (!rec) {
            err << "malformed record: " << rec.error().detail << "\n";
            return kItemFailure;
        }
        ++total;
        if (const JsonValue *o = rec->find("outcome"))
            ++outcomes[o->str];
        if (const JsonValue *c = rec->find("class")) {
            const JsonValue *u = rec->find("unique");
            if (!u || u->boolean)
                ++classes[c->str];
        }
    }
    out << "report (" << total << " records)\n";
    if (!outcomes.empty()) {
        out << "outcomes:\n";
        std::vector<std::pair<Bytes, Bytes>> rows;
        for (const auto &[k, v] : outcomes)
            rows.emplace_back(k, std::to_string(v));
        print_table(out, rows);
    }
    if (!classes.empty()) {
        out << "unique bypasses per class:\n";
        std::vector<std::pair<Bytes, Bytes>> rows;
        for (const auto &[k, v] : classes)
            rows.emplace_back(k, std::to_string(v));
        print_table(out, rows);
    }
    return kOk;
}

} // namespace wafdiff::cli
