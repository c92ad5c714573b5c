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

// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits non-zero when any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <vector>

#include "test_util.hpp"
#include "wafdiff/cli.hpp"
#include "wafdiff/minimize.hpp"
#include "wafdiff/normalizer.hpp"

using namespace wafdiff;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    const char *name;
    int failures = 0;
    std::ostringstream detail;

    Criterion(int id_, const char *name_) : id(id_), name(name_) {}

    void expect(bool ok, const char *what) {
        if (!ok) {
            ++failures;
            detail << "    failed: " << what << "\n";
        }
    }

    bool finish(double seconds, double budget) {
        bool in_budget = budget <= 0 || seconds < budget;
        if (!in_budget) {
            ++failures;
            detail << "    failed: exceeded " << budget << "s budget\n";
        }
        std::printf("%s criterion-%d %s (%.2fs)\n",
                    failures == 0 ? "PASS" : "FAIL", id, name, seconds);
        if (failures != 0)
            std::fputs(detail.str().c_str(), stdout);
        return failures == 0;
    }
};

template <typename F>
bool run_criterion(int id, const char *name, double budget, F &&body) {
    Criterion c(id, name);
    auto start = std::chrono::steady_clock::now();
    body(c);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return c.finish(seconds, budget);
}

RawRequest parse_or_abort(BytesView octets, Criterion &c) {
    auto req = parse_request(octets);
    c.expect(req.ok(), "request parses structurally");
    return req.ok() ? *req : RawRequest{};
}

const fs::path kDataDir = WAFDIFF_TEST_DATA_DIR;

// ---------------------------------------------------------------------------
// 1. The parameter-continuation request end to end: allowed by the fail-open
//    strict model with the payload undetected, parsed by the joined-boundary
//    framework with the payload extracted from part "id".

void criterion_continuation_bypass(Criterion &c) {
    RawRequest req = parse_or_abort(testutil::continuation_request(), c);
    const Bytes payload = "<script>alert(document.cookie)</script>";

    WafModel waf = waf_fail_open_strict();
    auto decision = waf.decide(req);
    c.expect(!decision.blocked, "fail-open strict model allows the request");
    bool payload_seen = false;
    for (const auto &[name, value] : decision.view.body_fields)
        if (value.find(payload) != Bytes::npos)
            payload_seen = true;
    c.expect(!payload_seen, "payload undetected by the strict parse");

    Outcome o = run_differential(req, waf, framework_joined_boundary_tolerant(),
                                 payload);
    c.expect(o.kind == Outcome::Kind::Bypass, "outcome is a bypass");
    c.expect(o.field_path == "id", "payload extracted from part id");
}

// ---------------------------------------------------------------------------
// 2. Normalizer shield over the multipart mutation corpus: nothing passes
//    through, and every normalized output is blocked by the signatures.

void criterion_normalizer_shield(Criterion &c) {
    CorpusOptions opts;
    opts.classes = multipart_mutation_classes();
    opts.per_class = 5;
    opts.rng_seed = 42;
    auto corpus = generate_corpus(opts);
    c.expect(corpus.size() >= 60, "at least 60 multipart mutants generated");

    NormalizerPolicy policy = normalize_policy_default();
    size_t rejected = 0;
    size_t normalized = 0;
    size_t passed = 0;
    size_t normalized_blocked = 0;
    for (const auto &entry : corpus) {
        auto outcome = normalize(entry.request, policy);
        if (outcome.is_passed_through()) {
            ++passed;
            continue;
        }
        if (outcome.is_rejected()) {
            ++rejected;
            continue;
        }
        ++normalized;
        auto decision =
            WafModel{"post-normalizer", default_signatures(), false}.decide(
                outcome.normalized().request);
        if (decision.blocked)
            ++normalized_blocked;
    }
    c.expect(passed == 0, "no mutant passes through");
    c.expect(rejected + normalized == corpus.size(),
             "every mutant is rejected or normalized");
    c.expect(normalized_blocked == normalized,
             "every normalized output is blocked by the default signatures");
}

// ---------------------------------------------------------------------------
// 3. The shipped valid multipart corpus normalizes with zero rejections.

void criterion_valid_corpus(Criterion &c) {
    auto entries = read_http_dir(kDataDir / "valid_multipart");
    c.expect(entries.ok(), "valid corpus directory loads");
    if (!entries.ok())
        return;
    c.expect(entries->size() >= 20, "at least 20 valid requests shipped");
    size_t rejections = 0;
    for (const auto &entry : *entries) {
        auto outcome = normalize(entry.request, normalize_policy_default());
        if (!outcome.is_normalized()) {
            ++rejections;
            c.detail << "    rejected: " << entry.name << "\n";
        }
    }
    c.expect(rejections == 0, "zero rejections over the valid corpus");
}

// ---------------------------------------------------------------------------
// 4. Byte-exact golden normalization of the messy upload request.

void criterion_golden_normalization(Criterion &c) {
    auto golden = read_file(kDataDir / "golden" / "upload_normalized.http");
    c.expect(golden.ok(), "golden file loads");
    if (!golden.ok())
        return;
    RawRequest req = parse_or_abort(testutil::messy_upload_request(), c);
    auto outcome = normalize(req, normalize_policy_default());
    c.expect(outcome.is_normalized(), "upload request normalizes");
    if (!outcome.is_normalized())
        return;
    Bytes out = serialize_request(outcome.normalized().request);
    c.expect(out == *golden, "output matches the committed golden bytes");
    const Normalized &n = outcome.normalized();
    c.expect(n.has_change(ChangeKind::CaseFolded), "case-fold note present");
    c.expect(n.has_change(ChangeKind::WhitespaceCanonicalized),
             "whitespace note present");
    c.expect(n.has_change(ChangeKind::QuoteNormalized), "quote note present");
    c.expect(n.has_change(ChangeKind::PartContentTypeInserted),
             "inserted part content-type note present");
    c.expect(n.has_change(ChangeKind::LengthRecomputed),
             "length recomputation note present");
    c.expect(n.has_change(ChangeKind::TrailingBytesDropped),
             "trailing bytes note present");
}

// ---------------------------------------------------------------------------
// 5. Every mutation class's shipped exemplar is missed by the strict WAF
//    model and recovered by a documented lenient framework model.

void criterion_class_exemplars(Criterion &c) {
    for (MutationClass cls : all_mutation_classes()) {
        Exemplar e = class_exemplar(cls);
        Bytes octets = serialize_request(e.request);
        for (const auto &frag : e.must_contain)
            if (octets.find(frag) == Bytes::npos) {
                c.expect(false, "exemplar carries its documented bytes");
                c.detail << "      class " << class_name(cls) << "\n";
            }
        for (const auto &frag : e.must_not_contain)
            if (octets.find(frag) != Bytes::npos) {
                c.expect(false, "exemplar drops its documented bytes");
                c.detail << "      class " << class_name(cls) << "\n";
            }

        WafModel waf = waf_fail_open_strict();
        auto decision = waf.decide(e.request);
        bool payload_seen = false;
        for (const auto &[name, value] : decision.view.body_fields)
            if (value.find(e.payload) != Bytes::npos)
                payload_seen = true;
        if (decision.blocked || payload_seen) {
            c.expect(false, "strict WAF model rejects the body or misses the payload");
            c.detail << "      class " << class_name(cls) << "\n";
        }

        FrameworkModel fw;
        switch (class_content_type(cls)) {
        case SeedContentType::Multipart:
            fw = framework_joined_boundary_tolerant();
            break;
        case SeedContentType::Json:
            fw = framework_control_char_tolerant_json();
            break;
        case SeedContentType::Xml:
            fw = framework_lenient_xml();
            break;
        }
        Outcome o = run_differential(e.request, waf, fw, e.payload);
        if (o.kind != Outcome::Kind::Bypass) {
            c.expect(false, "lenient framework model recovers the payload");
            c.detail << "      class " << class_name(cls) << " -> "
                     << to_string(o.kind) << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// 6. Minimizer oracle: the stacked contributing/non-contributing pair
//    reduces to the contributing mutation only, cross-checked against an
//    exhaustive enumeration done here.

void criterion_minimizer_oracle(Criterion &c) {
    SeedSpec seed; // multipart, XSS payload
    MutationSpec contributing{MutationClass::BoundaryDelimiterManipulation, 1,
                              Bytes(1, '\x00'), false};
    MutationSpec harmless{MutationClass::CharsetValueAlterationInBody, 0, "",
                          false};
    WafModel waf = waf_fail_open_strict();
    FrameworkModel fw = framework_joined_boundary_tolerant();
    std::vector<MutationSpec> specs = {contributing, harmless};

    // independent oracle: enumerate all subsets directly
    std::vector<std::vector<MutationSpec>> oracle_minimal;
    std::vector<bool> bypasses(4, false);
    for (unsigned mask = 1; mask < 4; ++mask) {
        std::vector<MutationSpec> subset;
        for (unsigned bit = 0; bit < 2; ++bit)
            if (mask & (1u << bit))
                subset.push_back(specs[bit]);
        auto mutant = build_mutant(seed, subset);
        bypasses[mask] =
            mutant.ok() && run_differential(*mutant, waf, fw, seed.payload)
                                   .kind == Outcome::Kind::Bypass;
    }
    for (unsigned mask = 1; mask < 4; ++mask) {
        if (!bypasses[mask])
            continue;
        bool smaller = false;
        for (unsigned sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask)
            smaller |= bypasses[sub];
        if (smaller)
            continue;
        std::vector<MutationSpec> set;
        for (unsigned bit = 0; bit < 2; ++bit)
            if (mask & (1u << bit))
                set.push_back(specs[bit]);
        oracle_minimal.push_back(set);
    }
    c.expect(oracle_minimal.size() == 1, "oracle finds one minimal set");
    c.expect(oracle_minimal.size() == 1 && oracle_minimal[0].size() == 1 &&
                 oracle_minimal[0][0].cls ==
                     MutationClass::BoundaryDelimiterManipulation,
             "oracle minimal set is the contributing mutation");

    auto minimal = minimize(seed, specs, waf, fw);
    c.expect(minimal.ok(), "minimize accepts the bypassing set");
    if (!minimal.ok())
        return;
    c.expect(minimal->size() == oracle_minimal.size(),
             "minimize matches the oracle set count");
    c.expect(minimal->size() == 1 && minimal->front().size() == 1 &&
                 minimal->front()[0].cls ==
                     MutationClass::BoundaryDelimiterManipulation,
             "minimize returns exactly the contributing mutation");
}

// ---------------------------------------------------------------------------
// 7. Property suites.

void criterion_properties(Criterion &c) {
    // lossless round-trip over generated valid requests
    {
        DetRng rng(1234);
        size_t failures = 0;
        for (int i = 0; i < 1000; ++i) {
            Bytes octets = testutil::random_valid_request(rng);
            auto req = parse_request(octets);
            if (!req.ok() || serialize_request(*req) != octets)
                ++failures;
        }
        c.expect(failures == 0, "1000-request lossless round-trip");
    }

    CorpusOptions opts;
    opts.classes = all_mutation_classes();
    opts.per_class = 5;
    opts.rng_seed = 42;
    auto corpus = generate_corpus(opts);

    // strict acceptance implies lenient acceptance with identical fields
    {
        size_t violations = 0;
        for (const auto &entry : corpus) {
            const RawRequest &req = entry.request;
            auto ct = req.header_value("Content-Type");
            if (!ct)
                continue;
            auto mt = parse_media_type(*ct);
            if (!mt)
                continue;
            if (mt->is("multipart", "form-data")) {
                auto strict = parse_multipart_strict(req.body, *mt);
                if (!strict)
                    continue;
                auto lenient = parse_multipart_lenient(
                    req.body, *mt, LeniencyProfile::permissive());
                if (!lenient ||
                    lenient->parts.size() != strict->body.parts.size()) {
                    ++violations;
                    continue;
                }
                for (size_t k = 0; k < lenient->parts.size(); ++k)
                    if (lenient->parts[k].name != strict->body.parts[k].name ||
                        lenient->parts[k].body != strict->body.parts[k].body)
                        ++violations;
            } else if (mt->is("application", "json")) {
                auto strict = parse_json_strict(req.body);
                if (!strict)
                    continue;
                auto lenient =
                    parse_json_lenient(req.body, JsonLeniency::permissive());
                if (!lenient || !(*strict == *lenient))
                    ++violations;
            } else if (mt->is("application", "xml")) {
                auto strict = parse_xml_strict(req.body);
                if (!strict)
                    continue;
                auto lenient =
                    parse_xml_lenient(req.body, XmlLeniency::permissive());
                if (!lenient || collect_text_fields(*strict) !=
                                    collect_text_fields(*lenient))
                    ++violations;
            }
        }
        c.expect(violations == 0, "strict within lenient on the full corpus");
    }

    // normalize idempotence over the corpus
    {
        size_t violations = 0;
        for (const auto &entry : corpus) {
            auto first = normalize(entry.request, normalize_policy_default());
            if (!first.is_normalized())
                continue;
            auto second = normalize(first.normalized().request,
                                    normalize_policy_default());
            if (!second.is_normalized() ||
                !second.normalized().changes.empty() ||
                serialize_request(second.normalized().request) !=
                    serialize_request(first.normalized().request))
                ++violations;
        }
        c.expect(violations == 0, "normalize is idempotent over the corpus");
    }

    // fail-closed dominance and zero parse-failure bypasses
    {
        std::vector<WafModel> wafs = {waf_fail_open_strict(),
                                      waf_fail_closed_strict()};
        auto fws = default_frameworks();
        auto records = run_matrix(corpus, wafs, fws, 2);
        size_t open_bypass = 0;
        size_t closed_bypass = 0;
        for (const auto &rec : records) {
            if (rec.outcome.kind != Outcome::Kind::Bypass)
                continue;
            if (rec.waf_id == "fail-closed-strict")
                ++closed_bypass;
            else
                ++open_bypass;
        }
        c.expect(closed_bypass <= open_bypass, "fail-closed dominance");
        size_t closed_parse_failure_bypasses = 0;
        for (const auto &entry : corpus) {
            auto d = waf_fail_closed_strict().decide(entry.request);
            if (d.body_parse_failed && !d.blocked)
                ++closed_parse_failure_bypasses;
        }
        c.expect(closed_parse_failure_bypasses == 0,
                 "fail-closed blocks every parse failure");
    }

    // end-to-end report determinism through the CLI surface
    {
        auto run_pipeline = [](const fs::path &dir) -> Bytes {
            std::ostringstream out, err;
            cli::GenerateOptions gen;
            gen.out_dir = (dir / "corpus").string();
            gen.classes = "all";
            gen.per_class = 2;
            gen.seed = 42;
            if (cli::cmd_generate(gen, out, err) != cli::kOk)
                return "generate failed";
            cli::DiffOptions diff;
            diff.in_dir = gen.out_dir;
            diff.wafs = "all";
            diff.report_path = (dir / "diff.jsonl").string();
            diff.jobs = 2;
            if (cli::cmd_diff(diff, out, err) != cli::kOk)
                return "diff failed";
            cli::MinimizeOptions mini;
            mini.in_dir = gen.out_dir;
            mini.report_path = (dir / "bypasses.jsonl").string();
            if (cli::cmd_minimize(mini, out, err) != cli::kOk)
                return "minimize failed";
            auto diff_text = read_file(dir / "diff.jsonl");
            auto min_text = read_file(dir / "bypasses.jsonl");
            if (!diff_text.ok() || !min_text.ok())
                return "report read failed";
            return *diff_text + *min_text;
        };
        fs::path base = fs::temp_directory_path() /
                        ("wafdiff_acceptance_" + std::to_string(::getpid()));
        std::error_code ec;
        fs::remove_all(base, ec);
        fs::create_directories(base / "one");
        fs::create_directories(base / "two");
        Bytes first = run_pipeline(base / "one");
        Bytes second = run_pipeline(base / "two");
        c.expect(!first.empty() && first == second,
                 "two pipeline runs produce byte-identical reports");
        fs::remove_all(base, ec);
    }
}

} // namespace

int main() {
    int failed = 0;
    failed += !run_criterion(1, "continuation-request differential", 1.0,
                             criterion_continuation_bypass);
    failed += !run_criterion(2, "normalizer shield over the multipart corpus",
                             10.0, criterion_normalizer_shield);
    failed += !run_criterion(3, "valid corpus acceptance", 0.0,
                             criterion_valid_corpus);
    failed += !run_criterion(4, "golden byte-exact normalization", 0.0,
                             criterion_golden_normalization);
    failed += !run_criterion(5, "mutation class exemplar coverage", 0.0,
                             criterion_class_exemplars);
    failed += !run_criterion(6, "minimizer oracle", 0.0,
                             criterion_minimizer_oracle);
    failed += !run_criterion(7, "property suites", 60.0, criterion_properties);
    if (failed)
        std::printf("%d acceptance criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
