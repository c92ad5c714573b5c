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

#include "wafdiff/minimize.hpp"

#include <algorithm>
#include <set>

namespace wafdiff {

namespace {

// Subset application keeps the original spec order; site indices refer to
// the same intermediate chain they were generated against, so a subset whose
// edits no longer apply simply does not bypass.
bool subset_bypasses(const SeedSpec &seed, const std::vector<MutationSpec> &specs,
                     const std::vector<size_t> &subset, const WafModel &waf,
                     const FrameworkModel &fw) {
    std::vector<MutationSpec> chosen;
    for (size_t idx : subset)
        chosen.push_back(specs[idx]);
    auto mutant = build_mutant(seed, chosen);
    if (!mutant)
        return false;
    Bytes payload = seed.payload;
    Outcome o = run_differential(*mutant, waf, fw, payload);
    return o.kind == Outcome::Kind::Bypass;
}

} // namespace

Result<std::vector<std::vector<MutationSpec>>, NotABypass>
minimize(const SeedSpec &seed, const std::vector<MutationSpec> &specs,
         const WafModel &waf, const FrameworkModel &fw) {
    const size_t n = specs.size();
    if (n == 0)
        return NotABypass{"empty mutation set"};
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i)
        all[i] = i;
    if (!subset_bypasses(seed, specs, all, waf, fw))
        return NotABypass{"the full mutation set does not bypass"};

    std::vector<std::vector<MutationSpec>> minimal;

    if (n <= 4) {
        // Exhaustive: a subset is minimal when it bypasses and no proper
        // subset of it does.
        std::vector<bool> bypasses(size_t(1) << n, false);
        for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
            std::vector<size_t> subset;
            for (size_t i = 0; i < n; ++i)
                if (mask & (size_t(1) << i))
                    subset.push_back(i);
            bypasses[mask] = subset_bypasses(seed, specs, subset, waf, fw);
        }
        for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
            if (!bypasses[mask])
                continue;
            bool has_smaller = false;
            for (size_t sub = (mask - 1) & mask; sub != 0 && !has_smaller;
                 sub = (sub - 1) & mask)
                has_smaller = bypasses[sub];
            if (has_smaller)
                continue;
            std::vector<MutationSpec> set;
            for (size_t i = 0; i < n; ++i)
                if (mask & (size_t(1) << i))
                    set.push_back(specs[i]);
            minimal.push_back(std::move(set));
        }
        return minimal;
    }

    // Greedy single-removal ablation; approximate beyond four specs.
    std::vector<size_t> current = all;
    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        for (size_t i = 0; i < current.size(); ++i) {
            std::vector<size_t> candidate = current;
            candidate.erase(candidate.begin() + static_cast<long>(i));
            if (!candidate.empty() &&
                subset_bypasses(seed, specs, candidate, waf, fw)) {
                current = std::move(candidate);
                shrunk = true;
                break;
            }
        }
    }
    std::vector<MutationSpec> set;
    for (size_t idx : current)
        set.push_back(specs[idx]);
    minimal.push_back(std::move(set));
    return minimal;
}

Result<MutationClass, AmbiguousClass> classify(const BypassRecord &rec) {
    if (rec.minimal_sets.empty())
        return AmbiguousClass{"record has no minimal sets"};
    std::set<MutationClass> classes;
    for (const auto &spec : rec.minimal_sets.front())
        classes.insert(spec.cls);
    if (classes.size() != 1)
        return AmbiguousClass{"minimal set spans " +
                              std::to_string(classes.size()) + " classes"};
    return *classes.begin();
}

std::vector<BypassRecord> dedupe(std::vector<BypassRecord> records) {
    std::set<std::tuple<int, Bytes, Bytes, Bytes>> seen;
    std::vector<BypassRecord> out;
    for (auto &rec : records) {
        if (!rec.assigned_class) {
            // unclassifiable records are kept but never marked unique
            rec.unique = false;
            out.push_back(std::move(rec));
            continue;
        }
        auto key = std::make_tuple(
            static_cast<int>(*rec.assigned_class),
            Bytes(to_string(class_site_kind(*rec.assigned_class))), rec.waf_id,
            rec.framework_id);
        if (seen.count(key))
            continue;
        seen.insert(key);
        rec.unique = true;
        out.push_back(std::move(rec));
    }
    return out;
}

std::map<MutationClass, int>
per_class_counts(const std::vector<BypassRecord> &records) {
    std::map<MutationClass, int> counts;
    for (const auto &rec : records)
        if (rec.assigned_class && rec.unique)
            ++counts[*rec.assigned_class];
    return counts;
}

} // namespace wafdiff
