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

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wafdiff/differential.hpp"

namespace wafdiff {

// A bypassing mutant with its minimal mutation subsets and assigned class.
// Every minimal set applied alone to the seed still bypasses; removing any
// element from one loses the bypass.
struct BypassRecord {
    uint64_t request_hash = 0;
    Bytes request_name;
    std::vector<MutationSpec> mutation_set;
    Outcome outcome;
    Bytes waf_id;
    Bytes framework_id;
    std::vector<std::vector<MutationSpec>> minimal_sets;
    std::optional<MutationClass> assigned_class;
    bool unique = false;
};

struct NotABypass {
    Bytes message;
};

// Exhaustive subset search up to 4 specs, greedy single-removal ablation
// beyond; every returned subset is re-verified through run_differential.
Result<std::vector<std::vector<MutationSpec>>, NotABypass>
minimize(const SeedSpec &seed, const std::vector<MutationSpec> &specs,
         const WafModel &waf, const FrameworkModel &fw);

struct AmbiguousClass {
    Bytes message;
};

// The class of the record's minimal set; byte-choice differences map to the
// same class. A minimal set spanning two classes is reported, not guessed.
Result<MutationClass, AmbiguousClass> classify(const BypassRecord &rec);

// Uniqueness key: (class, site kind, waf id, framework id). Keeps the first
// record per key in input order and marks it unique. Idempotent.
std::vector<BypassRecord> dedupe(std::vector<BypassRecord> records);

std::map<MutationClass, int>
per_class_counts(const std::vector<BypassRecord> &records);

} // namespace wafdiff
