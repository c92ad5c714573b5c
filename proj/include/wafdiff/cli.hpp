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

#include <ostream>

#include "wafdiff/corpus.hpp"
#include "wafdiff/proxy.hpp"

namespace wafdiff::cli {

// Exit codes shared by every subcommand: 0 success, 1 per-item failure,
// 2 bad flags or configuration.
inline constexpr int kOk = 0;
inline constexpr int kItemFailure = 1;
inline constexpr int kUsageError = 2;

struct GenerateOptions {
    Bytes out_dir;
    Bytes classes = "all"; // all | multipart | json | xml | comma list
    int per_class = 5;
    uint64_t seed = 42;
    int stack = 1;
    Bytes payload; // empty: per-content-type default
};

struct NormalizeOptions {
    Bytes input; // .http file or corpus directory
    Bytes out_dir;
    Bytes policy_file;
};

struct DiffOptions {
    Bytes in_dir;
    Bytes wafs = "fail-open-strict";
    Bytes frameworks = "all";
    Bytes rules_file;
    Bytes report_path;
    int jobs = 1;
};

struct MinimizeOptions {
    Bytes in_dir; // corpus with manifest
    Bytes waf = "fail-open-strict";
    Bytes frameworks = "all";
    Bytes report_path;
};

struct ReportOptions {
    Bytes records_path; // diff or minimize output
};

int cmd_generate(const GenerateOptions &opts, std::ostream &out,
                 std::ostream &err);
int cmd_normalize(const NormalizeOptions &opts, std::ostream &out,
                  std::ostream &err);
int cmd_diff(const DiffOptions &opts, std::ostream &out, std::ostream &err);
int cmd_minimize(const MinimizeOptions &opts, std::ostream &out,
                 std::ostream &err);
int cmd_report(const ReportOptions &opts, std::ostream &out,
               std::ostream &err);

Result<std::vector<WafModel>, Bytes> resolve_wafs(BytesView csv,
                                                  BytesView rules_file);
Result<std::vector<FrameworkModel>, Bytes> resolve_frameworks(BytesView csv);
Result<std::vector<MutationClass>, Bytes> resolve_classes(BytesView csv);

} // namespace wafdiff::cli
