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

#include <filesystem>
#include <vector>

#include "wafdiff/differential.hpp"
#include "wafdiff/minimize.hpp"
#include "wafdiff/mutation.hpp"

namespace wafdiff {

// A corpus directory is any directory of `.http` files: exact request
// octets, CRLF-significant. The manifest (JSONL, one record per mutant)
// carries each file's mutation provenance plus the seed parameters.

struct FileError {
    Bytes message;
};

Result<Bytes, FileError> read_file(const std::filesystem::path &p);
Result<bool, Bytes> write_file(const std::filesystem::path &p, BytesView data);

Result<bool, Bytes> write_corpus(const std::filesystem::path &dir,
                                 const std::vector<CorpusEntry> &entries);

Result<std::vector<CorpusEntry>, Bytes>
read_corpus_with_manifest(const std::filesystem::path &dir);

// Plain `.http` files, sorted by file name; specs/seed left empty.
Result<std::vector<CorpusEntry>, Bytes>
read_http_dir(const std::filesystem::path &dir);

Bytes manifest_line(const CorpusEntry &e);
Bytes matrix_record_line(const MatrixRecord &r);
Bytes bypass_record_line(const BypassRecord &r);

} // namespace wafdiff
