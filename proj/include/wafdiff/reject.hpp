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

#include <optional>

#include "wafdiff/bytes.hpp"

namespace wafdiff {

// Why a strict parser or the normalizer refused an input. The multipart
// parser emits only its seven categories; MalformedBody is the JSON/XML
// strict-reject, and the last three are normalizer-level.
enum class RejectCategory {
    DeprecatedFeature,
    MalformedFraming,
    MalformedPartHeader,
    InvalidBoundary,
    ControlBytes,
    BareLineEnding,
    MissingFinalDelimiter,
    MalformedBody,
    UnparseableContentType,
    UnsupportedContentType,
    NotCanonical,
};

const char *to_string(RejectCategory c);

struct RejectReason {
    RejectCategory category;
    Bytes detail;
    std::optional<size_t> offset;
};

// Non-fatal failure of a lenient parser: even the given profile could not
// recover a usable structure.
struct LenientError {
    Bytes message;
};

} // namespace wafdiff
