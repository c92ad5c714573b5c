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

#include <variant>
#include <vector>

#include "wafdiff/http_model.hpp"
#include "wafdiff/reject.hpp"

namespace wafdiff {

enum class ChangeKind {
    CaseFolded,
    WhitespaceCanonicalized,
    QuoteNormalized,
    LineEndingFixed,
    PartContentTypeInserted,
    LengthRecomputed,
    TrailingBytesDropped,
};

const char *to_string(ChangeKind k);

struct ChangeNote {
    ChangeKind kind;
    Bytes location;
};

struct NormalizerPolicy {
    enum class Mode { Normalize, RejectOnly };
    enum class UnknownContentType { PassThrough, Reject };

    Mode mode = Mode::Normalize;
    UnknownContentType unknown_content_type = UnknownContentType::PassThrough;
    bool recompute_length = true;
    bool inject_client_headers = false;
    bool normalize_multipart = true;
    bool normalize_json = true;
    bool normalize_xml = true;
    size_t max_body_bytes = kMaxRequestBytes;
};

struct Normalized {
    RawRequest request;
    std::vector<ChangeNote> changes;

    bool has_change(ChangeKind k) const;
};

struct PassedThrough {
    Bytes why;
};

// Either a canonical equivalent of the input, a typed rejection, or (for
// out-of-scope content types in pass-through mode) the input untouched.
// Normalized output always re-parses strictly to an identical canonical
// structure; it is never malformed.
struct NormalizationOutcome {
    std::variant<Normalized, RejectReason, PassedThrough> v;

    bool is_normalized() const { return std::holds_alternative<Normalized>(v); }
    bool is_rejected() const { return std::holds_alternative<RejectReason>(v); }
    bool is_passed_through() const { return std::holds_alternative<PassedThrough>(v); }
    const Normalized &normalized() const { return std::get<Normalized>(v); }
    const RejectReason &rejected() const { return std::get<RejectReason>(v); }
    const PassedThrough &passed_through() const { return std::get<PassedThrough>(v); }
};

NormalizationOutcome normalize(const RawRequest &req,
                               const NormalizerPolicy &policy);

NormalizerPolicy normalize_policy_default();

// Key-value policy files: mode, unknown_content_type, recompute_length,
// inject_client_headers, normalize_multipart/json/xml, max_body_bytes.
Result<NormalizerPolicy, Bytes> parse_policy(BytesView text);

} // namespace wafdiff
