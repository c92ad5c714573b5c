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
#include <vector>

#include "wafdiff/http_model.hpp"
#include "wafdiff/reject.hpp"
#include "wafdiff/result.hpp"

namespace wafdiff {

// One form-data part. Under strict parsing the name is non-empty and free of
// control octets and the body is the exact payload slice between framing
// delimiters, with no trailing CRLF. Lenient parsing may retain control
// octets in names when the profile tolerates them.
struct Part {
    Bytes name;
    std::optional<Bytes> filename;
    std::optional<MediaType> content_type;
    Bytes body;
};

struct MultipartBody {
    Bytes boundary; // unquoted value, 1-70 octets of the bchars set
    std::vector<Part> parts;
};

bool is_valid_boundary(BytesView b);

// Tolerances modelling how permissive framework parsers accept malformed
// input. The all-default ("strictest") profile accepts exactly the strict
// parser's language.
struct LeniencyProfile {
    enum class BoundaryPick { First, Last, Joined };

    bool join_continuation_params = false;
    BoundaryPick boundary_pick = BoundaryPick::First;
    bool tolerate_control_in_headers = false;
    bool tolerate_missing_final_delimiter = false;
    bool tolerate_bare_lf = false;
    std::vector<unsigned char> header_separator_chars;

    bool is_strictest() const;
    static LeniencyProfile strictest() { return {}; }
    // Everything tolerated, joined-boundary continuation honoured.
    static LeniencyProfile permissive();
};

// Lexical deviations observed while strict-parsing an accepted body; the
// normalizer turns these into change notes.
struct MultipartParseNotes {
    bool case_deviation = false;
    bool whitespace_deviation = false;
    bool quote_deviation = false;
    size_t epilogue_dropped = 0; // trailing CRLF/LWSP octets after the close
};

struct MultipartStrictParse {
    MultipartBody body;
    MultipartParseNotes notes;
};

// Strict ABNF-conformant parse. ct must be multipart/form-data. Exactly one
// RejectReason per failure, deterministic. Whitespace-only epilogues are
// dropped (and counted); anything else outside the framing is rejected.
Result<MultipartStrictParse, RejectReason>
parse_multipart_strict(BytesView body, const MediaType &ct);

// CRLF throughout, canonical Content-Disposition first, Content-Type next
// (text/plain inserted when a filename is present and the part had no type),
// close delimiter with no trailing line ending. A fixed point under
// parse_multipart_strict.
Bytes serialize_multipart_canonical(const MultipartBody &mp);

Result<MultipartBody, LenientError>
parse_multipart_lenient(BytesView body, const MediaType &ct,
                        const LeniencyProfile &profile);

} // namespace wafdiff
