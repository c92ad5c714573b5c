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

#include "wafdiff/bytes.hpp"
#include "wafdiff/result.hpp"

namespace wafdiff {

// Hard safety bounds for anything we parse; exceeding them is a structural
// error, not a soft failure.
inline constexpr size_t kMaxRequestBytes = 16u * 1024 * 1024;
inline constexpr size_t kMaxHeaderCount = 256;

// Which terminator ended a given line. Bare LF is accepted on parse so that
// mutated requests survive a parse/serialize cycle; strict layers can still
// reject it.
enum class LineEnding { Crlf, Lf };

BytesView line_ending_bytes(LineEnding e);

// One header line, byte-faithful. `name` may hold arbitrary octets (mutations
// produce malformed names, and a line without a colon is stored with the
// whole line as its name and empty separator/value). `sep` is the colon plus
// any whitespace that followed it.
struct HeaderField {
    Bytes name;
    Bytes sep;
    Bytes value;
    LineEnding ending = LineEnding::Crlf;

    Bytes line() const { return name + sep + value; }
};

// An HTTP/1.1 request as received; serializing an unmodified instance
// reproduces the input octets exactly.
struct RawRequest {
    Bytes method;
    Bytes target;
    LineEnding request_line_ending = LineEnding::Crlf;
    std::vector<HeaderField> headers;
    LineEnding blank_line_ending = LineEnding::Crlf;
    Bytes body;

    // First header whose name matches case-insensitively; nullptr if absent.
    const HeaderField *find_header(BytesView name) const;
    HeaderField *find_header(BytesView name);
    std::optional<BytesView> header_value(BytesView name) const;
    bool used_bare_lf() const;
};

struct StructuralError {
    size_t offset = 0;
    Bytes message;
};

enum class RecomputeLength { Off, On };

Result<RawRequest, StructuralError> parse_request(BytesView octets);
Bytes serialize_request(const RawRequest &req,
                        RecomputeLength recompute = RecomputeLength::Off);

// ---------------------------------------------------------------------------
// Media types (Content-Type values)

struct MediaTypeParam {
    Bytes name; // base attribute name, lowercase, continuation suffix removed
    Bytes value;
    bool quoted = false;
    // N from a raw attribute of the form `name*N`; segments are annotated but
    // never joined here. Joining is a lenient-profile behaviour.
    std::optional<int> continuation_index;
};

struct MediaType {
    Bytes type;    // lowercase token
    Bytes subtype; // lowercase token
    std::vector<MediaTypeParam> parameters;

    bool is(BytesView t, BytesView st) const {
        return type == t && subtype == st;
    }
    const MediaTypeParam *first_param(BytesView name) const;
    bool has_continuation() const;
};

struct MediaTypeError {
    size_t offset = 0;
    Bytes message;
};

// Strict parse per the MIME grammar: tokens or quoted strings only, no empty
// parameter segments, no control octets outside quoted pairs.
Result<MediaType, MediaTypeError> parse_media_type(BytesView value);

// Lowercased type/subtype, `; name=value` with one space after each
// semicolon, values quoted only when not valid tokens. Idempotent.
Bytes media_type_canonical(const MediaType &mt);

bool is_tchar(unsigned char c);
bool is_token(BytesView s);

} // namespace wafdiff
