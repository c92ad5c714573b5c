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

#include "wafdiff/json_codec.hpp"
#include "wafdiff/multipart.hpp"
#include "wafdiff/mutation.hpp"
#include "wafdiff/rules.hpp"
#include "wafdiff/xml_codec.hpp"

namespace wafdiff {

// The WAF side of the differential: strict codecs feeding a rule list. On a
// body it cannot strict-parse, a fail-open model allows the request with no
// body fields; a fail-closed model blocks it outright.
struct WafModel {
    Bytes id;
    std::vector<Rule> rules;
    bool fail_closed = false;

    struct Decision {
        bool blocked = false;
        std::optional<Bytes> rule_id;
        // The request carried a body the strict parse could not account for
        // (unparseable/missing Content-Type included).
        bool body_parse_failed = false;
        InspectionView view;
    };

    Decision decide(const RawRequest &req) const;
};

WafModel waf_fail_open_strict();   // parsed-field signatures only
WafModel waf_fail_closed_strict(); // same rules, blocks on parse failure
WafModel waf_raw_scan();           // full default signatures incl. raw body

// The framework side: lenient profiles plus the header-recovery behaviour of
// real parsers (finding a usable media type in malformed or misplaced
// headers, or parsing the expected type without one).
struct FrameworkModel {
    enum class PayloadFieldPolicy { AnyField, NamedField };

    Bytes name;
    std::optional<LeniencyProfile> multipart_profile;
    std::optional<JsonLeniency> json_profile;
    std::optional<XmlLeniency> xml_profile;
    PayloadFieldPolicy payload_field_policy = PayloadFieldPolicy::AnyField;
    Bytes payload_field_name; // for NamedField

    // Parsed (path, value) fields, or nullopt when no profile can recover a
    // structure from the request.
    std::optional<std::vector<std::pair<Bytes, Bytes>>>
    parse_fields(const RawRequest &req) const;
};

// Presets are named for what they tolerate; none claims to replicate a
// specific real framework.
FrameworkModel framework_joined_boundary_tolerant();
FrameworkModel framework_control_char_tolerant_json();
FrameworkModel framework_lenient_xml();
FrameworkModel framework_strict_mirror();
std::vector<FrameworkModel> default_frameworks();
std::optional<FrameworkModel> framework_by_name(BytesView name);

struct Outcome {
    enum class Kind { Blocked, Bypass, Malformed, BenignPass };
    Kind kind = Kind::Malformed;
    Bytes rule_id;    // Blocked
    Bytes framework;  // Bypass
    Bytes field_path; // Bypass
};

const char *to_string(Outcome::Kind k);

// Bypass requires all three: the WAF allows, the framework parses, and the
// payload octets appear in a parsed field. A fail-open allow caused by parse
// failure that yields no payload is Malformed; an allow where both sides
// parsed but the payload never surfaced is BenignPass.
Outcome run_differential(const RawRequest &req, const WafModel &waf,
                         const FrameworkModel &fw, BytesView payload);

struct MatrixRecord {
    Bytes request_name;
    uint64_t request_hash = 0;
    Bytes waf_id;
    Bytes framework_id;
    Outcome outcome;
};

// One record per (request, waf, framework), canonically ordered by
// (request hash, waf, framework). jobs > 1 parallelizes; output order is
// unaffected.
std::vector<MatrixRecord> run_matrix(const std::vector<CorpusEntry> &corpus,
                                     const std::vector<WafModel> &wafs,
                                     const std::vector<FrameworkModel> &fws,
                                     int jobs = 1);

} // namespace wafdiff
