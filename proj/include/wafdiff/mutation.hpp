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
#include "wafdiff/result.hpp"

namespace wafdiff {

// The closed set of 24 bypass transformations: 12 multipart, 5 JSON, 7 XML.
enum class MutationClass {
    // multipart
    BoundaryDelimiterManipulation,
    ContentDispositionDisruption,
    DistortedHeaderInjectionToBody,
    ContentTypeTweakInBody,
    CharsetValueAlterationInBody,
    HeaderSeparatorManipulationInBody,
    ContentTypeParameterTweak,
    BoundaryDelimiterRemoval,
    LinefeedRemoval,
    WhitespaceAlteration,
    DisruptedBodyField,
    BoundaryHeaderTampering,
    // xml
    ExtraFieldAddition,
    DoctypeClosureConfusion,
    SchemaClosureManipulation,
    NewlineAbuse,
    ContentTypeHeaderParameterRemoval,
    ContentTypeHeaderReplacement,
    MisplacedField,
    // json
    ContentTypeRemoval,
    FieldWrapperManipulation,
    DoubleQuoteReplacement,
    FieldNameHack,
    ContentTypeParameterManipulation,
};

inline constexpr int kMutationClassCount = 24;

const char *class_name(MutationClass c);
std::optional<MutationClass> class_from_name(BytesView name);
std::vector<MutationClass> all_mutation_classes();
std::vector<MutationClass> multipart_mutation_classes();
std::vector<MutationClass> json_mutation_classes();
std::vector<MutationClass> xml_mutation_classes();

enum class SeedContentType { Multipart, Json, Xml };
SeedContentType class_content_type(MutationClass c);
bool class_requires_continuation(MutationClass c);

// Coarse location of a class's edit, part of the unique-bypass key: the same
// flavour of tweak counts separately at the global-header vs part-header
// level.
enum class SiteKind { GlobalHeader, BodyFraming, PartHeader, BodyField };
SiteKind class_site_kind(MutationClass c);
const char *to_string(SiteKind k);

inline constexpr const char kXssPayload[] =
    "<script>alert(document.cookie)</script>";
inline constexpr const char kSqliPayload[] = "DROP TABLE users";

struct SeedSpec {
    SeedContentType content_type = SeedContentType::Multipart;
    Bytes payload = kXssPayload;
    Bytes field_name = "field1";
    int extra_benign_fields = 0;
};

Bytes default_payload_for(SeedContentType t);

// One concrete transformation: which class, which eligible location (lexical
// by byte offset), and which octet(s) to use. An empty byte choice means the
// class's deletion variant where one exists.
struct MutationSpec {
    MutationClass cls;
    int site_index = 0;
    Bytes byte_choice;
    bool requires_continuation = false;
};

// A reversible splice against the serialized request octets. Re-inserting
// `removed` at `offset` (after dropping `inserted`) restores the input.
struct Splice {
    size_t offset = 0;
    Bytes removed;
    Bytes inserted;
};

struct AppliedMutation {
    RawRequest request;
    std::vector<Splice> edits;
};

struct InapplicableError {
    Bytes message;
};

// A strict-valid request carrying the payload exactly once, blocked by the
// default signatures before any mutation. XML payloads containing markup
// are wrapped in CDATA so the seed stays well-formed.
RawRequest generate_seed(const SeedSpec &s);

// Seed plus whatever the class's edit site presupposes: a charset-bearing
// part Content-Type, continuation-form boundary, a DOCTYPE, or a benign
// sibling field.
RawRequest prepare_seed(const SeedSpec &s, MutationClass c);

Result<AppliedMutation, InapplicableError>
apply_mutation(const RawRequest &req, const MutationSpec &spec);

// Replaces the boundary with a fake value plus a split continuation of the
// real one, and reframes the body as a benign fake-boundary section followed
// by the payload part (named "id") inside real-boundary framing.
RawRequest rewrite_to_continuation(const RawRequest &req,
                                   BytesView real_boundary,
                                   BytesView fake_boundary,
                                   std::optional<size_t> split = {});

// Rebuilds seed -> enriched seed -> each spec in order. Site indices refer to
// the intermediate request they are applied to.
Result<RawRequest, InapplicableError>
build_mutant(const SeedSpec &seed, const std::vector<MutationSpec> &specs);

struct CorpusEntry {
    Bytes name; // stable file-style name, e.g. "m0007_linefeed_removal"
    RawRequest request;
    std::vector<MutationSpec> specs;
    SeedSpec seed;
};

struct CorpusOptions {
    std::vector<MutationClass> classes;
    int per_class = 5;
    uint64_t rng_seed = 42;
    int stack = 1; // 2..3 stacks extra same-content-type specs per mutant
    std::optional<Bytes> payload; // default: per content type
};

// Deterministic for a given rng seed; byte choices come from the documented
// set {0x00, 0x01, 0x02, 0x09, 0x0B} plus class-specific variants.
std::vector<CorpusEntry> generate_corpus(const CorpusOptions &opts);

// Hand-built exemplar per class, matching the documented byte patterns for
// that class (exact body bytes where the class prescribes them).
struct Exemplar {
    MutationClass cls;
    RawRequest request;
    Bytes payload;
    std::vector<Bytes> must_contain;     // literal fragments in the octets
    std::vector<Bytes> must_not_contain;
};

Exemplar class_exemplar(MutationClass c);

} // namespace wafdiff
