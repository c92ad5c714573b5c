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

#include <utility>
#include <vector>

#include "wafdiff/bytes.hpp"
#include "wafdiff/reject.hpp"
#include "wafdiff/result.hpp"

namespace wafdiff {

// Parsed JSON value. Object member order is preserved and duplicate names are
// kept. Numbers carry their exact source text; canonical serialization
// re-emits it unchanged.
struct JsonValue {
    enum class Kind { Object, Array, String, Number, Boolean, Null };

    Kind kind = Kind::Null;
    std::vector<std::pair<Bytes, JsonValue>> members; // Object
    std::vector<JsonValue> items;                     // Array
    Bytes str;                                        // String (raw bytes)
    Bytes number_text;                                // Number source text
    bool boolean = false;

    static JsonValue object() { return JsonValue{Kind::Object, {}, {}, {}, {}, false}; }
    static JsonValue array() { return JsonValue{Kind::Array, {}, {}, {}, {}, false}; }
    static JsonValue string(Bytes s) { return JsonValue{Kind::String, {}, {}, std::move(s), {}, false}; }
    static JsonValue number(Bytes text) { return JsonValue{Kind::Number, {}, {}, {}, std::move(text), false}; }
    static JsonValue number(long long n);
    static JsonValue boolean_value(bool b) { return JsonValue{Kind::Boolean, {}, {}, {}, {}, b}; }
    static JsonValue null() { return JsonValue{}; }

    JsonValue &add(Bytes name, JsonValue v); // object member, returns *this
    JsonValue &push(JsonValue v);            // array item, returns *this
    const JsonValue *find(BytesView name) const;
};

bool operator==(const JsonValue &a, const JsonValue &b);

struct JsonLeniency {
    bool allow_unescaped_control_in_strings = false;
    bool allow_missing_closing_quote = false;
    std::vector<unsigned char> bytes_between_name_and_colon;

    bool is_strict() const;
    static JsonLeniency strict() { return {}; }
    static JsonLeniency permissive();
};

// Accepts exactly RFC 8259 texts; rejection carries the offset of the first
// violation as RejectReason{MalformedBody}.
Result<JsonValue, RejectReason> parse_json_strict(BytesView body);

Result<JsonValue, LenientError> parse_json_lenient(BytesView body,
                                                   const JsonLeniency &p);

// Minimal whitespace, every control character escaped as \u00XX, number
// source text preserved. parse_json_strict(serialize(v)) == v.
Bytes serialize_json_canonical(const JsonValue &v);

// (path, text) pairs for payload inspection: strings yield their bytes,
// numbers/booleans/null their source text. Paths join members with '/' and
// use the item index for arrays.
std::vector<std::pair<Bytes, Bytes>> flatten_json_fields(const JsonValue &v);

} // namespace wafdiff
