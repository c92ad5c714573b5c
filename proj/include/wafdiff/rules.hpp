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

// Restricted pattern language: literal bytes, `[abc]` alternation, and a
// `(?i)` prefix for case-insensitivity. Matching is substring search, so a
// pattern behaves like a smarter `contains`.
class Pattern {
public:
    static Result<Pattern, Bytes> compile(BytesView text);
    bool search(BytesView haystack) const;
    const Bytes &text() const { return text_; }

private:
    struct Item {
        Bytes alternatives; // any one of these octets matches
    };
    Bytes text_;
    bool case_insensitive_ = false;
    std::vector<Item> items_;
};

struct FieldSelector {
    enum class Kind { UrlParameter, Header, AnyParsedField, RawBody };
    Kind kind = Kind::AnyParsedField;
    Bytes name; // for UrlParameter / Header
};

enum class RuleOperator { Equals, Contains, NotEqual, MatchesPattern };
enum class RuleAction { Block, Skip, Challenge };

struct Rule {
    Bytes id;
    FieldSelector selector;
    RuleOperator op = RuleOperator::Contains;
    Bytes value;
    std::optional<Pattern> pattern; // compiled for MatchesPattern
    RuleAction action = RuleAction::Block;
};

// Every (name, value) field the WAF-model parser extracted from a request.
struct InspectionView {
    std::vector<std::pair<Bytes, Bytes>> url_params;
    std::vector<std::pair<Bytes, Bytes>> headers;
    std::vector<std::pair<Bytes, Bytes>> body_fields;
    Bytes raw_body;

    size_t field_count() const {
        return url_params.size() + headers.size() + body_fields.size();
    }
};

struct Verdict {
    enum class Action { Allow, Block };
    Action action = Action::Allow;
    std::optional<Bytes> matched_rule; // present whenever action is Block
    std::optional<RuleAction> raw_action;
    size_t inspected_fields = 0;
};

// First matching rule wins; no match allows. `skip` allows, `challenge`
// counts as block.
Verdict evaluate(const std::vector<Rule> &rules, const InspectionView &view);

// Signature set for the two payload families used throughout: <script in any
// parsed field or the raw body, and a case-insensitive DROP TABLE pattern.
std::vector<Rule> default_signatures();
// The same set without the raw-body rules; models WAFs that only inspect
// fields their body parser extracted.
std::vector<Rule> parsed_field_signatures();

// Line-oriented rule files: `if <selector> <operator> "<value>" then
// <action>`, `#` comments. Selectors: url_parameter "name", header "name",
// any_parsed_field, raw_body.
Result<std::vector<Rule>, Bytes> parse_rules(BytesView text);

} // namespace wafdiff
