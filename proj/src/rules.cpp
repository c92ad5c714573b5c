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

#include "wafdiff/rules.hpp"

#include <sstream>

#include "wafdiff/reject.hpp"

namespace wafdiff {

const char *to_string(RejectCategory c) {
    switch (c) {
    case RejectCategory::DeprecatedFeature: return "DeprecatedFeature";
    case RejectCategory::MalformedFraming: return "MalformedFraming";
    case RejectCategory::MalformedPartHeader: return "MalformedPartHeader";
    case RejectCategory::InvalidBoundary: return "InvalidBoundary";
    case RejectCategory::ControlBytes: return "ControlBytes";
    case RejectCategory::BareLineEnding: return "BareLineEnding";
    case RejectCategory::MissingFinalDelimiter: return "MissingFinalDelimiter";
    case RejectCategory::MalformedBody: return "MalformedBody";
    case RejectCategory::UnparseableContentType: return "UnparseableContentType";
    case RejectCategory::UnsupportedContentType: return "UnsupportedContentType";
    case RejectCategory::NotCanonical: return "NotCanonical";
    }
    return "Unknown";
}

Result<Pattern, Bytes> Pattern::compile(BytesView text) {
    Pattern p;
    p.text_ = Bytes(text);
    BytesView rest = text;
    if (rest.starts_with("(?i)")) {
        p.case_insensitive_ = true;
        rest.remove_prefix(4);
    }
    size_t i = 0;
    while (i < rest.size()) {
        char c = rest[i];
        if (c == '[') {
            size_t close = rest.find(']', i + 1);
            if (close == BytesView::npos)
                return Bytes("unterminated character class");
            if (close == i + 1)
                return Bytes("empty character class");
            Item item;
            item.alternatives = Bytes(rest.substr(i + 1, close - i - 1));
            p.items_.push_back(std::move(item));
            i = close + 1;
            continue;
        }
        if (c == '\\' && i + 1 < rest.size()) {
            p.items_.push_back(Item{Bytes(1, rest[i + 1])});
            i += 2;
            continue;
        }
        p.items_.push_back(Item{Bytes(1, c)});
        ++i;
    }
    if (p.items_.empty())
        return Bytes("empty pattern");
    return p;
}

bool Pattern::search(BytesView haystack) const {
    if (haystack.size() < items_.size())
        return false;
    for (size_t start = 0; start + items_.size() <= haystack.size(); ++start) {
        bool match = true;
        for (size_t k = 0; k < items_.size() && match; ++k) {
            char c = haystack[start + k];
            bool any = false;
            for (char alt : items_[k].alternatives) {
                if (case_insensitive_ ? ascii_lower(c) == ascii_lower(alt)
                                      : c == alt) {
                    any = true;
                    break;
                }
            }
            match = any;
        }
        if (match)
            return true;
    }
    return false;
}

namespace {

bool contains(BytesView haystack, BytesView needle) {
    return haystack.find(needle) != BytesView::npos;
}

bool value_matches(const Rule &rule, BytesView value) {
    switch (rule.op) {
    case RuleOperator::Equals:
        return value == rule.value;
    case RuleOperator::Contains:
        return contains(value, rule.value);
    case RuleOperator::NotEqual:
        return value != rule.value;
    case RuleOperator::MatchesPattern:
        return rule.pattern && rule.pattern->search(value);
    }
    return false;
}

bool rule_matches(const Rule &rule, const InspectionView &view) {
    switch (rule.selector.kind) {
    case FieldSelector::Kind::UrlParameter:
        for (const auto &[name, value] : view.url_params)
            if (name == rule.selector.name && value_matches(rule, value))
                return true;
        return false;
    case FieldSelector::Kind::Header:
        for (const auto &[name, value] : view.headers)
            if (ascii_ieq(name, rule.selector.name) && value_matches(rule, value))
                return true;
        return false;
    case FieldSelector::Kind::AnyParsedField:
        for (const auto &[name, value] : view.url_params)
            if (value_matches(rule, value))
                return true;
        for (const auto &[name, value] : view.body_fields)
            if (value_matches(rule, value))
                return true;
        for (const auto &[name, value] : view.headers)
            if (value_matches(rule, value))
                return true;
        return false;
    case FieldSelector::Kind::RawBody:
        return value_matches(rule, view.raw_body);
    }
    return false;
}

Rule make_rule(Bytes id, FieldSelector::Kind kind, RuleOperator op, Bytes value,
               RuleAction action) {
    Rule r;
    r.id = std::move(id);
    r.selector.kind = kind;
    r.op = op;
    r.value = value;
    if (op == RuleOperator::MatchesPattern) {
        auto p = Pattern::compile(value);
        r.pattern = std::move(*p);
    }
    r.action = action;
    return r;
}

} // namespace

Verdict evaluate(const std::vector<Rule> &rules, const InspectionView &view) {
    Verdict v;
    v.inspected_fields = view.field_count();
    for (const auto &rule : rules) {
        if (!rule_matches(rule, view))
            continue;
        v.raw_action = rule.action;
        if (rule.action == RuleAction::Skip) {
            v.action = Verdict::Action::Allow;
            v.matched_rule = rule.id;
            return v;
        }
        // challenge counts as block for outcome purposes
        v.action = Verdict::Action::Block;
        v.matched_rule = rule.id;
        return v;
    }
    v.action = Verdict::Action::Allow;
    return v;
}

std::vector<Rule> parsed_field_signatures() {
    std::vector<Rule> rules;
    rules.push_back(make_rule("sig-xss-field", FieldSelector::Kind::AnyParsedField,
                              RuleOperator::Contains, "<script",
                              RuleAction::Block));
    rules.push_back(make_rule("sig-sqli-field", FieldSelector::Kind::AnyParsedField,
                              RuleOperator::MatchesPattern, "(?i)drop table",
                              RuleAction::Block));
    return rules;
}

std::vector<Rule> default_signatures() {
    std::vector<Rule> rules = parsed_field_signatures();
    rules.push_back(make_rule("sig-xss-raw", FieldSelector::Kind::RawBody,
                              RuleOperator::Contains, "<script",
                              RuleAction::Block));
    rules.push_back(make_rule("sig-sqli-raw", FieldSelector::Kind::RawBody,
                              RuleOperator::MatchesPattern, "(?i)drop table",
                              RuleAction::Block));
    return rules;
}

namespace {

// Whitespace-separated tokens with double-quoted strings (\" and \\ escapes).
Result<std::vector<Bytes>, Bytes> tokenize_rule_line(BytesView line) {
    std::vector<Bytes> tokens;
    size_t i = 0;
    while (i < line.size()) {
        if (is_ows(line[i])) {
            ++i;
            continue;
        }
        if (line[i] == '"') {
            Bytes tok = "\"";
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char c = line[i];
                if (c == '\\' && i + 1 < line.size()) {
                    tok += line[i + 1];
                    i += 2;
                    continue;
                }
                if (c == '"') {
                    ++i;
                    closed = true;
                    break;
                }
                tok += c;
                ++i;
            }
            if (!closed)
                return Bytes("unterminated quoted value");
            tokens.push_back(tok);
            continue;
        }
        size_t start = i;
        while (i < line.size() && !is_ows(line[i]))
            ++i;
        tokens.push_back(Bytes(line.substr(start, i - start)));
    }
    return tokens;
}

bool is_quoted_token(BytesView t) { return !t.empty() && t[0] == '"'; }
Bytes unquote_token(BytesView t) { return Bytes(t.substr(1)); }

} // namespace

Result<std::vector<Rule>, Bytes> parse_rules(BytesView text) {
    std::vector<Rule> rules;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        BytesView line = eol == BytesView::npos
                             ? text.substr(pos)
                             : text.substr(pos, eol - pos);
        pos = eol == BytesView::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        BytesView trimmed = trim_ows(line);
        if (trimmed.empty() || trimmed[0] == '#')
            continue;

        auto fail = [&](const Bytes &msg) -> Bytes {
            return "line " + std::to_string(line_no) + ": " + msg;
        };
        auto tokens = tokenize_rule_line(trimmed);
        if (!tokens)
            return fail(tokens.error());
        const auto &t = *tokens;
        size_t i = 0;
        auto next = [&]() -> BytesView {
            return i < t.size() ? BytesView(t[i]) : BytesView();
        };
        if (next() != "if")
            return fail("expected 'if'");
        ++i;

        Rule rule;
        rule.id = "rule-" + std::to_string(rules.size() + 1);
        BytesView sel = next();
        ++i;
        if (sel == "url_parameter" || sel == "header") {
            rule.selector.kind = sel == "header"
                                     ? FieldSelector::Kind::Header
                                     : FieldSelector::Kind::UrlParameter;
            if (!is_quoted_token(next()))
                return fail("selector needs a quoted name");
            rule.selector.name = unquote_token(next());
            ++i;
        } else if (sel == "any_parsed_field") {
            rule.selector.kind = FieldSelector::Kind::AnyParsedField;
        } else if (sel == "raw_body") {
            rule.selector.kind = FieldSelector::Kind::RawBody;
        } else {
            return fail("unknown selector");
        }

        BytesView op = next();
        ++i;
        if (op == "equals")
            rule.op = RuleOperator::Equals;
        else if (op == "contains")
            rule.op = RuleOperator::Contains;
        else if (op == "not_equal")
            rule.op = RuleOperator::NotEqual;
        else if (op == "matches_pattern")
            rule.op = RuleOperator::MatchesPattern;
        else
            return fail("unknown operator");

        if (!is_quoted_token(next()))
            return fail("operator needs a quoted value");
        rule.value = unquote_token(next());
        ++i;
        if (rule.op == RuleOperator::MatchesPattern) {
            auto compiled = Pattern::compile(rule.value);
            if (!compiled)
                return fail("bad pattern: " + compiled.error());
            rule.pattern = std::move(*compiled);
        }

        if (next() != "then")
            return fail("expected 'then'");
        ++i;
        BytesView action = next();
        ++i;
        if (action == "block")
            rule.action = RuleAction::Block;
        else if (action == "skip")
            rule.action = RuleAction::Skip;
        else if (action == "challenge")
            rule.action = RuleAction::Challenge;
        else
            return fail("unknown action");
        if (i != t.size())
            return fail("trailing tokens");
        rules.push_back(std::move(rule));
    }
    return rules;
}

} // namespace wafdiff
