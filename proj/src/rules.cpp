#include "sadp/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "sadp/errors.hpp"

namespace sadp {

ValueKind kind_of(const Value& v) {
    switch (v.index()) {
        case 0: return ValueKind::Number;
        case 1: return ValueKind::Boolean;
        default: return ValueKind::String;
    }
}

std::string_view to_string(ValueKind k) {
    switch (k) {
        case ValueKind::Number: return "number";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::String: return "string";
    }
    return "?";
}

std::string describe(const Value& v) {
    std::ostringstream out;
    if (const auto* n = std::get_if<NumberValue>(&v)) {
        out << n->value;
        if (!n->unit.empty()) out << " " << n->unit;
    } else if (const auto* b = std::get_if<bool>(&v)) {
        out << (*b ? "true" : "false");
    } else {
        out << '"' << std::get<std::string>(v) << '"';
    }
    return out.str();
}

std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::Greater: return ">";
        case Comparator::GreaterEqual: return ">=";
        case Comparator::Less: return "<";
        case Comparator::LessEqual: return "<=";
        case Comparator::Equal: return "==";
        case Comparator::NotEqual: return "!=";
    }
    return "?";
}

bool parse_comparator(std::string_view text, Comparator& out) {
    if (text == ">") {
        out = Comparator::Greater;
    } else if (text == ">=") {
        out = Comparator::GreaterEqual;
    } else if (text == "<") {
        out = Comparator::Less;
    } else if (text == "<=") {
        out = Comparator::LessEqual;
    } else if (text == "==") {
        out = Comparator::Equal;
    } else if (text == "!=") {
        out = Comparator::NotEqual;
    } else {
        return false;
    }
    return true;
}

std::string_view to_string(ModalityDecision d) {
    switch (d) {
        case ModalityDecision::Skip: return "skip";
        case ModalityDecision::UseNormal: return "normal";
        case ModalityDecision::UseLowPower: return "low-power";
        case ModalityDecision::UseHighPerformance: return "high-performance";
    }
    return "?";
}

bool parse_decision(std::string_view text, ModalityDecision& out) {
    if (text == "skip") {
        out = ModalityDecision::Skip;
    } else if (text == "normal") {
        out = ModalityDecision::UseNormal;
    } else if (text == "low-power") {
        out = ModalityDecision::UseLowPower;
    } else if (text == "high-performance") {
        out = ModalityDecision::UseHighPerformance;
    } else {
        return false;
    }
    return true;
}

Modality decision_modality(ModalityDecision d) {
    switch (d) {
        case ModalityDecision::UseLowPower: return Modality::LowPower;
        case ModalityDecision::UseHighPerformance: return Modality::HighPerformance;
        default: return Modality::Normal;
    }
}

std::string_view to_string(HitPolicy p) {
    return p == HitPolicy::First ? "first" : "unique";
}

bool parse_hit_policy(std::string_view text, HitPolicy& out) {
    if (text == "first") {
        out = HitPolicy::First;
    } else if (text == "unique") {
        out = HitPolicy::Unique;
    } else {
        return false;
    }
    return true;
}

const InputDecl* DecisionTable::find_input(std::string_view name) const {
    for (const auto& input : inputs) {
        if (input.name == name) return &input;
    }
    return nullptr;
}

namespace {

bool compare_numbers(double lhs, Comparator cmp, double rhs) {
    switch (cmp) {
        case Comparator::Greater: return lhs > rhs;
        case Comparator::GreaterEqual: return lhs >= rhs;
        case Comparator::Less: return lhs < rhs;
        case Comparator::LessEqual: return lhs <= rhs;
        case Comparator::Equal: return lhs == rhs;
        case Comparator::NotEqual: return lhs != rhs;
    }
    return false;
}

bool is_ordering(Comparator cmp) {
    return cmp != Comparator::Equal && cmp != Comparator::NotEqual;
}

}  // namespace

bool evaluate_condition(const Condition& cond, const ContextSnapshot& ctx) {
    auto it = ctx.variables.find(cond.variable);
    if (it == ctx.variables.end()) {
        throw SadpError(ErrorCode::MissingVariable,
                        "context variable '" + cond.variable + "' is not set", cond.variable);
    }
    const Value& actual = it->second;
    if (kind_of(actual) != kind_of(cond.literal)) {
        throw SadpError(ErrorCode::KindMismatch,
                        "variable '" + cond.variable + "' is " +
                            std::string(to_string(kind_of(actual))) + " but the condition expects " +
                            std::string(to_string(kind_of(cond.literal))),
                        cond.variable);
    }
    if (const auto* expected = std::get_if<NumberValue>(&cond.literal)) {
        const auto& number = std::get<NumberValue>(actual);
        if (number.unit != expected->unit) {
            throw SadpError(ErrorCode::UnitMismatch,
                            "variable '" + cond.variable + "' carries unit '" + number.unit +
                                "' but the condition expects '" + expected->unit + "'",
                            cond.variable);
        }
        return compare_numbers(number.value, cond.comparator, expected->value);
    }
    if (is_ordering(cond.comparator)) {
        throw SadpError(ErrorCode::KindMismatch,
                        "ordering comparator '" + std::string(to_string(cond.comparator)) +
                            "' is not defined for " + std::string(to_string(kind_of(actual))) +
                            " variable '" + cond.variable + "'",
                        cond.variable);
    }
    const bool equal = actual == cond.literal;
    return cond.comparator == Comparator::Equal ? equal : !equal;
}

namespace {

bool rule_matches(const Rule& rule, const ContextSnapshot& ctx) {
    return std::all_of(rule.conditions.begin(), rule.conditions.end(),
                       [&](const Condition& c) { return evaluate_condition(c, ctx); });
}

void check_context_against_inputs(const DecisionTable& table, const ContextSnapshot& ctx) {
    for (const auto& input : table.inputs) {
        auto it = ctx.variables.find(input.name);
        if (it == ctx.variables.end()) {
            throw SadpError(ErrorCode::MissingVariable,
                            "table '" + table.id + "' declares input '" + input.name +
                                "' which the context does not supply",
                            table.id);
        }
        if (kind_of(it->second) != input.kind) {
            throw SadpError(ErrorCode::KindMismatch,
                            "table '" + table.id + "' declares input '" + input.name + "' as " +
                                std::string(to_string(input.kind)) + " but the context holds " +
                                std::string(to_string(kind_of(it->second))),
                            table.id);
        }
        if (const auto* n = std::get_if<NumberValue>(&it->second)) {
            if (n->unit != input.unit) {
                throw SadpError(ErrorCode::UnitMismatch,
                                "table '" + table.id + "' declares input '" + input.name +
                                    "' in unit '" + input.unit + "' but the context carries '" +
                                    n->unit + "'",
                                table.id);
            }
        }
    }
}

}  // namespace

ModalityDecision evaluate_table(const DecisionTable& table, const ContextSnapshot& ctx) {
    check_context_against_inputs(table, ctx);

    if (table.hit_policy == HitPolicy::First) {
        for (const auto& rule : table.rules) {
            if (rule_matches(rule, ctx)) return rule.output;
        }
        return table.default_output;
    }

    // Unique: every matching rule must agree there is only one.
    const Rule* hit = nullptr;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < table.rules.size(); ++i) {
        const Rule& rule = table.rules[i];
        if (!rule_matches(rule, ctx)) continue;
        labels.push_back(rule.label.empty() ? "#" + std::to_string(i + 1) : rule.label);
        if (hit == nullptr) hit = &rule;
    }
    if (labels.size() > 1) {
        std::string joined;
        for (const auto& l : labels) {
            if (!joined.empty()) joined += ", ";
            joined += l;
        }
        throw SadpError(ErrorCode::NonUniqueHit,
                        "unique-policy table '" + table.id + "' matched rules: " + joined,
                        table.id);
    }
    return hit ? hit->output : table.default_output;
}

namespace {

// Closed/open interval built from a conjunction of numeric constraints on one
// variable. `empty` marks contradictions like x > 5 && x < 3.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    bool lo_strict = false;
    double hi = std::numeric_limits<double>::infinity();
    bool hi_strict = false;
    bool empty = false;

    void tighten_lo(double v, bool strict) {
        if (v > lo || (v == lo && strict && !lo_strict)) {
            lo = v;
            lo_strict = strict;
        }
    }
    void tighten_hi(double v, bool strict) {
        if (v < hi || (v == hi && strict && !hi_strict)) {
            hi = v;
            hi_strict = strict;
        }
    }
    void normalize() {
        if (lo > hi || (lo == hi && (lo_strict || hi_strict))) empty = true;
    }

    // True when every point of `inner` lies inside *this.
    bool contains(const Interval& inner) const {
        if (inner.empty) return true;
        if (empty) return false;
        const bool lo_ok = lo < inner.lo || (lo == inner.lo && (!lo_strict || inner.lo_strict));
        const bool hi_ok = hi > inner.hi || (hi == inner.hi && (!hi_strict || inner.hi_strict));
        return lo_ok && hi_ok;
    }

    bool overlaps(const Interval& other) const {
        if (empty || other.empty) return false;
        const double l = std::max(lo, other.lo);
        const double h = std::min(hi, other.hi);
        if (l < h) return true;
        if (l > h) return false;
        const bool l_strict = (lo == l && lo_strict) || (other.lo == l && other.lo_strict);
        const bool h_strict = (hi == l && hi_strict) || (other.hi == l && other.hi_strict);
        return !l_strict && !h_strict;
    }
};

// Per-variable intervals of a rule, or nullopt when the rule uses anything
// interval logic cannot express (strings, booleans, !=, mixed units).
std::optional<std::map<std::string, Interval>> rule_intervals(const Rule& rule) {
    std::map<std::string, Interval> result;
    std::map<std::string, std::string> units;
    for (const auto& cond : rule.conditions) {
        const auto* n = std::get_if<NumberValue>(&cond.literal);
        if (n == nullptr || cond.comparator == Comparator::NotEqual) return std::nullopt;
        auto [uit, inserted] = units.emplace(cond.variable, n->unit);
        if (!inserted && uit->second != n->unit) return std::nullopt;
        Interval& iv = result[cond.variable];
        switch (cond.comparator) {
            case Comparator::Greater: iv.tighten_lo(n->value, true); break;
            case Comparator::GreaterEqual: iv.tighten_lo(n->value, false); break;
            case Comparator::Less: iv.tighten_hi(n->value, true); break;
            case Comparator::LessEqual: iv.tighten_hi(n->value, false); break;
            case Comparator::Equal:
                iv.tighten_lo(n->value, false);
                iv.tighten_hi(n->value, false);
                break;
            case Comparator::NotEqual: return std::nullopt;
        }
    }
    for (auto& [name, iv] : result) iv.normalize();
    return result;
}

// Whether rule `a` matches every context rule `b` matches. nullopt = unknown.
std::optional<bool> rule_subsumes(const std::map<std::string, Interval>& a,
                                  const std::map<std::string, Interval>& b) {
    for (const auto& [var, iv_a] : a) {
        auto it = b.find(var);
        if (it == b.end()) return false;  // b is looser on this variable
        if (!iv_a.contains(it->second)) return false;
    }
    return true;
}

bool rules_can_overlap(const std::map<std::string, Interval>& a,
                       const std::map<std::string, Interval>& b) {
    for (const auto& [var, iv_a] : a) {
        auto it = b.find(var);
        if (it != b.end() && !iv_a.overlaps(it->second)) return false;
    }
    for (const auto& [var, iv] : a) {
        if (iv.empty) return false;
    }
    for (const auto& [var, iv] : b) {
        if (iv.empty) return false;
    }
    return true;
}

std::string rule_name(const DecisionTable& table, std::size_t index) {
    const Rule& r = table.rules[index];
    if (!r.label.empty()) return "'" + r.label + "'";
    return "#" + std::to_string(index + 1);
}

}  // namespace

std::vector<ValidationIssue> validate_table(const DecisionTable& table,
                                            const std::vector<std::string>& known_variables) {
    std::vector<ValidationIssue> issues;
    auto error = [&](std::string code, std::string message) {
        issues.push_back({Severity::Error, std::move(code), std::move(message), table.id});
    };
    auto warning = [&](std::string code, std::string message) {
        issues.push_back({Severity::Warning, std::move(code), std::move(message), table.id});
    };

    if (!known_variables.empty()) {
        for (const auto& input : table.inputs) {
            if (std::find(known_variables.begin(), known_variables.end(), input.name) ==
                known_variables.end()) {
                error("UnknownVariable", "declared input '" + input.name +
                                             "' is not a known context variable");
            }
        }
    }

    for (std::size_t i = 0; i < table.rules.size(); ++i) {
        for (const auto& cond : table.rules[i].conditions) {
            const InputDecl* input = table.find_input(cond.variable);
            if (input == nullptr) {
                error("UnknownVariable", "rule " + rule_name(table, i) +
                                             " references undeclared variable '" + cond.variable +
                                             "'");
                continue;
            }
            if (kind_of(cond.literal) != input->kind) {
                error("KindMismatch", "rule " + rule_name(table, i) + " compares '" +
                                          cond.variable + "' (" +
                                          std::string(to_string(input->kind)) + ") against a " +
                                          std::string(to_string(kind_of(cond.literal))) +
                                          " literal");
            }
            if (input->kind != ValueKind::Number && is_ordering(cond.comparator)) {
                error("BadComparator", "rule " + rule_name(table, i) + " applies '" +
                                           std::string(to_string(cond.comparator)) + "' to " +
                                           std::string(to_string(input->kind)) + " variable '" +
                                           cond.variable + "'");
            }
            if (const auto* n = std::get_if<NumberValue>(&cond.literal)) {
                if (input->kind == ValueKind::Number && n->unit != input->unit) {
                    error("UnitMismatch", "rule " + rule_name(table, i) + " compares '" +
                                              cond.variable + "' in unit '" + n->unit +
                                              "' but the input declares '" + input->unit + "'");
                }
            }
        }
    }
    if (has_errors(issues)) return issues;

    std::vector<std::optional<std::map<std::string, Interval>>> intervals;
    intervals.reserve(table.rules.size());
    for (const auto& rule : table.rules) intervals.push_back(rule_intervals(rule));

    if (table.hit_policy == HitPolicy::First) {
        for (std::size_t later = 1; later < table.rules.size(); ++later) {
            if (!intervals[later]) continue;
            for (std::size_t earlier = 0; earlier < later; ++earlier) {
                if (!intervals[earlier]) continue;
                if (rule_subsumes(*intervals[earlier], *intervals[later]).value_or(false)) {
                    warning("UnreachableRule",
                            "rule " + rule_name(table, later) + " can never fire: rule " +
                                rule_name(table, earlier) + " matches every context it matches");
                    break;
                }
            }
        }
    } else {
        bool unverifiable = false;
        for (std::size_t i = 0; i + 1 < table.rules.size(); ++i) {
            for (std::size_t j = i + 1; j < table.rules.size(); ++j) {
                if (!intervals[i] || !intervals[j]) {
                    unverifiable = true;
                    continue;
                }
                if (rules_can_overlap(*intervals[i], *intervals[j])) {
                    warning("OverlappingRules",
                            "rules " + rule_name(table, i) + " and " + rule_name(table, j) +
                                " can match the same context under unique policy");
                }
            }
        }
        if (unverifiable) {
            warning("UniquenessUnverifiable",
                    "uniqueness cannot be proven by interval reasoning over the rules");
        }
    }
    return issues;
}

}  // namespace sadp
