#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sadp/types.hpp"

namespace sadp {

// A context value: a finite number with a unit tag (empty = unitless), a
// boolean, or a string. Units are compared literally; there is no conversion.
struct NumberValue {
    double value = 0.0;
    std::string unit;

    friend bool operator==(const NumberValue&, const NumberValue&) = default;
};

using Value = std::variant<NumberValue, bool, std::string>;

enum class ValueKind { Number, Boolean, String };

ValueKind kind_of(const Value& v);
std::string_view to_string(ValueKind k);
std::string describe(const Value& v);

// Snapshot of the monitored context variables at one decision point.
struct ContextSnapshot {
    std::map<std::string, Value> variables;

    static ContextSnapshot of(std::initializer_list<std::pair<const std::string, Value>> vars) {
        return ContextSnapshot{std::map<std::string, Value>(vars)};
    }

    friend bool operator==(const ContextSnapshot&, const ContextSnapshot&) = default;
};

enum class Comparator { Greater, GreaterEqual, Less, LessEqual, Equal, NotEqual };

std::string_view to_string(Comparator c);
bool parse_comparator(std::string_view text, Comparator& out);

struct Condition {
    std::string variable;
    Comparator comparator = Comparator::Equal;
    Value literal;

    friend bool operator==(const Condition&, const Condition&) = default;
};

// Per-task decision produced by a table. Skip is honored only for Optional
// tasks; the engine clamps it elsewhere.
enum class ModalityDecision { Skip, UseNormal, UseLowPower, UseHighPerformance };

std::string_view to_string(ModalityDecision d);
bool parse_decision(std::string_view text, ModalityDecision& out);

// Maps UseNormal/UseLowPower/UseHighPerformance to the modality they select.
// Precondition: d != Skip.
Modality decision_modality(ModalityDecision d);

struct Rule {
    std::vector<Condition> conditions;  // conjunction; empty = always true
    ModalityDecision output = ModalityDecision::UseNormal;
    std::string label;

    friend bool operator==(const Rule&, const Rule&) = default;
};

enum class HitPolicy { First, Unique };

std::string_view to_string(HitPolicy p);
bool parse_hit_policy(std::string_view text, HitPolicy& out);

struct InputDecl {
    std::string name;
    ValueKind kind = ValueKind::Number;
    std::string unit;  // meaningful for Number inputs only

    friend bool operator==(const InputDecl&, const InputDecl&) = default;
};

// DMN-style decision table: ordered if-then rules over declared context
// variables. Under First policy the earliest match wins; under Unique at most
// one rule may match.
struct DecisionTable {
    std::string id;
    std::vector<InputDecl> inputs;
    std::vector<Rule> rules;
    HitPolicy hit_policy = HitPolicy::First;
    ModalityDecision default_output = ModalityDecision::UseNormal;

    const InputDecl* find_input(std::string_view name) const;

    friend bool operator==(const DecisionTable&, const DecisionTable&) = default;
};

// Evaluates one condition against a context.
// Throws SadpError with MissingVariable, KindMismatch, or UnitMismatch.
bool evaluate_condition(const Condition& cond, const ContextSnapshot& ctx);

// Evaluates a whole table. The context must supply every declared input with
// the declared kind and unit. Throws MissingVariable/KindMismatch/UnitMismatch
// on bad context and NonUniqueHit when a Unique table has two matching rules.
ModalityDecision evaluate_table(const DecisionTable& table, const ContextSnapshot& ctx);

// Static checks: Errors for conditions on undeclared variables, literal kind
// mismatches, and ordered comparators on booleans/strings; Warnings for rules
// unreachable under First policy and for Unique tables whose disjointness
// cannot be proven by interval reasoning. `known_variables`, when non-empty,
// is the universe of context variables the caller can supply; declared inputs
// outside it are Errors.
std::vector<ValidationIssue> validate_table(const DecisionTable& table,
                                            const std::vector<std::string>& known_variables = {});

}  // namespace sadp
