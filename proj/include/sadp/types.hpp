#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sadp {

// Execution modality of a microservice variant. Display order is fixed:
// Normal < LowPower < HighPerformance.
enum class Modality { Normal, LowPower, HighPerformance };

inline constexpr Modality kAllModalities[] = {
    Modality::Normal, Modality::LowPower, Modality::HighPerformance};
inline constexpr std::size_t kModalityCount = 3;

// Business relevance of a microservice. Unannotated is deliberately distinct
// from Mandatory: it marks the absence of a classification decision.
enum class Relevance { Mandatory, Optional, Unannotated };

enum class Severity { Error, Warning };

struct ValidationIssue {
    Severity severity = Severity::Warning;
    std::string code;     // short machine token, e.g. "UnknownAttribute"
    std::string message;  // human readable text
    std::string subject;  // microservice id, table id, or model id

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

bool has_errors(const std::vector<ValidationIssue>& issues);

std::string_view to_string(Modality m);
std::string_view to_string(Relevance r);
std::string_view to_string(Severity s);

// Short token as used in files/CLI: "N", "LP", "HP".
std::string_view modality_token(Modality m);

// Parses either the short token ("LP") or the display name ("low-power").
// Returns false on unrecognized input.
bool parse_modality(std::string_view text, Modality& out);
bool parse_relevance(std::string_view text, Relevance& out);

}  // namespace sadp
