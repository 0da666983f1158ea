#include "sadp/types.hpp"

#include <algorithm>

namespace sadp {

bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(),
                       [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::Normal: return "normal";
        case Modality::LowPower: return "low-power";
        case Modality::HighPerformance: return "high-performance";
    }
    return "?";
}

std::string_view to_string(Relevance r) {
    switch (r) {
        case Relevance::Mandatory: return "mandatory";
        case Relevance::Optional: return "optional";
        case Relevance::Unannotated: return "unannotated";
    }
    return "?";
}

std::string_view to_string(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

std::string_view modality_token(Modality m) {
    switch (m) {
        case Modality::Normal: return "N";
        case Modality::LowPower: return "LP";
        case Modality::HighPerformance: return "HP";
    }
    return "?";
}

bool parse_modality(std::string_view text, Modality& out) {
    if (text == "N" || text == "normal") {
        out = Modality::Normal;
    } else if (text == "LP" || text == "low-power") {
        out = Modality::LowPower;
    } else if (text == "HP" || text == "high-performance") {
        out = Modality::HighPerformance;
    } else {
        return false;
    }
    return true;
}

bool parse_relevance(std::string_view text, Relevance& out) {
    if (text == "mandatory") {
        out = Relevance::Mandatory;
    } else if (text == "optional") {
        out = Relevance::Optional;
    } else if (text == "unannotated") {
        out = Relevance::Unannotated;
    } else {
        return false;
    }
    return true;
}

}  // namespace sadp
