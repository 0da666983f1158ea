#pragma once

// Shared microservice assembly used by both the JSON parser and the BPMN
// importer: annotation-driven profile seeding, defaults, and range checks.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sadp/model.hpp"

namespace sadp::detail {

struct ProfileInput {
    std::optional<double> power_watts;
    std::optional<double> duration_ms;
    std::optional<double> reward_units;
    std::optional<double> quality_score;
};

// Parses a full numeric string ("10", "0.5", "1e3"); nullopt otherwise.
std::optional<double> parse_full_number(const std::string& text);

// Reports a field/range problem; implementations throw ParseFailure.
using FieldError = std::function<void(const std::string& field, const std::string& message)>;

// Completes a microservice from raw inputs:
//  - annotation keys power/duration/reward/quality with numeric values seed
//    the matching baseline field; keys outside the catalog are consumed by
//    the seeding instead of being kept as annotations;
//  - explicit baseline fields win over seeds; missing power/duration fall
//    back to the documented defaults and are recorded in defaulted_fields;
//  - declared variants inherit unspecified fields from the final baseline.
void finalize_microservice(Microservice& ms, const ProfileInput& baseline,
                           const std::map<Modality, ProfileInput>& variants,
                           const AttributeCatalog& catalog, const FieldError& fail);

}  // namespace sadp::detail
