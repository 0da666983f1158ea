#include "ingest_detail.hpp"

#include <array>
#include <cstdlib>

namespace sadp::detail {

std::optional<double> parse_full_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') return std::nullopt;
    return value;
}

namespace {

struct SeedKey {
    const char* annotation;
    std::optional<double> ProfileInput::*field;
};

constexpr std::array<SeedKey, 4> kSeedKeys = {{
    {"power", &ProfileInput::power_watts},
    {"duration", &ProfileInput::duration_ms},
    {"reward", &ProfileInput::reward_units},
    {"quality", &ProfileInput::quality_score},
}};

void check_ranges(const ExecutionProfile& profile, const std::string& field_prefix,
                  const FieldError& fail) {
    if (profile.power_watts < 0) {
        fail(field_prefix + "power_watts", "power must be nonnegative");
    }
    if (profile.duration_ms < 0) {
        fail(field_prefix + "duration_ms", "duration must be nonnegative");
    }
    if (profile.quality_score < 0 || profile.quality_score > 1) {
        fail(field_prefix + "quality_score", "quality score must lie in [0,1]");
    }
}

}  // namespace

void finalize_microservice(Microservice& ms, const ProfileInput& baseline,
                           const std::map<Modality, ProfileInput>& variants,
                           const AttributeCatalog& catalog, const FieldError& fail) {
    ProfileInput seeds;
    for (const auto& seed : kSeedKeys) {
        auto it = ms.annotations.find(seed.annotation);
        if (it == ms.annotations.end()) continue;
        const auto value = parse_full_number(it->second);
        if (!value) continue;
        seeds.*seed.field = *value;
        if (!catalog.contains(seed.annotation)) ms.annotations.erase(it);
    }

    auto pick = [](const std::optional<double>& explicit_value,
                   const std::optional<double>& seed,
                   double fallback) { return explicit_value.value_or(seed.value_or(fallback)); };

    ExecutionProfile& profile = ms.baseline_profile;
    profile.power_watts = pick(baseline.power_watts, seeds.power_watts, kDefaultPowerWatts);
    profile.duration_ms = pick(baseline.duration_ms, seeds.duration_ms, kDefaultDurationMs);
    profile.reward_units = pick(baseline.reward_units, seeds.reward_units, 0.0);
    profile.quality_score = pick(baseline.quality_score, seeds.quality_score, 1.0);

    ms.defaulted_fields.clear();
    if (!baseline.power_watts && !seeds.power_watts) ms.defaulted_fields.push_back("power_watts");
    if (!baseline.duration_ms && !seeds.duration_ms) ms.defaulted_fields.push_back("duration_ms");

    check_ranges(profile, "baseline.", fail);

    ms.declared_variants.clear();
    for (const auto& [modality, input] : variants) {
        ExecutionProfile variant;
        variant.power_watts = input.power_watts.value_or(profile.power_watts);
        variant.duration_ms = input.duration_ms.value_or(profile.duration_ms);
        variant.reward_units = input.reward_units.value_or(profile.reward_units);
        variant.quality_score = input.quality_score.value_or(profile.quality_score);
        check_ranges(variant, "variants." + std::string(modality_token(modality)) + ".", fail);
        ms.declared_variants.emplace(modality, variant);
    }
}

}  // namespace sadp::detail
