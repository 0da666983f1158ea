#pragma once

#include <map>
#include <string>

#include "sadp/model.hpp"

namespace sadp {

enum class Step2Mode { Explicit, Implicit };

std::string_view to_string(Step2Mode m);

struct CoverageCounts {
    std::size_t annotated_count = 0;  // distinct catalog keys annotated
    std::size_t variant_count = 0;    // declared modality entries

    friend bool operator==(const CoverageCounts&, const CoverageCounts&) = default;
};

// The three step scores plus per-task coverage diagnostics. Scores are
// fractions in [0,1]; the CLI renders percentages.
struct SadpScorecard {
    double step1 = 0.0;
    double step2 = 0.0;
    Step2Mode step2_mode = Step2Mode::Explicit;
    double step3 = 0.0;
    std::map<std::string, CoverageCounts> per_microservice_coverage;

    friend bool operator==(const SadpScorecard&, const SadpScorecard&) = default;
};

// Annotation coverage: sum of distinct catalog keys annotated per task,
// divided by catalog size times task count. Keys outside the catalog are
// excluded; duplicates cannot occur (annotations are keyed maps).
double step1_score(const ApplicationModel& model);

// Fraction of tasks carrying an explicit relevance classification.
double step2_score_explicit(const ApplicationModel& model);

// 1.0 as soon as any task is classified (Optional or Mandatory), else 0.0.
double step2_score_implicit(const ApplicationModel& model);

// Declared execution variants over the maximum 3 per task. An explicitly
// registered Normal entry counts; the baseline profile does not.
double step3_score(const ApplicationModel& model);

SadpScorecard scorecard(const ApplicationModel& model, Step2Mode step2_mode);

}  // namespace sadp
