#include "sadp/scoring.hpp"

namespace sadp {

std::string_view to_string(Step2Mode m) {
    return m == Step2Mode::Explicit ? "explicit" : "implicit";
}

namespace {

std::size_t catalog_keys_annotated(const Microservice& ms, const AttributeCatalog& catalog) {
    std::size_t count = 0;
    for (const auto& [key, value] : ms.annotations) {
        if (catalog.contains(key)) ++count;
    }
    return count;
}

}  // namespace

double step1_score(const ApplicationModel& model) {
    std::size_t annotated = 0;
    for (const auto& ms : model.microservices) {
        annotated += catalog_keys_annotated(ms, model.catalog);
    }
    return static_cast<double>(annotated) /
           (static_cast<double>(model.catalog.size()) * static_cast<double>(model.size()));
}

double step2_score_explicit(const ApplicationModel& model) {
    std::size_t classified = 0;
    for (const auto& ms : model.microservices) {
        if (ms.relevance != Relevance::Unannotated) ++classified;
    }
    return static_cast<double>(classified) / static_cast<double>(model.size());
}

double step2_score_implicit(const ApplicationModel& model) {
    for (const auto& ms : model.microservices) {
        if (ms.relevance != Relevance::Unannotated) return 1.0;
    }
    return 0.0;
}

double step3_score(const ApplicationModel& model) {
    std::size_t variants = 0;
    for (const auto& ms : model.microservices) {
        variants += ms.declared_variants.size();
    }
    return static_cast<double>(variants) /
           (static_cast<double>(kModalityCount) * static_cast<double>(model.size()));
}

SadpScorecard scorecard(const ApplicationModel& model, Step2Mode step2_mode) {
    SadpScorecard card;
    card.step1 = step1_score(model);
    card.step2_mode = step2_mode;
    card.step2 = step2_mode == Step2Mode::Explicit ? step2_score_explicit(model)
                                                   : step2_score_implicit(model);
    card.step3 = step3_score(model);
    for (const auto& ms : model.microservices) {
        card.per_microservice_coverage[ms.id] = {catalog_keys_annotated(ms, model.catalog),
                                                 ms.declared_variants.size()};
    }
    return card;
}

}  // namespace sadp
