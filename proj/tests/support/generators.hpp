#pragma once

// Hand-rolled random generators for property tests. All randomness flows from
// a caller-provided mt19937 so failures reproduce from the seed.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "sadp/model.hpp"

namespace gen {

struct ModelParams {
    std::size_t min_tasks = 1;
    std::size_t max_tasks = 8;
    double edge_probability = 0.35;
    double annotation_probability = 0.5;
    double relevance_probability = 0.5;  // chance a task is classified at all
    double variant_probability = 0.4;    // chance per modality
    bool ordered_variant_power = false;  // force LP <= N <= HP in power and duration
};

inline sadp::ExecutionProfile random_profile(std::mt19937& rng) {
    std::uniform_real_distribution<double> power(0.0, 50.0);
    std::uniform_real_distribution<double> duration(0.0, 1000.0);
    std::uniform_real_distribution<double> reward(0.0, 10.0);
    std::uniform_real_distribution<double> quality(0.0, 1.0);
    return {power(rng), duration(rng), reward(rng), quality(rng)};
}

inline sadp::ApplicationModel random_model(std::mt19937& rng, const ModelParams& params = {}) {
    std::uniform_int_distribution<std::size_t> size_dist(params.min_tasks, params.max_tasks);
    const std::size_t n = size_dist(rng);
    std::bernoulli_distribution edge_flip(params.edge_probability);
    std::bernoulli_distribution annotation_flip(params.annotation_probability);
    std::bernoulli_distribution relevance_flip(params.relevance_probability);
    std::bernoulli_distribution optional_flip(0.5);
    std::bernoulli_distribution variant_flip(params.variant_probability);

    const auto catalog = sadp::AttributeCatalog::standard();
    std::vector<sadp::Microservice> tasks;
    for (std::size_t i = 0; i < n; ++i) {
        sadp::Microservice ms;
        ms.id = "t" + std::to_string(i);
        ms.name = "Task " + std::to_string(i);
        if (relevance_flip(rng)) {
            ms.relevance = optional_flip(rng) ? sadp::Relevance::Optional
                                              : sadp::Relevance::Mandatory;
        }
        for (const auto& attr : catalog.attributes()) {
            if (annotation_flip(rng)) ms.annotations[attr.key] = "set";
        }
        ms.baseline_profile = random_profile(rng);
        for (sadp::Modality modality : sadp::kAllModalities) {
            if (variant_flip(rng)) ms.declared_variants[modality] = random_profile(rng);
        }
        if (params.ordered_variant_power && !ms.declared_variants.empty()) {
            // Rebuild the variants around the baseline so LP <= N <= HP holds
            // in both power and duration.
            const auto base = ms.baseline_profile;
            std::uniform_real_distribution<double> shrink(0.2, 1.0);
            std::uniform_real_distribution<double> grow(1.0, 2.5);
            std::map<sadp::Modality, sadp::ExecutionProfile> ordered;
            for (const auto& [modality, profile] : ms.declared_variants) {
                sadp::ExecutionProfile p = base;
                p.quality_score = profile.quality_score;
                p.reward_units = profile.reward_units;
                if (modality == sadp::Modality::LowPower) {
                    p.power_watts = base.power_watts * shrink(rng);
                    p.duration_ms = base.duration_ms * shrink(rng);
                } else if (modality == sadp::Modality::HighPerformance) {
                    p.power_watts = base.power_watts * grow(rng);
                    p.duration_ms = base.duration_ms * grow(rng);
                }
                ordered[modality] = p;
            }
            ms.declared_variants = ordered;
        }
        tasks.push_back(std::move(ms));
    }

    std::vector<sadp::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (edge_flip(rng)) edges.push_back({tasks[i].id, tasks[j].id});
        }
    }
    return sadp::build_application("random", std::move(tasks), std::move(edges), {}, catalog);
}

}  // namespace gen
