#include "sadp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sadp/errors.hpp"

namespace sadp {

std::string WorkflowMode::describe() const {
    if (is_normal()) return "normal";
    std::string out;
    auto add = [&](std::string_view flag) {
        if (!out.empty()) out += "+";
        out += flag;
    };
    if (basic) add("basic");
    if (low_power) add("low-power");
    if (high_performance) add("high-performance");
    return out;
}

Assignment resolve_all_in(const ApplicationModel& model, WorkflowMode mode) {
    if (!mode.valid()) {
        throw SadpError(ErrorCode::InvalidArgument,
                        "low-power and high-performance cannot be combined in one mode");
    }
    Assignment assignment;
    for (const auto& ms : model.microservices) {
        ModalityDecision decision = ModalityDecision::UseNormal;
        if (mode.basic && ms.relevance == Relevance::Optional) {
            decision = ModalityDecision::Skip;
        } else if (mode.low_power) {
            decision = ModalityDecision::UseLowPower;
        } else if (mode.high_performance) {
            decision = ModalityDecision::UseHighPerformance;
        }
        assignment.decisions.emplace(ms.id, decision);
    }
    return assignment;
}

Assignment resolve_rule_driven(const ApplicationModel& model, const ContextSnapshot& ctx,
                               const std::optional<std::string>& global_table) {
    const DecisionTable* fallback = nullptr;
    if (global_table) {
        auto it = model.decision_tables.find(*global_table);
        if (it == model.decision_tables.end()) {
            throw SadpError(ErrorCode::UnknownTableRef,
                            "global decision table '" + *global_table + "' is not in the model",
                            *global_table);
        }
        fallback = &it->second;
    }

    Assignment assignment;
    for (const auto& ms : model.microservices) {
        const DecisionTable* table = fallback;
        if (ms.decision_table_ref) {
            table = &model.decision_tables.at(*ms.decision_table_ref);
        }
        ModalityDecision decision = ModalityDecision::UseNormal;
        if (table != nullptr) {
            try {
                decision = evaluate_table(*table, ctx);
            } catch (const SadpError& e) {
                throw SadpError(e.code(), std::string(e.what()) + " (task '" + ms.id + "')",
                                ms.id);
            }
        }
        if (decision == ModalityDecision::Skip && ms.relevance != Relevance::Optional) {
            assignment.clamped.insert(ms.id);
            assignment.warnings.push_back("skip decision on " +
                                          std::string(to_string(ms.relevance)) + " task '" +
                                          ms.id + "' clamped to normal");
            decision = ModalityDecision::UseNormal;
        }
        assignment.decisions.emplace(ms.id, decision);
    }
    return assignment;
}

namespace {

// Longest source-to-sink path where each node contributes `duration[i]`.
// Skipped tasks carry duration 0 but still relay precedence.
double critical_path_ms(const ApplicationModel& model, const std::vector<double>& duration) {
    const std::size_t n = model.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(model.microservices[i].id, i);

    std::vector<std::vector<std::size_t>> predecessors(n);
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> successors(n);
    for (const auto& edge : model.edges) {
        const std::size_t from = index.at(edge.from_id);
        const std::size_t to = index.at(edge.to_id);
        predecessors[to].push_back(from);
        successors[from].push_back(to);
        ++indegree[to];
    }

    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) stack.push_back(i);
    }
    std::vector<double> finish(n, 0.0);
    double best = 0.0;
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        double start = 0.0;
        for (std::size_t pred : predecessors[node]) start = std::max(start, finish[pred]);
        finish[node] = start + duration[node];
        best = std::max(best, finish[node]);
        for (std::size_t succ : successors[node]) {
            if (--indegree[succ] == 0) stack.push_back(succ);
        }
    }
    return best;
}

const ExecutionProfile* profile_for(const Microservice& ms, ModalityDecision decision,
                                    bool& fallback_used) {
    fallback_used = false;
    if (decision == ModalityDecision::Skip) return nullptr;
    const Modality wanted = decision_modality(decision);
    auto it = ms.declared_variants.find(wanted);
    if (it != ms.declared_variants.end()) return &it->second;
    fallback_used = decision != ModalityDecision::UseNormal;
    return &ms.baseline_profile;
}

}  // namespace

SimulationReport simulate(const ApplicationModel& model, const Assignment& assignment) {
    for (const auto& ms : model.microservices) {
        if (assignment.decisions.count(ms.id) == 0) {
            throw SadpError(ErrorCode::InvalidArgument,
                            "assignment is missing a decision for task '" + ms.id + "'", ms.id);
        }
    }

    SimulationReport report;
    report.warnings = assignment.warnings;
    std::vector<double> durations(model.size(), 0.0);
    double quality_sum = 0.0;
    std::size_t executed = 0;

    for (std::size_t i = 0; i < model.size(); ++i) {
        const Microservice& ms = model.microservices[i];
        TaskOutcome outcome;
        outcome.id = ms.id;
        outcome.decision = assignment.decisions.at(ms.id);
        outcome.clamped = assignment.clamped.count(ms.id) != 0;
        const ExecutionProfile* profile = profile_for(ms, outcome.decision, outcome.fallback_used);
        if (profile != nullptr) {
            outcome.profile_used = *profile;
            outcome.energy_j = profile->energy_joules();
            durations[i] = profile->duration_ms;
            report.total_energy_j += outcome.energy_j;
            report.total_reward += profile->reward_units;
            quality_sum += profile->quality_score;
            ++executed;
        }
        report.outcomes.push_back(std::move(outcome));
    }

    report.response_time_ms = critical_path_ms(model, durations);
    if (executed == 0) {
        report.mean_quality = 1.0;
        report.warnings.push_back("every task was skipped; mean quality is degenerate");
    } else {
        report.mean_quality = quality_sum / static_cast<double>(executed);
    }
    return report;
}

namespace {

struct Choice {
    ModalityDecision decision;
    const ExecutionProfile* profile;  // nullptr = skip
    bool fallback = false;
};

// Rank used by the deterministic tie-break: UseNormal first.
int decision_rank(ModalityDecision d) {
    switch (d) {
        case ModalityDecision::UseNormal: return 0;
        case ModalityDecision::UseLowPower: return 1;
        case ModalityDecision::UseHighPerformance: return 2;
        case ModalityDecision::Skip: return 3;
    }
    return 4;
}

std::vector<std::vector<Choice>> feasible_choices(const ApplicationModel& model) {
    std::vector<std::vector<Choice>> choices(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const Microservice& ms = model.microservices[i];
        auto& list = choices[i];
        bool unused = false;
        list.push_back({ModalityDecision::UseNormal,
                        profile_for(ms, ModalityDecision::UseNormal, unused)});
        if (ms.has_variant(Modality::LowPower)) {
            list.push_back({ModalityDecision::UseLowPower,
                            &ms.declared_variants.at(Modality::LowPower)});
        }
        if (ms.has_variant(Modality::HighPerformance)) {
            list.push_back({ModalityDecision::UseHighPerformance,
                            &ms.declared_variants.at(Modality::HighPerformance)});
        }
        if (ms.relevance == Relevance::Optional) {
            list.push_back({ModalityDecision::Skip, nullptr});
        }
    }
    return choices;
}

struct Candidate {
    double cost = 0.0;
    double energy = 0.0;
    double response = 0.0;
    double reward = 0.0;
    double violation = 0.0;  // max(0, response - bound) + max(0, energy - bound)
    std::vector<std::size_t> picks;
};

Candidate evaluate_candidate(const ApplicationModel& model,
                             const std::vector<std::vector<Choice>>& choices,
                             const std::vector<std::size_t>& picks,
                             const OptimizationObjective& objective) {
    Candidate c;
    c.picks = picks;
    std::vector<double> durations(model.size(), 0.0);
    for (std::size_t i = 0; i < model.size(); ++i) {
        const Choice& choice = choices[i][picks[i]];
        if (choice.profile != nullptr) {
            c.energy += choice.profile->energy_joules();
            c.reward += choice.profile->reward_units;
            durations[i] = choice.profile->duration_ms;
        }
    }
    c.response = critical_path_ms(model, durations);
    c.cost = objective.weight_energy * c.energy + objective.weight_time * c.response -
             objective.weight_reward * c.reward;
    if (objective.max_response_time_ms && c.response > *objective.max_response_time_ms) {
        c.violation += c.response - *objective.max_response_time_ms;
    }
    if (objective.max_energy_j && c.energy > *objective.max_energy_j) {
        c.violation += c.energy - *objective.max_energy_j;
    }
    return c;
}

// Total order implementing the tie-break: cost, then energy, then decisions in
// task-id-lexicographic order with UseNormal ranked first.
bool candidate_better(const Candidate& a, const Candidate& b,
                      const std::vector<std::vector<Choice>>& choices,
                      const std::vector<std::size_t>& id_order) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.energy != b.energy) return a.energy < b.energy;
    for (std::size_t task : id_order) {
        const int ra = decision_rank(choices[task][a.picks[task]].decision);
        const int rb = decision_rank(choices[task][b.picks[task]].decision);
        if (ra != rb) return ra < rb;
    }
    return false;
}

Assignment assignment_from_picks(const ApplicationModel& model,
                                 const std::vector<std::vector<Choice>>& choices,
                                 const std::vector<std::size_t>& picks) {
    Assignment assignment;
    for (std::size_t i = 0; i < model.size(); ++i) {
        assignment.decisions.emplace(model.microservices[i].id, choices[i][picks[i]].decision);
    }
    return assignment;
}

std::vector<std::size_t> task_id_order(const ApplicationModel& model) {
    std::vector<std::size_t> order(model.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.microservices[a].id < model.microservices[b].id;
    });
    return order;
}

}  // namespace

OptimizationResult optimize_assignment(const ApplicationModel& model,
                                       const OptimizationObjective& objective, bool allow_greedy,
                                       std::size_t exact_limit) {
    if (!objective.valid()) {
        throw SadpError(ErrorCode::InvalidArgument,
                        "objective weights must be nonnegative and not all zero");
    }
    const auto choices = feasible_choices(model);
    const auto id_order = task_id_order(model);

    std::optional<Candidate> best_feasible;
    std::optional<Candidate> best_infeasible;
    auto consider = [&](const Candidate& c) {
        if (c.violation == 0.0) {
            if (!best_feasible || candidate_better(c, *best_feasible, choices, id_order)) {
                best_feasible = c;
            }
        } else if (!best_infeasible || c.violation < best_infeasible->violation ||
                   (c.violation == best_infeasible->violation &&
                    candidate_better(c, *best_infeasible, choices, id_order))) {
            best_infeasible = c;
        }
    };

    bool exact = true;
    std::vector<std::size_t> picks(model.size(), 0);
    if (model.size() <= exact_limit) {
        // Odometer enumeration over every feasible combination.
        while (true) {
            consider(evaluate_candidate(model, choices, picks, objective));
            std::size_t pos = 0;
            while (pos < picks.size()) {
                if (++picks[pos] < choices[pos].size()) break;
                picks[pos] = 0;
                ++pos;
            }
            if (pos == picks.size()) break;
        }
    } else if (!allow_greedy) {
        throw SadpError(ErrorCode::TooLargeForExact,
                        "model has " + std::to_string(model.size()) +
                            " tasks; exact search is limited to " + std::to_string(exact_limit));
    } else {
        // Single-pass coordinate descent from the all-normal assignment.
        exact = false;
        for (std::size_t i = 0; i < model.size(); ++i) {
            std::size_t best_pick = 0;
            std::optional<Candidate> local_best;
            for (std::size_t k = 0; k < choices[i].size(); ++k) {
                picks[i] = k;
                Candidate c = evaluate_candidate(model, choices, picks, objective);
                const bool better =
                    !local_best || c.violation < local_best->violation ||
                    (c.violation == local_best->violation &&
                     candidate_better(c, *local_best, choices, id_order));
                if (better) {
                    local_best = std::move(c);
                    best_pick = k;
                }
            }
            picks[i] = best_pick;
        }
        consider(evaluate_candidate(model, choices, picks, objective));
    }

    if (!best_feasible) {
        const Candidate& c = *best_infeasible;
        std::string detail;
        double rt_violation = 0.0;
        double energy_violation = 0.0;
        if (objective.max_response_time_ms && c.response > *objective.max_response_time_ms) {
            rt_violation = c.response - *objective.max_response_time_ms;
        }
        if (objective.max_energy_j && c.energy > *objective.max_energy_j) {
            energy_violation = c.energy - *objective.max_energy_j;
        }
        if (rt_violation >= energy_violation && rt_violation > 0.0) {
            detail = "max_response_time_ms=" + std::to_string(*objective.max_response_time_ms) +
                     " exceeded by " + std::to_string(rt_violation) + " ms at the best point";
        } else {
            detail = "max_energy_j=" + std::to_string(*objective.max_energy_j) +
                     " exceeded by " + std::to_string(energy_violation) + " J at the best point";
        }
        throw SadpError(ErrorCode::Infeasible, "no assignment satisfies the bounds: " + detail,
                        model.id);
    }

    OptimizationResult result;
    result.assignment = assignment_from_picks(model, choices, best_feasible->picks);
    if (!exact) {
        result.assignment.warnings.push_back(
            "greedy selection used (model larger than exact-search limit); optimality not "
            "guaranteed");
    }
    result.report = simulate(model, result.assignment);
    result.objective_value = best_feasible->cost;
    result.exact = exact;
    return result;
}

TimelineRun run_timeline(const ApplicationModel& model, const EnactmentConfig& config,
                         const ContextTimeline& timeline, bool strict) {
    // The optimized strategy ignores the context, so resolve it once.
    std::optional<Assignment> fixed;
    if (config.strategy == EnactmentConfig::Strategy::Optimized) {
        fixed = optimize_assignment(model, config.objective).assignment;
    } else if (config.strategy == EnactmentConfig::Strategy::AllIn) {
        fixed = resolve_all_in(model, config.mode);
    }

    TimelineRun run;
    double response_sum = 0.0;
    std::size_t ok = 0;
    for (const auto& entry : timeline.entries) {
        TimelineEntryResult result;
        result.request_id = entry.request_id;
        try {
            Assignment assignment =
                fixed ? *fixed : resolve_rule_driven(model, entry.context, config.global_table);
            result.report = simulate(model, assignment);
        } catch (const SadpError& e) {
            if (strict) {
                throw SadpError(e.code(),
                                "request '" + entry.request_id + "': " + e.what(),
                                entry.request_id);
            }
            result.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        if (result.report) {
            run.total_energy_j += result.report->total_energy_j;
            run.total_reward += result.report->total_reward;
            response_sum += result.report->response_time_ms;
            ++ok;
        } else {
            ++run.failed_entries;
        }
        run.entries.push_back(std::move(result));
    }
    run.mean_response_time_ms = ok == 0 ? 0.0 : response_sum / static_cast<double>(ok);
    return run;
}

}  // namespace sadp
