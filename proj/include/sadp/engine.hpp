#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sadp/model.hpp"
#include "sadp/rules.hpp"

namespace sadp {

// Whole-workflow execution mode: any subset of {Basic, LowPower,
// HighPerformance} with LowPower and HighPerformance mutually exclusive.
// The empty set is Normal execution.
struct WorkflowMode {
    bool basic = false;
    bool low_power = false;
    bool high_performance = false;

    bool is_normal() const { return !basic && !low_power && !high_performance; }
    bool valid() const { return !(low_power && high_performance); }
    std::string describe() const;

    friend bool operator==(const WorkflowMode&, const WorkflowMode&) = default;
};

// Per-task modality decisions for one workflow execution. `clamped` lists
// tasks whose Skip decision was overridden to Normal because they are not
// Optional.
struct Assignment {
    std::map<std::string, ModalityDecision> decisions;
    std::set<std::string> clamped;
    std::vector<std::string> warnings;

    friend bool operator==(const Assignment& a, const Assignment& b) {
        return a.decisions == b.decisions && a.clamped == b.clamped;
    }
};

struct TaskOutcome {
    std::string id;
    ModalityDecision decision = ModalityDecision::UseNormal;
    std::optional<ExecutionProfile> profile_used;  // empty when skipped
    double energy_j = 0.0;
    bool clamped = false;
    bool fallback_used = false;  // non-Normal decision served by the baseline

    friend bool operator==(const TaskOutcome&, const TaskOutcome&) = default;
};

struct SimulationReport {
    std::vector<TaskOutcome> outcomes;  // in model order
    double total_energy_j = 0.0;
    double response_time_ms = 0.0;  // critical path over executed tasks
    double total_reward = 0.0;
    double mean_quality = 1.0;
    std::vector<std::string> warnings;
};

// Weighted objective for the per-task optimizer: minimize
// weight_energy * energy + weight_time * response_time - weight_reward * reward,
// optionally under hard response-time and energy bounds.
struct OptimizationObjective {
    double weight_energy = 0.0;   // per joule
    double weight_time = 0.0;     // per ms of critical path
    double weight_reward = 0.0;   // per reward unit, subtracted
    std::optional<double> max_response_time_ms;
    std::optional<double> max_energy_j;

    bool valid() const {
        return weight_energy >= 0 && weight_time >= 0 && weight_reward >= 0 &&
               (weight_energy > 0 || weight_time > 0 || weight_reward > 0);
    }
};

struct OptimizationResult {
    Assignment assignment;
    SimulationReport report;
    double objective_value = 0.0;
    bool exact = true;  // false when the greedy fallback decided
};

struct TimelineEntry {
    std::string request_id;
    ContextSnapshot context;
};

struct ContextTimeline {
    std::vector<TimelineEntry> entries;
};

struct TimelineEntryResult {
    std::string request_id;
    std::optional<SimulationReport> report;
    std::string error;  // non-empty when the entry failed (fail-soft mode)
};

struct TimelineRun {
    std::vector<TimelineEntryResult> entries;
    double total_energy_j = 0.0;
    double total_reward = 0.0;
    double mean_response_time_ms = 0.0;  // over successful entries
    std::size_t failed_entries = 0;
};

struct EnactmentConfig {
    enum class Strategy { AllIn, RuleDriven, Optimized };
    Strategy strategy = Strategy::AllIn;
    WorkflowMode mode;                       // AllIn
    std::optional<std::string> global_table; // RuleDriven: fallback table id
    OptimizationObjective objective;         // Optimized
};

// Global modality selection: Basic skips Optional tasks, then LowPower or
// HighPerformance applies to every executed task. Mandatory and Unannotated
// tasks are never skipped. Throws SadpError(InvalidArgument) on an invalid mode.
Assignment resolve_all_in(const ApplicationModel& model, WorkflowMode mode);

// Evaluates each task's decision table against the context; tasks without a
// table fall back to `global_table` when given, else UseNormal. Skip decisions
// on non-Optional tasks are clamped to UseNormal with a warning. Rule
// evaluation errors propagate with the offending task id in the subject.
Assignment resolve_rule_driven(const ApplicationModel& model, const ContextSnapshot& ctx,
                               const std::optional<std::string>& global_table = std::nullopt);

// Executes one assignment: skipped tasks contribute nothing but still relay
// precedence on the critical path; non-Normal decisions without a declared
// variant fall back to the baseline profile (fallback_used).
SimulationReport simulate(const ApplicationModel& model, const Assignment& assignment);

// Exhaustively searches the feasible assignments (UseNormal always; LP/HP only
// where declared; Skip only for Optional tasks) up to `exact_limit` tasks,
// then falls back to greedy per-task selection unless `allow_greedy` is false.
// Ties break by lower energy, then by task-id-lexicographic decision order
// preferring UseNormal. Throws Infeasible/TooLargeForExact.
OptimizationResult optimize_assignment(const ApplicationModel& model,
                                       const OptimizationObjective& objective,
                                       bool allow_greedy = true,
                                       std::size_t exact_limit = 12);

// Resolves and simulates every timeline entry under `config`. Per-entry errors
// are collected and the run continues unless `strict`.
TimelineRun run_timeline(const ApplicationModel& model, const EnactmentConfig& config,
                         const ContextTimeline& timeline, bool strict = false);

}  // namespace sadp
