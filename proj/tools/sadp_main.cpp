// sadp: annotated-workflow scoring and context-driven execution simulator.
//
// Subcommands: validate | score | import | simulate | optimize.
// Exit codes: 0 success, 1 validation errors, 2 parse errors,
//             3 runtime (rule/optimizer) errors, 4 usage errors.

#include <cfenv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sadp/engine.hpp"
#include "sadp/errors.hpp"
#include "sadp/ingest.hpp"
#include "sadp/scoring.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParse = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitUsage = 4;

struct GlobalFlags {
    std::string format = "table";
    bool quiet = false;

    bool json() const { return format == "json"; }
};

int exit_code_for(const sadp::SadpError& e) {
    using sadp::ErrorCode;
    switch (e.code()) {
        case ErrorCode::SyntaxError:
        case ErrorCode::SchemaError:
        case ErrorCode::UnsupportedElement:
        case ErrorCode::MalformedAnnotation:
        case ErrorCode::DanglingAssociation:
            return kExitParse;
        case ErrorCode::SemanticError:
            return kExitValidation;
        case ErrorCode::MissingVariable:
        case ErrorCode::KindMismatch:
        case ErrorCode::UnitMismatch:
        case ErrorCode::NonUniqueHit:
        case ErrorCode::Infeasible:
        case ErrorCode::TooLargeForExact:
            return kExitRuntime;
        case ErrorCode::InvalidArgument:
            return kExitUsage;
        default:
            return kExitValidation;
    }
}

void report_error(const sadp::SadpError& e) {
    std::cerr << "error [" << sadp::to_string(e.code()) << "]: " << e.what() << "\n";
    if (const auto* parse = dynamic_cast<const sadp::ParseFailure*>(&e)) {
        std::cerr << "  at " << parse->location().describe() << "\n";
    }
}

// Percentage with one decimal, round half to even, trailing ".0" dropped.
std::string format_percent(double fraction) {
    const int prev = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const double tenths = std::nearbyint(fraction * 1000.0);
    std::fesetround(prev);
    const long long scaled = static_cast<long long>(tenths);
    char buffer[64];
    if (scaled % 10 == 0) {
        std::snprintf(buffer, sizeof(buffer), "%lld%%", scaled / 10);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%lld.%lld%%", scaled / 10,
                      std::llabs(scaled % 10));
    }
    return buffer;
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

sadp::WorkflowDocument load_document(const std::string& path, bool lenient,
                                     const std::optional<std::string>& catalog_path = {}) {
    sadp::ParseOptions options;
    options.lenient = lenient;
    if (catalog_path) {
        options.catalog_override = sadp::parse_catalog_json(sadp::read_file(*catalog_path));
    }
    return sadp::parse_workflow_json(sadp::read_file(path), options);
}

void print_issues(const std::vector<sadp::ValidationIssue>& issues, const GlobalFlags& flags) {
    if (flags.json()) {
        std::cout << sadp::issues_to_json(issues);
        return;
    }
    for (const auto& issue : issues) {
        if (flags.quiet && issue.severity != sadp::Severity::Error) continue;
        std::cout << "[" << sadp::to_string(issue.severity) << "] " << issue.code << " ("
                  << issue.subject << "): " << issue.message << "\n";
    }
}

// Validates and prints blocking errors; returns false when simulation-grade
// commands must stop.
bool ensure_valid(const sadp::ApplicationModel& model, const GlobalFlags& flags) {
    auto issues = sadp::validate(model);
    if (!sadp::has_errors(issues)) return true;
    print_issues(issues, flags);
    return false;
}

int cmd_validate(const std::string& path, bool lenient,
                 const std::optional<std::string>& catalog_path, const GlobalFlags& flags) {
    auto doc = load_document(path, lenient, catalog_path);
    auto issues = sadp::validate(doc.application);
    print_issues(issues, flags);
    if (sadp::has_errors(issues)) return kExitValidation;
    if (!flags.quiet && !flags.json()) {
        std::cout << "ok: " << doc.application.id << " (" << doc.application.size()
                  << " tasks, " << doc.application.edges.size() << " edges)\n";
    }
    return kExitOk;
}

int cmd_score(const std::string& path, const std::string& step2_mode, const GlobalFlags& flags) {
    auto doc = load_document(path, false);
    if (!ensure_valid(doc.application, flags)) return kExitValidation;

    const auto mode =
        step2_mode == "explicit" ? sadp::Step2Mode::Explicit : sadp::Step2Mode::Implicit;
    const auto card = sadp::scorecard(doc.application, mode);
    if (flags.json()) {
        std::cout << sadp::scorecard_to_json(card);
        return kExitOk;
    }
    const std::string step2 = mode == sadp::Step2Mode::Implicit
                                  ? std::string(card.step2 == 1.0 ? "1" : "0")
                                  : format_percent(card.step2);
    std::cout << "Step 1: " << format_percent(card.step1) << " | Step 2: " << step2
              << " | Step 3: " << format_percent(card.step3) << "\n";
    if (!flags.quiet) {
        const std::size_t catalog_size = doc.application.catalog.size();
        for (const auto& ms : doc.application.microservices) {
            const auto& counts = card.per_microservice_coverage.at(ms.id);
            std::cout << "  " << ms.id << ": annotated " << counts.annotated_count << "/"
                      << catalog_size << ", variants " << counts.variant_count << "/3\n";
        }
    }
    return kExitOk;
}

int cmd_import(const std::string& bpmn_path, const std::optional<std::string>& tables_path,
               const std::optional<std::string>& out_path, const GlobalFlags& flags) {
    std::map<std::string, sadp::DecisionTable> tables;
    if (tables_path) {
        tables = sadp::parse_tables_json(sadp::read_file(*tables_path));
    }
    auto doc = sadp::import_bpmn_subset(sadp::read_file(bpmn_path), std::move(tables));
    const std::string json = sadp::serialize_workflow(doc);
    if (out_path) {
        sadp::write_file(*out_path, json);
    } else {
        std::cout << json;
    }
    if (!flags.quiet) {
        std::size_t annotations = 0;
        for (const auto& ms : doc.application.microservices) annotations += ms.annotations.size();
        std::cerr << "imported " << doc.application.size() << " tasks, "
                  << doc.application.edges.size() << " edges, " << annotations
                  << " annotations, " << doc.application.decision_tables.size() << " tables\n";
    }
    return kExitOk;
}

void print_report_table(const sadp::SimulationReport& report) {
    std::size_t width = 4;
    for (const auto& outcome : report.outcomes) width = std::max(width, outcome.id.size());
    std::printf("%-*s  %-16s  %10s  %12s  %s\n", static_cast<int>(width), "task", "decision",
                "energy_j", "duration_ms", "flags");
    for (const auto& outcome : report.outcomes) {
        std::string flags;
        if (outcome.fallback_used) flags += "fallback";
        if (outcome.clamped) flags += flags.empty() ? "clamped" : ",clamped";
        const double duration = outcome.profile_used ? outcome.profile_used->duration_ms : 0.0;
        std::printf("%-*s  %-16s  %10s  %12s  %s\n", static_cast<int>(width),
                    outcome.id.c_str(), std::string(sadp::to_string(outcome.decision)).c_str(),
                    format_fixed(outcome.energy_j, 3).c_str(),
                    format_fixed(duration, 1).c_str(), flags.c_str());
    }
    std::printf("totals: energy %s J | response %s ms | reward %s | quality %s\n",
                format_fixed(report.total_energy_j, 3).c_str(),
                format_fixed(report.response_time_ms, 1).c_str(),
                format_fixed(report.total_reward, 2).c_str(),
                format_fixed(report.mean_quality, 3).c_str());
    for (const auto& warning : report.warnings) {
        std::printf("warning: %s\n", warning.c_str());
    }
}

sadp::ContextSnapshot parse_context_args(const std::vector<std::string>& args) {
    sadp::ContextSnapshot ctx;
    for (const auto& arg : args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw sadp::SadpError(sadp::ErrorCode::InvalidArgument,
                                  "--context expects name=value[unit], got '" + arg + "'");
        }
        const std::string name = arg.substr(0, eq);
        const std::string text = arg.substr(eq + 1);
        sadp::Value value;
        if (text == "true" || text == "false") {
            value = text == "true";
        } else {
            char* end = nullptr;
            const double number = std::strtod(text.c_str(), &end);
            if (end != text.c_str()) {
                std::string unit(end);
                const auto start = unit.find_first_not_of(" \t");
                unit = start == std::string::npos ? "" : unit.substr(start);
                value = sadp::NumberValue{number, unit};
            } else {
                value = text;
            }
        }
        ctx.variables[name] = std::move(value);
    }
    return ctx;
}

int run_single(const sadp::ApplicationModel& model, const sadp::Assignment& assignment,
               const GlobalFlags& flags) {
    const auto report = sadp::simulate(model, assignment);
    if (flags.json()) {
        std::cout << sadp::report_to_json(report);
    } else {
        print_report_table(report);
    }
    return kExitOk;
}

int run_over_timeline(const sadp::ApplicationModel& model, const sadp::EnactmentConfig& config,
                      const std::string& timeline_path, bool strict, const GlobalFlags& flags) {
    const auto timeline = sadp::parse_timeline_json(sadp::read_file(timeline_path));
    const auto run = sadp::run_timeline(model, config, timeline, strict);
    if (flags.json()) {
        std::cout << sadp::timeline_run_to_json(run);
        return kExitOk;
    }
    for (const auto& entry : run.entries) {
        std::printf("== request %s ==\n", entry.request_id.c_str());
        if (entry.report) {
            print_report_table(*entry.report);
        } else {
            std::printf("failed: %s\n", entry.error.c_str());
        }
    }
    std::printf("aggregate: energy %s J | reward %s | mean response %s ms | %zu/%zu ok\n",
                format_fixed(run.total_energy_j, 3).c_str(),
                format_fixed(run.total_reward, 2).c_str(),
                format_fixed(run.mean_response_time_ms, 1).c_str(),
                run.entries.size() - run.failed_entries, run.entries.size());
    return kExitOk;
}

int cmd_simulate(const std::string& path, const std::vector<std::string>& mode_tokens,
                 bool use_rules, const std::optional<std::string>& timeline_path,
                 const std::vector<std::string>& context_args, bool strict,
                 const GlobalFlags& flags) {
    if (use_rules && !mode_tokens.empty()) {
        std::cerr << "error: --mode and --rules are mutually exclusive\n";
        return kExitUsage;
    }
    if (use_rules && !timeline_path && context_args.empty()) {
        std::cerr << "error: --rules requires --timeline or --context\n";
        return kExitUsage;
    }

    sadp::WorkflowMode mode;
    for (const auto& token : mode_tokens) {
        if (token == "normal") {
            // no flags; combinable with nothing else meaningfully
        } else if (token == "basic") {
            mode.basic = true;
        } else if (token == "low-power") {
            mode.low_power = true;
        } else if (token == "high-performance") {
            mode.high_performance = true;
        } else {
            std::cerr << "error: unknown mode '" << token << "'\n";
            return kExitUsage;
        }
    }
    if (!mode.valid()) {
        std::cerr << "error: --mode low-power and --mode high-performance contradict each other\n";
        return kExitUsage;
    }

    auto doc = load_document(path, false);
    if (!ensure_valid(doc.application, flags)) return kExitValidation;

    if (use_rules) {
        sadp::EnactmentConfig config;
        config.strategy = sadp::EnactmentConfig::Strategy::RuleDriven;
        if (timeline_path) {
            return run_over_timeline(doc.application, config, *timeline_path, strict, flags);
        }
        const auto ctx = parse_context_args(context_args);
        return run_single(doc.application, sadp::resolve_rule_driven(doc.application, ctx),
                          flags);
    }

    sadp::EnactmentConfig config;
    config.strategy = sadp::EnactmentConfig::Strategy::AllIn;
    config.mode = mode;
    if (timeline_path) {
        return run_over_timeline(doc.application, config, *timeline_path, strict, flags);
    }
    return run_single(doc.application, sadp::resolve_all_in(doc.application, mode), flags);
}

int cmd_optimize(const std::string& path, double we, double wt, double wr,
                 const std::optional<double>& max_rt, const std::optional<double>& max_energy,
                 bool exact_only, const GlobalFlags& flags) {
    sadp::OptimizationObjective objective;
    objective.weight_energy = we;
    objective.weight_time = wt;
    objective.weight_reward = wr;
    objective.max_response_time_ms = max_rt;
    objective.max_energy_j = max_energy;
    if (!objective.valid()) {
        std::cerr << "error: weights must be nonnegative and at least one positive\n";
        return kExitUsage;
    }

    auto doc = load_document(path, false);
    if (!ensure_valid(doc.application, flags)) return kExitValidation;

    const auto result = sadp::optimize_assignment(doc.application, objective, !exact_only);
    if (flags.json()) {
        std::cout << sadp::optimization_to_json(result);
        return kExitOk;
    }
    std::printf("assignment (objective %s%s):\n", format_fixed(result.objective_value, 6).c_str(),
                result.exact ? "" : ", greedy");
    for (const auto& [ms_id, decision] : result.assignment.decisions) {
        std::printf("  %s: %s\n", ms_id.c_str(), std::string(sadp::to_string(decision)).c_str());
    }
    print_report_table(result.report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sustainability scoring and execution simulation for annotated workflows"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    app.add_flag("--quiet", flags.quiet, "Suppress non-essential output");

    std::string path;
    bool lenient = false;
    std::optional<std::string> catalog_path;
    auto* validate = app.add_subcommand("validate", "Check a workflow document");
    validate->add_option("path", path, "Workflow JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    validate->add_flag("--lenient", lenient, "Accept unknown fields");
    validate->add_option("--catalog", catalog_path, "Attribute catalog override (JSON)")
        ->check(CLI::ExistingFile);

    std::string step2_mode = "implicit";
    auto* score = app.add_subcommand("score", "Print the sustainability scorecard");
    score->add_option("path", path, "Workflow JSON file")->required()->check(CLI::ExistingFile);
    score->add_option("--step2-mode", step2_mode, "Classification scoring mode")
        ->check(CLI::IsMember({"explicit", "implicit"}))
        ->capture_default_str();

    std::optional<std::string> tables_path;
    std::optional<std::string> out_path;
    auto* import = app.add_subcommand("import", "Convert a BPMN-subset file to workflow JSON");
    import->add_option("path", path, "BPMN XML file")->required()->check(CLI::ExistingFile);
    import->add_option("--tables", tables_path, "Decision-table sidecar JSON")
        ->check(CLI::ExistingFile);
    import->add_option("--out", out_path, "Write the JSON here instead of stdout");

    std::vector<std::string> mode_tokens;
    bool use_rules = false;
    std::optional<std::string> timeline_path;
    std::vector<std::string> context_args;
    bool strict = false;
    auto* simulate = app.add_subcommand("simulate", "Run the workflow under a modality policy");
    simulate->add_option("path", path, "Workflow JSON file")->required()->check(CLI::ExistingFile);
    simulate
        ->add_option("--mode", mode_tokens,
                     "Workflow mode (repeatable): normal|basic|low-power|high-performance")
        ->allow_extra_args(false);
    simulate->add_flag("--rules", use_rules, "Decide modalities from the decision tables");
    simulate->add_option("--timeline", timeline_path, "Timeline JSON file")
        ->check(CLI::ExistingFile);
    simulate
        ->add_option("--context", context_args,
                     "Context variable name=value[unit] (repeatable)")
        ->allow_extra_args(false);
    simulate->add_flag("--strict", strict, "Stop on the first rule error");

    double we = 0.0;
    double wt = 0.0;
    double wr = 0.0;
    std::optional<double> max_rt;
    std::optional<double> max_energy;
    bool exact_only = false;
    auto* optimize = app.add_subcommand("optimize", "Pick the cost-minimal assignment");
    optimize->add_option("path", path, "Workflow JSON file")->required()->check(CLI::ExistingFile);
    optimize->add_option("--we", we, "Weight per joule of energy");
    optimize->add_option("--wt", wt, "Weight per ms of response time");
    optimize->add_option("--wr", wr, "Weight per reward unit (subtracted)");
    optimize->add_option("--max-rt", max_rt, "Response time bound in ms");
    optimize->add_option("--max-energy", max_energy, "Energy bound in joules");
    optimize->add_flag("--exact-only", exact_only, "Fail instead of falling back to greedy");

    // Let the global --format/--quiet flags appear after the subcommand too.
    for (auto* sub : {validate, score, import, simulate, optimize}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(path, lenient, catalog_path, flags);
        if (score->parsed()) return cmd_score(path, step2_mode, flags);
        if (import->parsed()) return cmd_import(path, tables_path, out_path, flags);
        if (simulate->parsed()) {
            return cmd_simulate(path, mode_tokens, use_rules, timeline_path, context_args,
                                strict, flags);
        }
        if (optimize->parsed()) {
            return cmd_optimize(path, we, wt, wr, max_rt, max_energy, exact_only, flags);
        }
    } catch (const sadp::SadpError& e) {
        report_error(e);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
