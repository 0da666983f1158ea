#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sadp/engine.hpp"
#include "sadp/errors.hpp"
#include "sadp/ingest.hpp"
#include "sadp/model.hpp"
#include "sadp/scoring.hpp"

namespace py = pybind11;

namespace {

std::string decision_str(sadp::ModalityDecision d) { return std::string(sadp::to_string(d)); }

sadp::ModalityDecision decision_from_str(const std::string& text) {
    sadp::ModalityDecision decision;
    if (!sadp::parse_decision(text, decision)) {
        throw sadp::SadpError(sadp::ErrorCode::InvalidArgument,
                              "unknown decision '" + text + "'");
    }
    return decision;
}

sadp::WorkflowMode mode_from_tokens(const std::vector<std::string>& tokens) {
    sadp::WorkflowMode mode;
    for (const auto& token : tokens) {
        if (token == "normal") {
        } else if (token == "basic") {
            mode.basic = true;
        } else if (token == "low-power") {
            mode.low_power = true;
        } else if (token == "high-performance") {
            mode.high_performance = true;
        } else {
            throw sadp::SadpError(sadp::ErrorCode::InvalidArgument,
                                  "unknown mode '" + token + "'");
        }
    }
    return mode;
}

// Context dicts accept float/int, (value, unit) tuples, bool, and str.
sadp::ContextSnapshot context_from_dict(const py::dict& variables) {
    sadp::ContextSnapshot ctx;
    for (const auto& item : variables) {
        const std::string name = py::cast<std::string>(item.first);
        const py::handle value = item.second;
        if (py::isinstance<py::bool_>(value)) {
            ctx.variables[name] = py::cast<bool>(value);
        } else if (py::isinstance<py::int_>(value) || py::isinstance<py::float_>(value)) {
            ctx.variables[name] = sadp::NumberValue{py::cast<double>(value), ""};
        } else if (py::isinstance<py::tuple>(value)) {
            const auto pair = py::cast<std::pair<double, std::string>>(value);
            ctx.variables[name] = sadp::NumberValue{pair.first, pair.second};
        } else {
            ctx.variables[name] = py::cast<std::string>(value);
        }
    }
    return ctx;
}

py::dict assignment_decisions(const sadp::Assignment& assignment) {
    py::dict out;
    for (const auto& [ms_id, decision] : assignment.decisions) {
        out[py::str(ms_id)] = decision_str(decision);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_sadp, m) {
    m.doc() = "Sustainability scoring and execution simulation for annotated workflows";

    const auto sadp_error =
        py::register_exception<sadp::SadpError>(m, "SadpError", PyExc_RuntimeError);
    py::register_exception<sadp::ParseFailure>(m, "ParseError", sadp_error);

    py::class_<sadp::ValidationIssue>(m, "ValidationIssue")
        .def_readonly("code", &sadp::ValidationIssue::code)
        .def_readonly("message", &sadp::ValidationIssue::message)
        .def_readonly("subject", &sadp::ValidationIssue::subject)
        .def_property_readonly("severity",
                               [](const sadp::ValidationIssue& issue) {
                                   return std::string(sadp::to_string(issue.severity));
                               })
        .def("__repr__", [](const sadp::ValidationIssue& issue) {
            return "<ValidationIssue " + std::string(sadp::to_string(issue.severity)) + " " +
                   issue.code + " (" + issue.subject + ")>";
        });

    py::class_<sadp::ApplicationModel>(m, "ApplicationModel")
        .def_readonly("id", &sadp::ApplicationModel::id)
        .def_property_readonly("task_ids",
                               [](const sadp::ApplicationModel& model) {
                                   std::vector<std::string> ids;
                                   for (const auto& ms : model.microservices) ids.push_back(ms.id);
                                   return ids;
                               })
        .def("__len__", &sadp::ApplicationModel::size)
        .def("__eq__", [](const sadp::ApplicationModel& a,
                          const sadp::ApplicationModel& b) { return a == b; });

    py::class_<sadp::WorkflowDocument>(m, "WorkflowDocument")
        .def_readonly("format_version", &sadp::WorkflowDocument::format_version)
        .def_readonly("application", &sadp::WorkflowDocument::application);

    py::class_<sadp::SadpScorecard>(m, "Scorecard")
        .def_readonly("step1", &sadp::SadpScorecard::step1)
        .def_readonly("step2", &sadp::SadpScorecard::step2)
        .def_readonly("step3", &sadp::SadpScorecard::step3)
        .def_property_readonly("step2_mode",
                               [](const sadp::SadpScorecard& card) {
                                   return std::string(sadp::to_string(card.step2_mode));
                               })
        .def_property_readonly("coverage",
                               [](const sadp::SadpScorecard& card) {
                                   py::dict out;
                                   for (const auto& [ms_id, counts] :
                                        card.per_microservice_coverage) {
                                       out[py::str(ms_id)] = py::make_tuple(
                                           counts.annotated_count, counts.variant_count);
                                   }
                                   return out;
                               })
        .def("__repr__", [](const sadp::SadpScorecard& card) {
            return "<Scorecard step1=" + std::to_string(card.step1) +
                   " step2=" + std::to_string(card.step2) +
                   " step3=" + std::to_string(card.step3) + ">";
        });

    py::class_<sadp::Assignment>(m, "Assignment")
        .def_property_readonly("decisions", &assignment_decisions)
        .def_readonly("warnings", &sadp::Assignment::warnings)
        .def_property_readonly("clamped",
                               [](const sadp::Assignment& a) {
                                   return std::vector<std::string>(a.clamped.begin(),
                                                                   a.clamped.end());
                               })
        .def("__getitem__", [](const sadp::Assignment& a, const std::string& ms_id) {
            auto it = a.decisions.find(ms_id);
            if (it == a.decisions.end()) throw py::key_error(ms_id);
            return decision_str(it->second);
        });

    py::class_<sadp::TaskOutcome>(m, "TaskOutcome")
        .def_readonly("id", &sadp::TaskOutcome::id)
        .def_readonly("energy_j", &sadp::TaskOutcome::energy_j)
        .def_readonly("clamped", &sadp::TaskOutcome::clamped)
        .def_readonly("fallback_used", &sadp::TaskOutcome::fallback_used)
        .def_property_readonly("decision", [](const sadp::TaskOutcome& outcome) {
            return decision_str(outcome.decision);
        });

    py::class_<sadp::SimulationReport>(m, "SimulationReport")
        .def_readonly("outcomes", &sadp::SimulationReport::outcomes)
        .def_readonly("total_energy_j", &sadp::SimulationReport::total_energy_j)
        .def_readonly("response_time_ms", &sadp::SimulationReport::response_time_ms)
        .def_readonly("total_reward", &sadp::SimulationReport::total_reward)
        .def_readonly("mean_quality", &sadp::SimulationReport::mean_quality)
        .def_readonly("warnings", &sadp::SimulationReport::warnings)
        .def("to_json", &sadp::report_to_json);

    py::class_<sadp::OptimizationResult>(m, "OptimizationResult")
        .def_readonly("report", &sadp::OptimizationResult::report)
        .def_readonly("objective_value", &sadp::OptimizationResult::objective_value)
        .def_readonly("exact", &sadp::OptimizationResult::exact)
        .def_readonly("assignment", &sadp::OptimizationResult::assignment);

    m.def(
        "parse_workflow_json",
        [](const std::string& text, bool lenient) {
            return sadp::parse_workflow_json(text, {lenient});
        },
        py::arg("text"), py::arg("lenient") = false);
    m.def(
        "load_workflow",
        [](const std::string& path, bool lenient) {
            return sadp::parse_workflow_json(sadp::read_file(path), {lenient});
        },
        py::arg("path"), py::arg("lenient") = false);
    m.def("serialize_workflow", &sadp::serialize_workflow, py::arg("doc"));
    m.def(
        "import_bpmn",
        [](const std::string& xml, const std::string& tables_json) {
            std::map<std::string, sadp::DecisionTable> tables;
            if (!tables_json.empty()) tables = sadp::parse_tables_json(tables_json);
            return sadp::import_bpmn_subset(xml, std::move(tables));
        },
        py::arg("xml"), py::arg("tables_json") = std::string());

    m.def("validate", &sadp::validate, py::arg("model"));
    m.def("topological_order", &sadp::topological_order, py::arg("model"));

    m.def(
        "scorecard",
        [](const sadp::ApplicationModel& model, const std::string& step2_mode) {
            return sadp::scorecard(model, step2_mode == "explicit" ? sadp::Step2Mode::Explicit
                                                                   : sadp::Step2Mode::Implicit);
        },
        py::arg("model"), py::arg("step2_mode") = "implicit");
    m.def("step1_score", &sadp::step1_score, py::arg("model"));
    m.def("step2_score_explicit", &sadp::step2_score_explicit, py::arg("model"));
    m.def("step2_score_implicit", &sadp::step2_score_implicit, py::arg("model"));
    m.def("step3_score", &sadp::step3_score, py::arg("model"));

    m.def(
        "resolve_all_in",
        [](const sadp::ApplicationModel& model, const std::vector<std::string>& modes) {
            return sadp::resolve_all_in(model, mode_from_tokens(modes));
        },
        py::arg("model"), py::arg("modes"));
    m.def(
        "resolve_rule_driven",
        [](const sadp::ApplicationModel& model, const py::dict& context) {
            return sadp::resolve_rule_driven(model, context_from_dict(context));
        },
        py::arg("model"), py::arg("context"));
    m.def("simulate", &sadp::simulate, py::arg("model"), py::arg("assignment"));
    m.def(
        "make_assignment",
        [](const py::dict& decisions) {
            sadp::Assignment assignment;
            for (const auto& item : decisions) {
                assignment.decisions.emplace(py::cast<std::string>(item.first),
                                             decision_from_str(py::cast<std::string>(item.second)));
            }
            return assignment;
        },
        py::arg("decisions"));
    m.def(
        "optimize",
        [](const sadp::ApplicationModel& model, double we, double wt, double wr,
           std::optional<double> max_rt, std::optional<double> max_energy, bool allow_greedy) {
            sadp::OptimizationObjective objective;
            objective.weight_energy = we;
            objective.weight_time = wt;
            objective.weight_reward = wr;
            objective.max_response_time_ms = max_rt;
            objective.max_energy_j = max_energy;
            return sadp::optimize_assignment(model, objective, allow_greedy);
        },
        py::arg("model"), py::arg("we") = 0.0, py::arg("wt") = 0.0, py::arg("wr") = 0.0,
        py::arg("max_rt") = std::nullopt, py::arg("max_energy") = std::nullopt,
        py::arg("allow_greedy") = true);
    m.def(
        "run_timeline_rule_driven",
        [](const sadp::ApplicationModel& model, const std::string& timeline_json, bool strict) {
            sadp::EnactmentConfig config;
            config.strategy = sadp::EnactmentConfig::Strategy::RuleDriven;
            const auto run = sadp::run_timeline(model, config,
                                                sadp::parse_timeline_json(timeline_json), strict);
            return sadp::timeline_run_to_json(run);
        },
        py::arg("model"), py::arg("timeline_json"), py::arg("strict") = false);

    m.attr("__version__") = "1.0.0";
}
