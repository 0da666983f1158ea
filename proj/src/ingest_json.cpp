#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ingest_detail.hpp"
#include "sadp/errors.hpp"
#include "sadp/ingest.hpp"

namespace sadp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    throw ParseFailure(ErrorCode::SchemaError, message + " (at " + path + ")",
                       ParseLocation{0, 0, path});
}

ParseLocation location_from_byte(const std::string& text, std::size_t byte) {
    ParseLocation loc{1, 1, ""};
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++loc.line;
            loc.column = 1;
        } else {
            ++loc.column;
        }
    }
    return loc;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseFailure(ErrorCode::SyntaxError, e.what(),
                           location_from_byte(text, e.byte > 0 ? e.byte - 1 : 0));
    }
}

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing required field '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    const json& value = require(obj, key, path);
    if (!value.is_string()) schema_error(path + "/" + key, "expected a string");
    return value.get<std::string>();
}

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& path, const ParseOptions& options) {
    if (options.lenient) return;
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* candidate : allowed) {
            if (key == candidate) {
                known = true;
                break;
            }
        }
        if (!known) schema_error(path, "unknown field '" + key + "'");
    }
}

double require_number(const json& value, const std::string& path) {
    if (!value.is_number()) schema_error(path, "expected a number");
    return value.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    return require_number(*it, path + "/" + key);
}

detail::ProfileInput parse_profile(const json& obj, const std::string& path,
                                   const ParseOptions& options) {
    if (!obj.is_object()) schema_error(path, "expected a profile object");
    reject_unknown_fields(obj, {"power_watts", "duration_ms", "reward_units", "quality_score"},
                          path, options);
    detail::ProfileInput input;
    input.power_watts = optional_number(obj, "power_watts", path);
    input.duration_ms = optional_number(obj, "duration_ms", path);
    input.reward_units = optional_number(obj, "reward_units", path);
    input.quality_score = optional_number(obj, "quality_score", path);
    return input;
}

Value parse_plain_value(const json& value, const std::string& path, const std::string& unit) {
    if (value.is_number()) {
        const double number = value.get<double>();
        if (!std::isfinite(number)) schema_error(path, "numeric values must be finite");
        return NumberValue{number, unit};
    }
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_string()) return value.get<std::string>();
    schema_error(path, "expected a number, boolean, or string");
}

DecisionTable parse_table(const std::string& table_id, const json& obj, const std::string& path,
                          const ParseOptions& options) {
    if (!obj.is_object()) schema_error(path, "expected a decision table object");
    reject_unknown_fields(obj, {"id", "hit_policy", "default", "inputs", "rules"}, path, options);

    DecisionTable table;
    table.id = table_id;
    if (auto it = obj.find("id"); it != obj.end()) {
        if (!it->is_string() || it->get<std::string>() != table_id) {
            schema_error(path + "/id", "table id must match its key '" + table_id + "'");
        }
    }
    if (auto it = obj.find("hit_policy"); it != obj.end()) {
        if (!it->is_string() || !parse_hit_policy(it->get<std::string>(), table.hit_policy)) {
            schema_error(path + "/hit_policy", "expected \"first\" or \"unique\"");
        }
    }
    if (auto it = obj.find("default"); it != obj.end()) {
        if (!it->is_string() || !parse_decision(it->get<std::string>(), table.default_output)) {
            schema_error(path + "/default", "expected a modality decision");
        }
    }

    if (auto it = obj.find("inputs"); it != obj.end()) {
        if (!it->is_array()) schema_error(path + "/inputs", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            const std::string entry_path = path + "/inputs/" + std::to_string(i);
            if (!entry.is_object()) schema_error(entry_path, "expected an input object");
            reject_unknown_fields(entry, {"name", "kind", "unit"}, entry_path, options);
            InputDecl decl;
            decl.name = require_string(entry, "name", entry_path);
            const std::string kind = require_string(entry, "kind", entry_path);
            if (kind == "number") {
                decl.kind = ValueKind::Number;
            } else if (kind == "boolean") {
                decl.kind = ValueKind::Boolean;
            } else if (kind == "string") {
                decl.kind = ValueKind::String;
            } else {
                schema_error(entry_path + "/kind", "expected number, boolean, or string");
            }
            if (auto unit = entry.find("unit"); unit != entry.end()) {
                if (!unit->is_string()) schema_error(entry_path + "/unit", "expected a string");
                decl.unit = unit->get<std::string>();
            }
            table.inputs.push_back(std::move(decl));
        }
    }

    if (auto it = obj.find("rules"); it != obj.end()) {
        if (!it->is_array()) schema_error(path + "/rules", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            const std::string entry_path = path + "/rules/" + std::to_string(i);
            if (!entry.is_object()) schema_error(entry_path, "expected a rule object");
            reject_unknown_fields(entry, {"when", "then", "label"}, entry_path, options);
            Rule rule;
            const std::string decision = require_string(entry, "then", entry_path);
            if (!parse_decision(decision, rule.output)) {
                schema_error(entry_path + "/then", "unknown decision '" + decision + "'");
            }
            if (auto label = entry.find("label"); label != entry.end()) {
                if (!label->is_string()) schema_error(entry_path + "/label", "expected a string");
                rule.label = label->get<std::string>();
            }
            if (auto when = entry.find("when"); when != entry.end()) {
                if (!when->is_array()) schema_error(entry_path + "/when", "expected an array");
                for (std::size_t c = 0; c < when->size(); ++c) {
                    const json& cond_json = (*when)[c];
                    const std::string cond_path = entry_path + "/when/" + std::to_string(c);
                    if (!cond_json.is_object()) schema_error(cond_path, "expected a condition");
                    reject_unknown_fields(cond_json, {"var", "op", "value"}, cond_path, options);
                    Condition cond;
                    cond.variable = require_string(cond_json, "var", cond_path);
                    const std::string op = require_string(cond_json, "op", cond_path);
                    if (!parse_comparator(op, cond.comparator)) {
                        schema_error(cond_path + "/op", "unknown comparator '" + op + "'");
                    }
                    // Numeric literals inherit the unit declared on the input.
                    std::string unit;
                    if (const InputDecl* input = table.find_input(cond.variable)) {
                        unit = input->unit;
                    }
                    cond.literal = parse_plain_value(require(cond_json, "value", cond_path),
                                                     cond_path + "/value", unit);
                    rule.conditions.push_back(std::move(cond));
                }
            }
            table.rules.push_back(std::move(rule));
        }
    }
    return table;
}

std::map<std::string, DecisionTable> parse_tables_object(const json& obj, const std::string& path,
                                                         const ParseOptions& options) {
    if (!obj.is_object()) schema_error(path, "expected an object mapping table ids to tables");
    std::map<std::string, DecisionTable> tables;
    for (const auto& [table_id, body] : obj.items()) {
        tables.emplace(table_id, parse_table(table_id, body, path + "/" + table_id, options));
    }
    return tables;
}

AttributeCatalog parse_catalog(const json& value, const std::string& path,
                               const ParseOptions& options) {
    if (!value.is_array()) schema_error(path, "expected an array of {key, category}");
    std::vector<AttributeKey> keys;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const json& entry = value[i];
        const std::string entry_path = path + "/" + std::to_string(i);
        if (!entry.is_object()) schema_error(entry_path, "expected an object");
        reject_unknown_fields(entry, {"key", "category"}, entry_path, options);
        AttributeKey key;
        key.key = require_string(entry, "key", entry_path);
        const std::string category = require_string(entry, "category", entry_path);
        if (!parse_category(category, key.category)) {
            schema_error(entry_path + "/category", "unknown category '" + category + "'");
        }
        keys.push_back(std::move(key));
    }
    try {
        return AttributeCatalog(std::move(keys));
    } catch (const SadpError& e) {
        schema_error(path, e.what());
    }
}

Microservice parse_task(const json& obj, const std::string& path, const AttributeCatalog& catalog,
                        const ParseOptions& options) {
    if (!obj.is_object()) schema_error(path, "expected a task object");
    reject_unknown_fields(
        obj, {"id", "name", "relevance", "annotations", "baseline", "variants", "table"}, path,
        options);

    Microservice ms;
    ms.id = require_string(obj, "id", path);
    ms.name = obj.contains("name") ? require_string(obj, "name", path) : ms.id;
    if (auto it = obj.find("relevance"); it != obj.end()) {
        if (!it->is_string() || !parse_relevance(it->get<std::string>(), ms.relevance)) {
            schema_error(path + "/relevance", "expected \"mandatory\" or \"optional\"");
        }
    }
    if (auto it = obj.find("annotations"); it != obj.end()) {
        if (!it->is_object()) schema_error(path + "/annotations", "expected an object");
        for (const auto& [key, value] : it->items()) {
            if (!value.is_string()) {
                schema_error(path + "/annotations/" + key, "annotation values must be strings");
            }
            ms.annotations.emplace(key, value.get<std::string>());
        }
    }
    if (auto it = obj.find("table"); it != obj.end()) {
        if (!it->is_string()) schema_error(path + "/table", "expected a table id string");
        ms.decision_table_ref = it->get<std::string>();
    }

    detail::ProfileInput baseline;
    if (auto it = obj.find("baseline"); it != obj.end()) {
        baseline = parse_profile(*it, path + "/baseline", options);
    }
    std::map<Modality, detail::ProfileInput> variants;
    if (auto it = obj.find("variants"); it != obj.end()) {
        if (!it->is_object()) schema_error(path + "/variants", "expected an object");
        for (const auto& [token, profile] : it->items()) {
            Modality modality;
            if (!parse_modality(token, modality)) {
                schema_error(path + "/variants", "unknown modality '" + token + "'");
            }
            variants.emplace(modality,
                             parse_profile(profile, path + "/variants/" + token, options));
        }
    }
    detail::finalize_microservice(ms, baseline, variants, catalog,
                                  [&](const std::string& field, const std::string& message) {
                                      schema_error(path + "/" + field, message);
                                  });
    return ms;
}

}  // namespace

WorkflowDocument parse_workflow_json(const std::string& text, ParseOptions options) {
    const json root = parse_text(text);
    if (!root.is_object()) schema_error("/", "expected a JSON object");
    reject_unknown_fields(root, {"format_version", "id", "catalog", "tasks", "edges", "tables"},
                          "/", options);

    WorkflowDocument doc;
    doc.source = DocumentSource::CanonicalJson;
    doc.format_version = require_string(root, "format_version", "/");
    if (doc.format_version != "1.0") {
        schema_error("/format_version", "unrecognized format version '" + doc.format_version +
                                            "' (expected \"1.0\")");
    }
    const std::string model_id = require_string(root, "id", "/");

    AttributeCatalog catalog = AttributeCatalog::standard();
    if (auto it = root.find("catalog"); it != root.end()) {
        catalog = parse_catalog(*it, "/catalog", options);
    }
    if (options.catalog_override) catalog = *options.catalog_override;

    const json& tasks_json = require(root, "tasks", "/");
    if (!tasks_json.is_array()) schema_error("/tasks", "expected an array");
    std::vector<Microservice> tasks;
    for (std::size_t i = 0; i < tasks_json.size(); ++i) {
        tasks.push_back(
            parse_task(tasks_json[i], "/tasks/" + std::to_string(i), catalog, options));
    }

    std::vector<Edge> edges;
    if (auto it = root.find("edges"); it != root.end()) {
        if (!it->is_array()) schema_error("/edges", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            const std::string path = "/edges/" + std::to_string(i);
            if (!entry.is_object()) schema_error(path, "expected an edge object");
            reject_unknown_fields(entry, {"from", "to"}, path, options);
            edges.push_back({require_string(entry, "from", path),
                             require_string(entry, "to", path)});
        }
    }

    std::map<std::string, DecisionTable> tables;
    if (auto it = root.find("tables"); it != root.end()) {
        tables = parse_tables_object(*it, "/tables", options);
    }

    try {
        doc.application = build_application(model_id, std::move(tasks), std::move(edges),
                                            std::move(tables), std::move(catalog));
    } catch (const SadpError& e) {
        throw ParseFailure(ErrorCode::SemanticError,
                           std::string(to_string(e.code())) + ": " + e.what(),
                           ParseLocation{0, 0, "/"});
    }
    return doc;
}

std::map<std::string, DecisionTable> parse_tables_json(const std::string& text,
                                                       ParseOptions options) {
    return parse_tables_object(parse_text(text), "/", options);
}

AttributeCatalog parse_catalog_json(const std::string& text) {
    return parse_catalog(parse_text(text), "/", ParseOptions{});
}

ContextTimeline parse_timeline_json(const std::string& text) {
    const json root = parse_text(text);
    if (!root.is_array()) schema_error("/", "expected an array of timeline entries");
    ContextTimeline timeline;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& entry = root[i];
        const std::string path = "/" + std::to_string(i);
        if (!entry.is_object()) schema_error(path, "expected a timeline entry object");
        reject_unknown_fields(entry, {"request", "context"}, path, ParseOptions{});
        TimelineEntry parsed;
        parsed.request_id = require_string(entry, "request", path);
        if (!seen.insert(parsed.request_id).second) {
            schema_error(path + "/request", "duplicate request id '" + parsed.request_id + "'");
        }
        const json& ctx = require(entry, "context", path);
        if (!ctx.is_object()) schema_error(path + "/context", "expected an object");
        for (const auto& [name, spec] : ctx.items()) {
            const std::string var_path = path + "/context/" + name;
            if (!spec.is_object()) schema_error(var_path, "expected {value, unit?}");
            reject_unknown_fields(spec, {"value", "unit"}, var_path, ParseOptions{});
            std::string unit;
            if (auto u = spec.find("unit"); u != spec.end()) {
                if (!u->is_string()) schema_error(var_path + "/unit", "expected a string");
                unit = u->get<std::string>();
            }
            const json& value = require(spec, "value", var_path);
            if (!unit.empty() && !value.is_number()) {
                schema_error(var_path, "only numeric values can carry a unit");
            }
            parsed.context.variables.emplace(
                name, parse_plain_value(value, var_path + "/value", unit));
        }
        timeline.entries.push_back(std::move(parsed));
    }
    return timeline;
}

namespace {

ordered_json profile_to_json(const ExecutionProfile& profile) {
    ordered_json out;
    out["power_watts"] = profile.power_watts;
    out["duration_ms"] = profile.duration_ms;
    out["reward_units"] = profile.reward_units;
    out["quality_score"] = profile.quality_score;
    return out;
}

ordered_json value_to_json(const Value& value) {
    if (const auto* n = std::get_if<NumberValue>(&value)) return n->value;
    if (const auto* b = std::get_if<bool>(&value)) return *b;
    return std::get<std::string>(value);
}

ordered_json table_to_json(const DecisionTable& table) {
    ordered_json out;
    out["hit_policy"] = to_string(table.hit_policy);
    out["default"] = to_string(table.default_output);
    ordered_json inputs = ordered_json::array();
    for (const auto& input : table.inputs) {
        ordered_json decl;
        decl["name"] = input.name;
        decl["kind"] = to_string(input.kind);
        if (!input.unit.empty()) decl["unit"] = input.unit;
        inputs.push_back(std::move(decl));
    }
    out["inputs"] = std::move(inputs);
    ordered_json rules = ordered_json::array();
    for (const auto& rule : table.rules) {
        ordered_json entry;
        ordered_json when = ordered_json::array();
        for (const auto& cond : rule.conditions) {
            ordered_json c;
            c["var"] = cond.variable;
            c["op"] = to_string(cond.comparator);
            c["value"] = value_to_json(cond.literal);
            when.push_back(std::move(c));
        }
        entry["when"] = std::move(when);
        entry["then"] = to_string(rule.output);
        if (!rule.label.empty()) entry["label"] = rule.label;
        rules.push_back(std::move(entry));
    }
    out["rules"] = std::move(rules);
    return out;
}

// Annotation keys in catalog order first, then foreign keys lexicographically.
ordered_json annotations_to_json(const Microservice& ms, const AttributeCatalog& catalog) {
    ordered_json out = ordered_json::object();
    for (const auto& attr : catalog.attributes()) {
        auto it = ms.annotations.find(attr.key);
        if (it != ms.annotations.end()) out[attr.key] = it->second;
    }
    for (const auto& [key, value] : ms.annotations) {
        if (!catalog.contains(key)) out[key] = value;
    }
    return out;
}

}  // namespace

std::string serialize_workflow(const WorkflowDocument& doc) {
    const ApplicationModel& model = doc.application;
    ordered_json root;
    root["format_version"] = doc.format_version;
    root["id"] = model.id;

    ordered_json catalog = ordered_json::array();
    for (const auto& attr : model.catalog.attributes()) {
        ordered_json entry;
        entry["key"] = attr.key;
        entry["category"] = to_string(attr.category);
        catalog.push_back(std::move(entry));
    }
    root["catalog"] = std::move(catalog);

    ordered_json tasks = ordered_json::array();
    for (const auto& ms : model.microservices) {
        ordered_json task;
        task["id"] = ms.id;
        task["name"] = ms.name;
        if (ms.relevance != Relevance::Unannotated) {
            task["relevance"] = to_string(ms.relevance);
        }
        if (!ms.annotations.empty()) {
            task["annotations"] = annotations_to_json(ms, model.catalog);
        }
        task["baseline"] = profile_to_json(ms.baseline_profile);
        if (!ms.declared_variants.empty()) {
            ordered_json variants;
            for (Modality m : kAllModalities) {
                auto it = ms.declared_variants.find(m);
                if (it != ms.declared_variants.end()) {
                    variants[std::string(modality_token(m))] = profile_to_json(it->second);
                }
            }
            task["variants"] = std::move(variants);
        }
        if (ms.decision_table_ref) task["table"] = *ms.decision_table_ref;
        tasks.push_back(std::move(task));
    }
    root["tasks"] = std::move(tasks);

    ordered_json edges = ordered_json::array();
    for (const auto& edge : model.edges) {
        ordered_json entry;
        entry["from"] = edge.from_id;
        entry["to"] = edge.to_id;
        edges.push_back(std::move(entry));
    }
    root["edges"] = std::move(edges);

    ordered_json tables = ordered_json::object();
    for (const auto& [table_id, table] : model.decision_tables) {
        tables[table_id] = table_to_json(table);
    }
    root["tables"] = std::move(tables);

    return root.dump(2) + "\n";
}

std::string scorecard_to_json(const SadpScorecard& card) {
    ordered_json root;
    root["step1"] = card.step1;
    root["step2"] = card.step2;
    root["step2_mode"] = to_string(card.step2_mode);
    root["step3"] = card.step3;
    ordered_json coverage = ordered_json::array();
    for (const auto& [ms_id, counts] : card.per_microservice_coverage) {
        ordered_json entry;
        entry["id"] = ms_id;
        entry["annotated"] = counts.annotated_count;
        entry["variants"] = counts.variant_count;
        coverage.push_back(std::move(entry));
    }
    root["coverage"] = std::move(coverage);
    return root.dump(2) + "\n";
}

namespace {

ordered_json report_to_json_value(const SimulationReport& report) {
    ordered_json root;
    ordered_json outcomes = ordered_json::array();
    for (const auto& outcome : report.outcomes) {
        ordered_json entry;
        entry["id"] = outcome.id;
        entry["decision"] = to_string(outcome.decision);
        if (outcome.profile_used) {
            entry["power_watts"] = outcome.profile_used->power_watts;
            entry["duration_ms"] = outcome.profile_used->duration_ms;
            entry["reward_units"] = outcome.profile_used->reward_units;
            entry["quality_score"] = outcome.profile_used->quality_score;
        }
        entry["energy_j"] = outcome.energy_j;
        entry["fallback_used"] = outcome.fallback_used;
        entry["clamped"] = outcome.clamped;
        outcomes.push_back(std::move(entry));
    }
    root["outcomes"] = std::move(outcomes);
    root["total_energy_j"] = report.total_energy_j;
    root["response_time_ms"] = report.response_time_ms;
    root["total_reward"] = report.total_reward;
    root["mean_quality"] = report.mean_quality;
    root["warnings"] = report.warnings;
    return root;
}

}  // namespace

std::string report_to_json(const SimulationReport& report) {
    return report_to_json_value(report).dump(2) + "\n";
}

std::string assignment_to_json(const Assignment& assignment) {
    ordered_json root;
    ordered_json decisions = ordered_json::object();
    for (const auto& [ms_id, decision] : assignment.decisions) {
        decisions[ms_id] = to_string(decision);
    }
    root["decisions"] = std::move(decisions);
    root["clamped"] = assignment.clamped;
    root["warnings"] = assignment.warnings;
    return root.dump(2) + "\n";
}

std::string optimization_to_json(const OptimizationResult& result) {
    ordered_json root;
    ordered_json decisions = ordered_json::object();
    for (const auto& [ms_id, decision] : result.assignment.decisions) {
        decisions[ms_id] = to_string(decision);
    }
    root["assignment"] = std::move(decisions);
    root["objective_value"] = result.objective_value;
    root["exact"] = result.exact;
    root["report"] = report_to_json_value(result.report);
    return root.dump(2) + "\n";
}

std::string timeline_run_to_json(const TimelineRun& run) {
    ordered_json root;
    ordered_json entries = ordered_json::array();
    for (const auto& entry : run.entries) {
        ordered_json e;
        e["request"] = entry.request_id;
        if (entry.report) {
            e["report"] = report_to_json_value(*entry.report);
        } else {
            e["error"] = entry.error;
        }
        entries.push_back(std::move(e));
    }
    root["entries"] = std::move(entries);
    ordered_json totals;
    totals["total_energy_j"] = run.total_energy_j;
    totals["total_reward"] = run.total_reward;
    totals["mean_response_time_ms"] = run.mean_response_time_ms;
    totals["entries"] = run.entries.size();
    totals["failed"] = run.failed_entries;
    root["totals"] = std::move(totals);
    return root.dump(2) + "\n";
}

std::string issues_to_json(const std::vector<ValidationIssue>& issues) {
    ordered_json root = ordered_json::array();
    for (const auto& issue : issues) {
        ordered_json entry;
        entry["severity"] = to_string(issue.severity);
        entry["code"] = issue.code;
        entry["message"] = issue.message;
        entry["subject"] = issue.subject;
        root.push_back(std::move(entry));
    }
    return root.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SadpError(ErrorCode::InvalidArgument, "cannot open file '" + path + "'", path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SadpError(ErrorCode::InvalidArgument, "cannot write file '" + path + "'", path);
    }
    out << content;
}

}  // namespace sadp
