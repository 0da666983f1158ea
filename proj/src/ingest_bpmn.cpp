#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ingest_detail.hpp"
#include "sadp/errors.hpp"
#include "sadp/ingest.hpp"
#include "xml_reader.hpp"

namespace sadp {

namespace {

[[noreturn]] void fail_at(ErrorCode code, const std::string& message, const xml::Element& element) {
    throw ParseFailure(code, message, ParseLocation{element.line, element.column, element.name});
}

[[noreturn]] void fail_line(ErrorCode code, const std::string& message, int line) {
    throw ParseFailure(code, message, ParseLocation{line, 1, ""});
}

struct BpmnTask {
    std::string id;
    std::string name;
    Relevance relevance = Relevance::Unannotated;
    std::set<Modality> declared_variants;
    std::map<std::string, std::string> annotations;              // plain key: value lines
    std::map<Modality, detail::ProfileInput> variant_overrides;  // key@MOD lines
    std::optional<std::string> table_ref;
    int order = 0;  // document order
};

struct BpmnGraph {
    std::string process_id;
    std::vector<BpmnTask> tasks;                          // document order
    std::map<std::string, std::string> rule_tasks;        // brt id -> table id
    std::vector<std::pair<std::string, std::string>> flows;
    std::vector<const xml::Element*> annotations;         // textAnnotation elements
    std::vector<const xml::Element*> associations;
    std::set<std::string> gateway_ids;
};

std::string require_attr(const xml::Element& element, const std::string& name) {
    const std::string* value = element.attribute(name);
    if (value == nullptr || value->empty()) {
        fail_at(ErrorCode::SchemaError,
                "<" + element.local_name() + "> requires attribute '" + name + "'", element);
    }
    return *value;
}

void collect_process_children(const xml::Element& process, BpmnGraph& graph) {
    int order = 0;
    for (const auto& child : process.children) {
        const std::string name = child.local_name();
        if (name == "task" || name == "serviceTask") {
            BpmnTask task;
            task.id = require_attr(child, "id");
            const std::string* display = child.attribute("name");
            task.name = display ? *display : task.id;
            task.order = order++;
            if (const std::string* relevance = child.attribute("sadp:relevance")) {
                if (!parse_relevance(*relevance, task.relevance) ||
                    task.relevance == Relevance::Unannotated) {
                    fail_at(ErrorCode::MalformedAnnotation,
                            "sadp:relevance must be 'optional' or 'mandatory', got '" +
                                *relevance + "'",
                            child);
                }
            }
            if (const std::string* variants = child.attribute("sadp:variants")) {
                std::stringstream tokens(*variants);
                std::string token;
                while (std::getline(tokens, token, ',')) {
                    token.erase(0, token.find_first_not_of(" \t"));
                    token.erase(token.find_last_not_of(" \t") + 1);
                    Modality modality;
                    if (!parse_modality(token, modality)) {
                        fail_at(ErrorCode::MalformedAnnotation,
                                "sadp:variants holds unknown modality '" + token + "'", child);
                    }
                    task.declared_variants.insert(modality);
                }
            }
            graph.tasks.push_back(std::move(task));
        } else if (name == "businessRuleTask") {
            const std::string id = require_attr(child, "id");
            const std::string* table = child.attribute("sadp:table");
            if (table == nullptr || table->empty()) {
                fail_at(ErrorCode::MalformedAnnotation,
                        "businessRuleTask '" + id + "' is missing the sadp:table attribute",
                        child);
            }
            graph.rule_tasks.emplace(id, *table);
        } else if (name == "sequenceFlow") {
            graph.flows.emplace_back(require_attr(child, "sourceRef"),
                                     require_attr(child, "targetRef"));
        } else if (name == "parallelGateway") {
            graph.gateway_ids.insert(require_attr(child, "id"));
        } else if (name == "textAnnotation") {
            graph.annotations.push_back(&child);
        } else if (name == "association") {
            graph.associations.push_back(&child);
        } else {
            fail_at(ErrorCode::UnsupportedElement,
                    "element <" + child.name + "> is outside the supported BPMN subset", child);
        }
    }
}

BpmnTask* find_task(BpmnGraph& graph, const std::string& id) {
    for (auto& task : graph.tasks) {
        if (task.id == id) return &task;
    }
    return nullptr;
}

// Annotation text: one `key: value` or `key@MOD: value` pair per non-empty
// line. Returns pairs with the 1-based source line of each.
std::vector<std::pair<std::string, std::string>> annotation_lines(const xml::Element& annotation,
                                                                  std::vector<int>& line_numbers) {
    const xml::Element* body = &annotation;
    for (const auto& child : annotation.children) {
        if (child.local_name() == "text") {
            body = &child;
            break;
        }
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& segment : body->text_segments) {
        std::stringstream lines(segment.text);
        std::string line;
        int line_number = segment.line;
        while (std::getline(lines, line)) {
            const int current_line = line_number++;
            std::string trimmed = line;
            trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
            trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
            if (trimmed.empty()) continue;
            const auto colon = trimmed.find(':');
            if (colon == std::string::npos || colon == 0) {
                fail_line(ErrorCode::MalformedAnnotation,
                          "annotation line '" + trimmed + "' is not a 'key: value' pair",
                          current_line);
            }
            std::string key = trimmed.substr(0, colon);
            std::string value = trimmed.substr(colon + 1);
            key.erase(key.find_last_not_of(" \t") + 1);
            value.erase(0, value.find_first_not_of(" \t"));
            pairs.emplace_back(std::move(key), std::move(value));
            line_numbers.push_back(current_line);
        }
    }
    return pairs;
}

const std::set<std::string, std::less<>> kProfileKeys = {"power", "duration", "reward", "quality"};

void apply_annotation(BpmnTask& task, const std::string& key, const std::string& value,
                      int line) {
    const auto at = key.find('@');
    if (at == std::string::npos) {
        if (!task.annotations.emplace(key, value).second) {
            fail_line(ErrorCode::MalformedAnnotation,
                      "duplicate annotation key '" + key + "' on task '" + task.id + "'", line);
        }
        return;
    }
    const std::string base = key.substr(0, at);
    const std::string modality_token = key.substr(at + 1);
    Modality modality;
    if (!parse_modality(modality_token, modality)) {
        fail_line(ErrorCode::MalformedAnnotation,
                  "unknown modality suffix '@" + modality_token + "' in annotation key '" + key +
                      "'",
                  line);
    }
    if (task.declared_variants.count(modality) == 0) {
        fail_line(ErrorCode::MalformedAnnotation,
                  "task '" + task.id + "' gives a value for undeclared variant '" +
                      modality_token + "' (declare it in sadp:variants)",
                  line);
    }
    if (kProfileKeys.count(base) == 0) {
        fail_line(ErrorCode::MalformedAnnotation,
                  "variant-scoped key '" + key + "' must be one of power, duration, reward, "
                  "quality",
                  line);
    }
    const auto number = detail::parse_full_number(value);
    if (!number) {
        fail_line(ErrorCode::MalformedAnnotation,
                  "variant value '" + value + "' for '" + key + "' is not a number", line);
    }
    detail::ProfileInput& overrides = task.variant_overrides[modality];
    if (base == "power") {
        overrides.power_watts = *number;
    } else if (base == "duration") {
        overrides.duration_ms = *number;
    } else if (base == "reward") {
        overrides.reward_units = *number;
    } else {
        overrides.quality_score = *number;
    }
}

void attach_annotations(BpmnGraph& graph) {
    std::unordered_map<std::string, const xml::Element*> annotation_by_id;
    for (const xml::Element* annotation : graph.annotations) {
        annotation_by_id.emplace(require_attr(*annotation, "id"), annotation);
    }
    std::unordered_set<const xml::Element*> attached;
    for (const xml::Element* association : graph.associations) {
        const std::string source = require_attr(*association, "sourceRef");
        const std::string target = require_attr(*association, "targetRef");
        // Either end may be the annotation.
        const xml::Element* annotation = nullptr;
        BpmnTask* task = nullptr;
        for (const auto& [first, second] : {std::pair{source, target}, std::pair{target, source}}) {
            auto it = annotation_by_id.find(first);
            if (it != annotation_by_id.end()) {
                annotation = it->second;
                task = find_task(graph, second);
            }
        }
        if (annotation == nullptr || task == nullptr) {
            fail_at(ErrorCode::DanglingAssociation,
                    "association must join one textAnnotation to one task (got '" + source +
                        "' -> '" + target + "')",
                    *association);
        }
        attached.insert(annotation);
        std::vector<int> lines;
        const auto pairs = annotation_lines(*annotation, lines);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            apply_annotation(*task, pairs[i].first, pairs[i].second, lines[i]);
        }
    }
    for (const xml::Element* annotation : graph.annotations) {
        if (attached.count(annotation) == 0) {
            fail_at(ErrorCode::DanglingAssociation,
                    "textAnnotation '" + require_attr(*annotation, "id") +
                        "' is not associated with any task",
                    *annotation);
        }
    }
}

// Rewrites flows so that parallel gateways and business-rule tasks disappear:
// every predecessor connects to every successor; a business-rule task donates
// its table to each successor task.
std::vector<Edge> resolve_flows(BpmnGraph& graph) {
    std::map<std::string, std::vector<std::string>> successors;
    std::map<std::string, std::vector<std::string>> predecessors;
    for (const auto& [from, to] : graph.flows) {
        for (const std::string& node : {from, to}) {
            const bool known = find_task(graph, node) != nullptr ||
                               graph.rule_tasks.count(node) != 0 ||
                               graph.gateway_ids.count(node) != 0;
            if (!known) {
                throw ParseFailure(ErrorCode::SchemaError,
                                   "sequenceFlow references unknown node '" + node + "'",
                                   ParseLocation{0, 0, node});
            }
        }
        successors[from].push_back(to);
        predecessors[to].push_back(from);
    }

    auto eliminate = [&](const std::string& node) {
        const auto preds = predecessors[node];
        const auto succs = successors[node];
        for (const auto& pred : preds) {
            auto& out = successors[pred];
            out.erase(std::remove(out.begin(), out.end(), node), out.end());
            for (const auto& succ : succs) out.push_back(succ);
        }
        for (const auto& succ : succs) {
            auto& in = predecessors[succ];
            in.erase(std::remove(in.begin(), in.end(), node), in.end());
            for (const auto& pred : preds) in.push_back(pred);
        }
        successors.erase(node);
        predecessors.erase(node);
    };

    for (const auto& gateway : graph.gateway_ids) eliminate(gateway);

    for (const auto& [brt_id, table_id] : graph.rule_tasks) {
        for (const auto& succ : successors[brt_id]) {
            BpmnTask* task = find_task(graph, succ);
            if (task == nullptr) {
                throw ParseFailure(ErrorCode::SchemaError,
                                   "businessRuleTask '" + brt_id +
                                       "' must immediately precede a task, not '" + succ + "'",
                                   ParseLocation{0, 0, brt_id});
            }
            if (task->table_ref && *task->table_ref != table_id) {
                throw ParseFailure(ErrorCode::SchemaError,
                                   "task '" + task->id + "' is preceded by two different rule "
                                   "tables ('" + *task->table_ref + "' and '" + table_id + "')",
                                   ParseLocation{0, 0, task->id});
            }
            task->table_ref = table_id;
        }
        eliminate(brt_id);
    }

    std::vector<Edge> edges;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& task : graph.tasks) {
        auto it = successors.find(task.id);
        if (it == successors.end()) continue;
        for (const auto& succ : it->second) {
            if (seen.emplace(task.id, succ).second) {
                edges.push_back({task.id, succ});
            }
        }
    }
    return edges;
}

}  // namespace

WorkflowDocument import_bpmn_subset(const std::string& xml_text,
                                    std::map<std::string, DecisionTable> sidecar_tables) {
    const xml::Element root = xml::parse_document(xml_text);

    const xml::Element* process = nullptr;
    if (root.local_name() == "process") {
        process = &root;
    } else if (root.local_name() == "definitions") {
        for (const auto& child : root.children) {
            if (child.local_name() == "process") {
                if (process != nullptr) {
                    fail_at(ErrorCode::UnsupportedElement,
                            "only a single <process> per document is supported", child);
                }
                process = &child;
            } else {
                fail_at(ErrorCode::UnsupportedElement,
                        "element <" + child.name + "> is outside the supported BPMN subset",
                        child);
            }
        }
        if (process == nullptr) {
            fail_at(ErrorCode::SchemaError, "<definitions> holds no <process>", root);
        }
    } else {
        fail_at(ErrorCode::UnsupportedElement,
                "expected <definitions> or <process> at the document root, got <" + root.name +
                    ">",
                root);
    }

    BpmnGraph graph;
    graph.process_id = require_attr(*process, "id");
    collect_process_children(*process, graph);
    if (graph.tasks.empty()) {
        fail_at(ErrorCode::SchemaError, "process '" + graph.process_id + "' declares no tasks",
                *process);
    }
    attach_annotations(graph);
    std::vector<Edge> edges = resolve_flows(graph);

    const AttributeCatalog catalog = AttributeCatalog::standard();
    std::vector<Microservice> microservices;
    microservices.reserve(graph.tasks.size());
    for (auto& task : graph.tasks) {
        Microservice ms;
        ms.id = task.id;
        ms.name = task.name;
        ms.relevance = task.relevance;
        ms.annotations = std::move(task.annotations);
        ms.decision_table_ref = task.table_ref;
        std::map<Modality, detail::ProfileInput> variants;
        for (Modality modality : task.declared_variants) {
            auto it = task.variant_overrides.find(modality);
            variants.emplace(modality, it == task.variant_overrides.end()
                                           ? detail::ProfileInput{}
                                           : it->second);
        }
        detail::finalize_microservice(
            ms, detail::ProfileInput{}, variants, catalog,
            [&](const std::string& field, const std::string& message) {
                throw ParseFailure(ErrorCode::SchemaError,
                                   "task '" + ms.id + "' " + field + ": " + message,
                                   ParseLocation{0, 0, ms.id});
            });
        microservices.push_back(std::move(ms));
    }

    WorkflowDocument doc;
    doc.source = DocumentSource::BpmnSubset;
    try {
        doc.application = build_application(graph.process_id, std::move(microservices),
                                            std::move(edges), std::move(sidecar_tables), catalog);
    } catch (const SadpError& e) {
        throw ParseFailure(ErrorCode::SemanticError,
                           std::string(to_string(e.code())) + ": " + e.what(),
                           ParseLocation{0, 0, graph.process_id});
    }
    return doc;
}

}  // namespace sadp
