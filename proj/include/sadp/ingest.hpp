#pragma once

#include <map>
#include <optional>
#include <string>

#include "sadp/engine.hpp"
#include "sadp/model.hpp"
#include "sadp/scoring.hpp"

namespace sadp {

enum class DocumentSource { CanonicalJson, BpmnSubset };

struct WorkflowDocument {
    std::string format_version = "1.0";
    ApplicationModel application;
    DocumentSource source = DocumentSource::CanonicalJson;
};

struct ParseOptions {
    bool lenient = false;  // accept unknown fields instead of rejecting them
    // Replaces the document's attribute catalog (annotation checks and
    // profile seeding follow the override).
    std::optional<AttributeCatalog> catalog_override;
};

// Parses the canonical workflow JSON (format_version "1.0"). Unknown fields
// are rejected unless options.lenient. Throws ParseFailure with SyntaxError,
// SchemaError, or SemanticError (structural model violations).
WorkflowDocument parse_workflow_json(const std::string& text, ParseOptions options = {});

// Canonical serialization: documented key order, lists in model order,
// numbers rendered shortest-round-trip. parse(serialize(d)) equals d's model
// and a second serialization is byte-identical.
std::string serialize_workflow(const WorkflowDocument& doc);

// Imports the restricted BPMN-XML subset. Decision-table bodies are never
// read from the XML; pass them through `sidecar_tables` (schema as in the
// workflow JSON "tables" field). Throws ParseFailure with UnsupportedElement,
// MalformedAnnotation, DanglingAssociation, or the JSON/semantic codes.
WorkflowDocument import_bpmn_subset(const std::string& xml,
                                    std::map<std::string, DecisionTable> sidecar_tables = {});

// Parses a decision-table sidecar: a JSON object mapping table id -> table.
std::map<std::string, DecisionTable> parse_tables_json(const std::string& text,
                                                       ParseOptions options = {});

// Parses a catalog override file: a JSON array of {key, category}.
AttributeCatalog parse_catalog_json(const std::string& text);

// Timeline JSON: [{"request": id, "context": {var: {"value": v, "unit"?: u}}}].
ContextTimeline parse_timeline_json(const std::string& text);

// Report/scorecard JSON renderings (documented schemas, deterministic output).
std::string scorecard_to_json(const SadpScorecard& card);
std::string report_to_json(const SimulationReport& report);
std::string assignment_to_json(const Assignment& assignment);
std::string optimization_to_json(const OptimizationResult& result);
std::string timeline_run_to_json(const TimelineRun& run);
std::string issues_to_json(const std::vector<ValidationIssue>& issues);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sadp
