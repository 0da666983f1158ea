#include "sadp/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sadp/errors.hpp"

namespace sadp {

std::string_view to_string(AttributeCategory c) {
    switch (c) {
        case AttributeCategory::Functional: return "functional";
        case AttributeCategory::Quality: return "quality";
        case AttributeCategory::Sustainability: return "sustainability";
    }
    return "?";
}

bool parse_category(std::string_view text, AttributeCategory& out) {
    if (text == "functional") {
        out = AttributeCategory::Functional;
    } else if (text == "quality") {
        out = AttributeCategory::Quality;
    } else if (text == "sustainability") {
        out = AttributeCategory::Sustainability;
    } else {
        return false;
    }
    return true;
}

AttributeCatalog::AttributeCatalog(std::vector<AttributeKey> attributes)
    : attributes_(std::move(attributes)) {
    if (attributes_.empty()) {
        throw SadpError(ErrorCode::InvalidArgument, "attribute catalog must hold at least one key");
    }
    std::set<std::string_view> seen;
    for (const auto& attr : attributes_) {
        if (attr.key.empty()) {
            throw SadpError(ErrorCode::InvalidArgument, "attribute catalog keys must be non-empty");
        }
        if (!seen.insert(attr.key).second) {
            throw SadpError(ErrorCode::InvalidArgument,
                            "duplicate attribute key '" + attr.key + "' in catalog");
        }
    }
}

AttributeCatalog AttributeCatalog::standard() {
    return AttributeCatalog({{"resources", AttributeCategory::Functional},
                             {"qos", AttributeCategory::Quality},
                             {"power", AttributeCategory::Sustainability},
                             {"cost", AttributeCategory::Sustainability}});
}

bool AttributeCatalog::contains(std::string_view key) const {
    return std::any_of(attributes_.begin(), attributes_.end(),
                       [&](const AttributeKey& a) { return a.key == key; });
}

const Microservice* ApplicationModel::find(std::string_view ms_id) const {
    for (const auto& ms : microservices) {
        if (ms.id == ms_id) return &ms;
    }
    return nullptr;
}

std::size_t ApplicationModel::index_of(std::string_view ms_id) const {
    for (std::size_t i = 0; i < microservices.size(); ++i) {
        if (microservices[i].id == ms_id) return i;
    }
    return static_cast<std::size_t>(-1);
}

namespace {

// Kahn's algorithm over input indices; the ready task with the smallest input
// position runs first, which makes the order deterministic.
std::vector<std::size_t> topological_indices(const std::vector<Microservice>& microservices,
                                             const std::vector<Edge>& edges,
                                             const std::unordered_map<std::string, std::size_t>& index) {
    const std::size_t n = microservices.size();
    std::vector<std::vector<std::size_t>> successors(n);
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& edge : edges) {
        const std::size_t from = index.at(edge.from_id);
        const std::size_t to = index.at(edge.to_id);
        successors[from].push_back(to);
        ++indegree[to];
    }

    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }

    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t next = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(next);
        for (std::size_t succ : successors[next]) {
            if (--indegree[succ] == 0) ready.insert(succ);
        }
    }
    return order;  // shorter than n iff the graph has a cycle
}

}  // namespace

ApplicationModel build_application(std::string id, std::vector<Microservice> microservices,
                                   std::vector<Edge> edges,
                                   std::map<std::string, DecisionTable> tables,
                                   AttributeCatalog catalog) {
    if (microservices.empty()) {
        throw SadpError(ErrorCode::EmptyModel, "an application needs at least one microservice",
                        id);
    }

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < microservices.size(); ++i) {
        const Microservice& ms = microservices[i];
        if (ms.id.empty()) {
            throw SadpError(ErrorCode::DuplicateId, "microservice ids must be non-empty", id);
        }
        if (!index.emplace(ms.id, i).second) {
            throw SadpError(ErrorCode::DuplicateId, "duplicate microservice id '" + ms.id + "'",
                            ms.id);
        }
    }

    for (const auto& edge : edges) {
        if (index.count(edge.from_id) == 0) {
            throw SadpError(ErrorCode::DanglingEdge,
                            "edge references unknown microservice '" + edge.from_id + "'",
                            edge.from_id);
        }
        if (index.count(edge.to_id) == 0) {
            throw SadpError(ErrorCode::DanglingEdge,
                            "edge references unknown microservice '" + edge.to_id + "'",
                            edge.to_id);
        }
        if (edge.from_id == edge.to_id) {
            throw SadpError(ErrorCode::CycleDetected,
                            "self-loop on microservice '" + edge.from_id + "'", edge.from_id);
        }
    }

    for (const auto& ms : microservices) {
        if (ms.decision_table_ref && tables.count(*ms.decision_table_ref) == 0) {
            throw SadpError(ErrorCode::UnknownTableRef,
                            "microservice '" + ms.id + "' references unknown decision table '" +
                                *ms.decision_table_ref + "'",
                            ms.id);
        }
    }

    if (topological_indices(microservices, edges, index).size() != microservices.size()) {
        throw SadpError(ErrorCode::CycleDetected, "the workflow graph contains a cycle", id);
    }

    ApplicationModel model{std::move(id), std::move(microservices), std::move(edges),
                           std::move(tables), std::move(catalog)};
    return model;
}

std::vector<std::string> topological_order(const ApplicationModel& model) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model.microservices.size(); ++i) {
        index.emplace(model.microservices[i].id, i);
    }
    std::vector<std::string> order;
    order.reserve(model.size());
    for (std::size_t i : topological_indices(model.microservices, model.edges, index)) {
        order.push_back(model.microservices[i].id);
    }
    return order;
}

namespace {

void check_variant_ordering(const Microservice& ms, std::vector<ValidationIssue>& issues) {
    auto power_of = [&](Modality m) -> const double* {
        auto it = ms.declared_variants.find(m);
        return it == ms.declared_variants.end() ? nullptr : &it->second.power_watts;
    };
    const double* lp = power_of(Modality::LowPower);
    const double* n = power_of(Modality::Normal);
    const double* hp = power_of(Modality::HighPerformance);

    auto complain = [&](std::string_view lo, std::string_view hi, double lov, double hiv) {
        issues.push_back({Severity::Warning, "VariantOrdering",
                          "variant power ordering violated on '" + ms.id + "': " +
                              std::string(lo) + " draws " + std::to_string(lov) + " W, above " +
                              std::string(hi) + "'s " + std::to_string(hiv) + " W",
                          ms.id});
    };
    if (lp && n && *lp > *n) complain("low-power", "normal", *lp, *n);
    if (n && hp && *n > *hp) complain("normal", "high-performance", *n, *hp);
    if (lp && hp && !n && *lp > *hp) complain("low-power", "high-performance", *lp, *hp);
}

bool table_can_skip(const DecisionTable& table) {
    if (table.default_output == ModalityDecision::Skip) return true;
    return std::any_of(table.rules.begin(), table.rules.end(),
                       [](const Rule& r) { return r.output == ModalityDecision::Skip; });
}

}  // namespace

std::vector<ValidationIssue> validate(const ApplicationModel& model) {
    std::vector<ValidationIssue> issues;

    for (const auto& ms : model.microservices) {
        for (const auto& [key, value] : ms.annotations) {
            if (!model.catalog.contains(key)) {
                issues.push_back({Severity::Error, "UnknownAttribute",
                                  "annotation key '" + key + "' on '" + ms.id +
                                      "' is not in the attribute catalog",
                                  ms.id});
            }
        }
        if (!ms.defaulted_fields.empty()) {
            std::string fields;
            for (const auto& f : ms.defaulted_fields) {
                if (!fields.empty()) fields += ", ";
                fields += f;
            }
            issues.push_back({Severity::Warning, "ProfileDefaulted",
                              "baseline profile of '" + ms.id +
                                  "' filled with defaults for: " + fields,
                              ms.id});
        }
        check_variant_ordering(ms, issues);
        if (ms.relevance == Relevance::Mandatory && ms.decision_table_ref) {
            const auto& table = model.decision_tables.at(*ms.decision_table_ref);
            if (table_can_skip(table)) {
                issues.push_back({Severity::Warning, "MandatorySkippable",
                                  "mandatory task '" + ms.id + "' references table '" + table.id +
                                      "' which can output skip (the engine will clamp it)",
                                  ms.id});
            }
        }
        if (ms.annotations.empty()) {
            issues.push_back({Severity::Warning, "NoAnnotations",
                              "microservice '" + ms.id + "' carries no annotations", ms.id});
        }
    }

    for (const auto& [table_id, table] : model.decision_tables) {
        auto table_issues = validate_table(table);
        issues.insert(issues.end(), table_issues.begin(), table_issues.end());
    }
    return issues;
}

}  // namespace sadp
