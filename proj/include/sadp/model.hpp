#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sadp/rules.hpp"
#include "sadp/types.hpp"

namespace sadp {

enum class AttributeCategory { Functional, Quality, Sustainability };

std::string_view to_string(AttributeCategory c);
bool parse_category(std::string_view text, AttributeCategory& out);

struct AttributeKey {
    std::string key;
    AttributeCategory category = AttributeCategory::Functional;

    friend bool operator==(const AttributeKey&, const AttributeKey&) = default;
};

// Ordered set of expressible annotation keys. The default catalog has four
// keys: resources (functional), qos (quality), power and cost (sustainability).
class AttributeCatalog {
  public:
    // Throws SadpError(InvalidArgument) on empty/duplicate keys or size 0.
    explicit AttributeCatalog(std::vector<AttributeKey> attributes);

    static AttributeCatalog standard();

    const std::vector<AttributeKey>& attributes() const { return attributes_; }
    std::size_t size() const { return attributes_.size(); }
    bool contains(std::string_view key) const;

    friend bool operator==(const AttributeCatalog&, const AttributeCatalog&) = default;

  private:
    std::vector<AttributeKey> attributes_;
};

// Numeric execution profile of one task variant. Power and duration must be
// nonnegative, quality_score lies in [0,1]; reward may be any real.
struct ExecutionProfile {
    double power_watts = 1.0;
    double duration_ms = 100.0;
    double reward_units = 0.0;
    double quality_score = 1.0;

    double energy_joules() const { return power_watts * duration_ms / 1000.0; }

    friend bool operator==(const ExecutionProfile&, const ExecutionProfile&) = default;
};

inline constexpr double kDefaultPowerWatts = 1.0;
inline constexpr double kDefaultDurationMs = 100.0;

struct Microservice {
    std::string id;
    std::string name;
    Relevance relevance = Relevance::Unannotated;
    std::map<std::string, std::string> annotations;     // attribute key -> opaque value
    ExecutionProfile baseline_profile;
    std::map<Modality, ExecutionProfile> declared_variants;
    std::optional<std::string> decision_table_ref;

    // Baseline fields filled in by ingest defaults ("power_watts", ...).
    // Provenance only: excluded from equality so round-trips compare equal.
    std::vector<std::string> defaulted_fields;

    bool has_variant(Modality m) const { return declared_variants.count(m) != 0; }

    friend bool operator==(const Microservice& a, const Microservice& b) {
        return a.id == b.id && a.name == b.name && a.relevance == b.relevance &&
               a.annotations == b.annotations && a.baseline_profile == b.baseline_profile &&
               a.declared_variants == b.declared_variants &&
               a.decision_table_ref == b.decision_table_ref;
    }
};

struct Edge {
    std::string from_id;
    std::string to_id;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Annotated workflow graph: a DAG of microservices plus the decision tables
// referenced by them. Immutable after construction.
struct ApplicationModel {
    std::string id;
    std::vector<Microservice> microservices;
    std::vector<Edge> edges;
    std::map<std::string, DecisionTable> decision_tables;
    AttributeCatalog catalog = AttributeCatalog::standard();

    std::size_t size() const { return microservices.size(); }
    const Microservice* find(std::string_view ms_id) const;
    std::size_t index_of(std::string_view ms_id) const;  // npos when absent

    friend bool operator==(const ApplicationModel&, const ApplicationModel&) = default;
};

// Builds a model and checks its structural invariants, failing on the first
// violation. Throws SadpError with DuplicateId, DanglingEdge, CycleDetected,
// UnknownTableRef, or EmptyModel.
ApplicationModel build_application(std::string id,
                                   std::vector<Microservice> microservices,
                                   std::vector<Edge> edges,
                                   std::map<std::string, DecisionTable> tables = {},
                                   AttributeCatalog catalog = AttributeCatalog::standard());

// Non-structural checks. Errors (annotation keys outside the catalog, broken
// decision tables) prevent simulation; Warnings do not.
std::vector<ValidationIssue> validate(const ApplicationModel& model);

// Deterministic topological order: ties are broken by input list order.
std::vector<std::string> topological_order(const ApplicationModel& model);

}  // namespace sadp
