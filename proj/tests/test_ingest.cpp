#include <doctest.h>

#include <random>

#include "sadp/engine.hpp"
#include "sadp/errors.hpp"
#include "sadp/ingest.hpp"
#include "sadp/scoring.hpp"
#include "support/generators.hpp"

using namespace sadp;

namespace {

const std::string kDataDir = SADP_DATA_DIR;

std::string fixture(const std::string& name) { return read_file(kDataDir + "/" + name); }

}  // namespace

TEST_CASE("parse_workflow_json accepts a minimal document") {
    const auto doc = parse_workflow_json(R"({
        "format_version": "1.0",
        "id": "tiny",
        "tasks": [{"id": "solo"}]
    })");
    CHECK(doc.application.size() == 1);
    CHECK(doc.application.microservices[0].name == "solo");
    // Missing profile numbers fall back to the documented defaults.
    CHECK(doc.application.microservices[0].baseline_profile.power_watts == 1.0);
    CHECK(doc.application.microservices[0].baseline_profile.duration_ms == 100.0);
    CHECK(doc.application.microservices[0].defaulted_fields.size() == 2);
}

TEST_CASE("parse_workflow_json reports schema errors with element paths") {
    try {
        parse_workflow_json(R"({
            "format_version": "1.0",
            "id": "x",
            "tasks": [{"name": "missing id"}]
        })");
        FAIL("expected SchemaError");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::SchemaError);
        CHECK(e.location().path == "/tasks/0");
    }
}

TEST_CASE("parse_workflow_json reports syntax errors with line and column") {
    try {
        parse_workflow_json("{\n  \"format_version\": \"1.0\",\n  oops\n}");
        FAIL("expected SyntaxError");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.location().line == 3);
    }
}

TEST_CASE("strict mode rejects unknown fields; lenient accepts them") {
    const std::string text = R"({
        "format_version": "1.0",
        "id": "x",
        "tasks": [{"id": "a"}],
        "custom_field": true
    })";
    CHECK_THROWS_AS(parse_workflow_json(text), ParseFailure);
    const auto doc = parse_workflow_json(text, {.lenient = true});
    CHECK(doc.application.size() == 1);
}

TEST_CASE("structural violations surface as semantic parse failures") {
    try {
        parse_workflow_json(R"({
            "format_version": "1.0",
            "id": "x",
            "tasks": [{"id": "a"}, {"id": "a"}]
        })");
        FAIL("expected SemanticError");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::SemanticError);
        CHECK(std::string(e.what()).find("DuplicateId") != std::string::npos);
    }
}

TEST_CASE("the flight booking fixture reproduces the worked scores") {
    const auto doc = parse_workflow_json(fixture("flight_booking.json"));
    const auto card = scorecard(doc.application, Step2Mode::Implicit);
    CHECK(card.step1 == 1.0);
    CHECK(card.step2 == 1.0);
    CHECK(card.step3 == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(validate(doc.application).empty());
}

TEST_CASE("round-trip: parse(serialize(d)) preserves the model") {
    for (const char* name : {"flight_booking.json", "minimal.json"}) {
        const auto doc = parse_workflow_json(fixture(name));
        const auto text = serialize_workflow(doc);
        const auto again = parse_workflow_json(text);
        CHECK(again.application == doc.application);
        // Second serialization is byte-identical.
        CHECK(serialize_workflow(again) == text);
    }
}

TEST_CASE("round-trip holds for random models") {
    std::mt19937 rng(31337);
    for (int i = 0; i < 100; ++i) {
        WorkflowDocument doc;
        doc.application = gen::random_model(rng);
        const auto text = serialize_workflow(doc);
        const auto again = parse_workflow_json(text);
        CHECK(again.application == doc.application);
        CHECK(serialize_workflow(again) == text);
    }
}

TEST_CASE("defaulted baseline values serialize explicitly") {
    const auto doc = parse_workflow_json(R"({
        "format_version": "1.0",
        "id": "d",
        "tasks": [{"id": "bare"}]
    })");
    const auto text = serialize_workflow(doc);
    CHECK(text.find("\"power_watts\": 1.0") != std::string::npos);
    CHECK(text.find("\"duration_ms\": 100.0") != std::string::npos);
    const auto again = parse_workflow_json(text);
    CHECK(again.application.microservices[0].baseline_profile.power_watts == 1.0);
    // Re-parsed values are explicit now, so nothing is recorded as defaulted.
    CHECK(again.application.microservices[0].defaulted_fields.empty());
}

TEST_CASE("annotation seeding fills the baseline and consumes foreign keys") {
    const auto doc = parse_workflow_json(R"({
        "format_version": "1.0",
        "id": "s",
        "tasks": [{
            "id": "seeded",
            "annotations": {
                "power": "12.5",
                "duration": "250",
                "reward": "3",
                "quality": "0.5"
            }
        }]
    })");
    const auto& ms = doc.application.microservices[0];
    CHECK(ms.baseline_profile.power_watts == 12.5);
    CHECK(ms.baseline_profile.duration_ms == 250.0);
    CHECK(ms.baseline_profile.reward_units == 3.0);
    CHECK(ms.baseline_profile.quality_score == 0.5);
    // power is a catalog key and stays; the others are consumed by seeding.
    CHECK(ms.annotations.size() == 1);
    CHECK(ms.annotations.count("power") == 1);
    CHECK(ms.defaulted_fields.empty());
    CHECK(validate(doc.application).empty());
}

TEST_CASE("explicit baseline values win over annotation seeds") {
    const auto doc = parse_workflow_json(R"({
        "format_version": "1.0",
        "id": "s",
        "tasks": [{
            "id": "t",
            "annotations": {"power": "10"},
            "baseline": {"power_watts": 42}
        }]
    })");
    CHECK(doc.application.microservices[0].baseline_profile.power_watts == 42.0);
}

TEST_CASE("profile range violations are schema errors") {
    CHECK_THROWS_AS(parse_workflow_json(R"({
        "format_version": "1.0",
        "id": "x",
        "tasks": [{"id": "a", "baseline": {"power_watts": -1}}]
    })"),
                    ParseFailure);
    CHECK_THROWS_AS(parse_workflow_json(R"({
        "format_version": "1.0",
        "id": "x",
        "tasks": [{"id": "a", "baseline": {"quality_score": 1.5}}]
    })"),
                    ParseFailure);
}

TEST_CASE("import_bpmn_subset maps a two-task chain") {
    const auto doc = import_bpmn_subset(R"(<?xml version="1.0"?>
        <process id="p">
          <task id="a" name="First"/>
          <task id="b" name="Second"/>
          <sequenceFlow id="f" sourceRef="a" targetRef="b"/>
        </process>)");
    CHECK(doc.application.size() == 2);
    REQUIRE(doc.application.edges.size() == 1);
    CHECK(doc.application.edges[0].from_id == "a");
    CHECK(doc.application.edges[0].to_id == "b");
    CHECK(doc.source == DocumentSource::BpmnSubset);
}

TEST_CASE("import_bpmn_subset rejects out-of-subset elements by name") {
    try {
        import_bpmn_subset(R"(<process id="p">
          <task id="a"/>
          <exclusiveGateway id="x"/>
        </process>)");
        FAIL("expected UnsupportedElement");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::UnsupportedElement);
        CHECK(std::string(e.what()).find("exclusiveGateway") != std::string::npos);
    }
}

TEST_CASE("malformed annotation lines carry their line number") {
    const std::string xml = R"(<process id="p">
  <task id="a"/>
  <textAnnotation id="ta">
    <text>power: 10
power 11</text>
  </textAnnotation>
  <association id="as" sourceRef="a" targetRef="ta"/>
</process>)";
    try {
        import_bpmn_subset(xml);
        FAIL("expected MalformedAnnotation");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::MalformedAnnotation);
        CHECK(e.location().line == 5);  // "power 11" sits on line 5
    }
}

TEST_CASE("associations must resolve to a task and an annotation") {
    try {
        import_bpmn_subset(R"(<process id="p">
          <task id="a"/>
          <textAnnotation id="ta"><text>power: 1</text></textAnnotation>
          <association id="as" sourceRef="ghost" targetRef="ta"/>
        </process>)");
        FAIL("expected DanglingAssociation");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::DanglingAssociation);
    }
}

TEST_CASE("parallel gateways expand to fan-out/fan-in edges") {
    const auto doc = import_bpmn_subset(R"(<process id="p">
      <task id="a"/>
      <task id="b"/>
      <task id="c"/>
      <task id="d"/>
      <parallelGateway id="split"/>
      <parallelGateway id="join"/>
      <sequenceFlow id="f1" sourceRef="a" targetRef="split"/>
      <sequenceFlow id="f2" sourceRef="split" targetRef="b"/>
      <sequenceFlow id="f3" sourceRef="split" targetRef="c"/>
      <sequenceFlow id="f4" sourceRef="b" targetRef="join"/>
      <sequenceFlow id="f5" sourceRef="c" targetRef="join"/>
      <sequenceFlow id="f6" sourceRef="join" targetRef="d"/>
    </process>)");
    REQUIRE(doc.application.edges.size() == 4);
    const auto order = topological_order(doc.application);
    CHECK(order == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("BPMN import agrees with the JSON fixture") {
    const auto sidecar = parse_tables_json(fixture("flight_booking_tables.json"));
    const auto bpmn = import_bpmn_subset(fixture("flight_booking.bpmn"), sidecar);
    const auto json_doc = parse_workflow_json(fixture("flight_booking.json"));

    CHECK(bpmn.application == json_doc.application);
    CHECK(scorecard(bpmn.application, Step2Mode::Implicit) ==
          scorecard(json_doc.application, Step2Mode::Implicit));

    const auto eco_mode = WorkflowMode{true, true, false};
    const auto bpmn_report = simulate(bpmn.application, resolve_all_in(bpmn.application, eco_mode));
    const auto json_report =
        simulate(json_doc.application, resolve_all_in(json_doc.application, eco_mode));
    CHECK(bpmn_report.total_energy_j == json_report.total_energy_j);
    CHECK(bpmn_report.response_time_ms == json_report.response_time_ms);
    CHECK(bpmn_report.total_reward == json_report.total_reward);
}

TEST_CASE("BPMN table references require the sidecar") {
    try {
        import_bpmn_subset(fixture("flight_booking.bpmn"));  // no tables supplied
        FAIL("expected SemanticError (UnknownTableRef)");
    } catch (const ParseFailure& e) {
        CHECK(e.code() == ErrorCode::SemanticError);
        CHECK(std::string(e.what()).find("UnknownTableRef") != std::string::npos);
    }
}

TEST_CASE("timeline JSON parses values with units and rejects duplicates") {
    const auto timeline = parse_timeline_json(fixture("timeline_demo.json"));
    REQUIRE(timeline.entries.size() == 3);
    CHECK(timeline.entries[0].request_id == "r-001");
    const auto& value = timeline.entries[1].context.variables.at("power");
    const auto& number = std::get<NumberValue>(value);
    CHECK(number.value == 6.0);
    CHECK(number.unit == "kW");

    CHECK_THROWS_AS(parse_timeline_json(R"([
        {"request": "dup", "context": {}},
        {"request": "dup", "context": {}}
    ])"),
                    ParseFailure);
}

TEST_CASE("catalog override files parse into catalogs") {
    const auto catalog = parse_catalog_json(R"([
        {"key": "latency", "category": "quality"},
        {"key": "carbon", "category": "sustainability"}
    ])");
    CHECK(catalog.size() == 2);
    CHECK(catalog.contains("carbon"));
    CHECK_THROWS_AS(parse_catalog_json("[]"), ParseFailure);
}
