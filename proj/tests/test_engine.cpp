#include <doctest.h>

#include <cmath>
#include <random>

#include "sadp/engine.hpp"
#include "sadp/errors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace sadp;

namespace {

Microservice task(std::string id, double watts, double ms, double reward = 0.0,
                  double quality = 1.0) {
    Microservice out;
    out.id = std::move(id);
    out.name = out.id;
    out.baseline_profile = {watts, ms, reward, quality};
    return out;
}

// The running five-task example with numeric profiles and the two tables.
ApplicationModel flight_model() {
    auto fs = task("flight_search", 10, 400, 0, 0.9);
    fs.declared_variants[Modality::Normal] = {10, 400, 0, 0.9};
    fs.declared_variants[Modality::LowPower] = {6, 300, 0, 0.7};
    fs.declared_variants[Modality::HighPerformance] = {16, 250, 0, 1.0};
    fs.decision_table_ref = "flight_search_rules";

    auto wi = task("weather_information", 2, 120, 0, 0.8);
    wi.relevance = Relevance::Optional;
    auto fb = task("flight_booking", 8, 500, 0, 1.0);
    auto rc = task("rental_car_booking", 5, 200, 2.5, 0.9);
    rc.relevance = Relevance::Optional;
    rc.decision_table_ref = "rental_car_rules";
    auto pm = task("payment", 4, 300, 0, 1.0);

    DecisionTable fs_rules;
    fs_rules.id = "flight_search_rules";
    fs_rules.inputs = {{"power", ValueKind::Number, "kW"}};
    fs_rules.rules = {{{{"power", Comparator::Greater, NumberValue{5.0, "kW"}}},
                       ModalityDecision::UseLowPower,
                       "grid"}};

    DecisionTable rc_rules;
    rc_rules.id = "rental_car_rules";
    rc_rules.inputs = {{"response_time", ValueKind::Number, "ms"}};
    rc_rules.rules = {{{{"response_time", Comparator::Greater, NumberValue{1000.0, "ms"}}},
                       ModalityDecision::Skip,
                       "latency"}};

    return build_application("flight", {fs, wi, fb, rc, pm},
                             {{"flight_search", "weather_information"},
                              {"weather_information", "flight_booking"},
                              {"flight_booking", "rental_car_booking"},
                              {"rental_car_booking", "payment"}},
                             {{"flight_search_rules", fs_rules},
                              {"rental_car_rules", rc_rules}});
}

ContextSnapshot flight_ctx(double power_kw, double response_ms) {
    ContextSnapshot ctx;
    ctx.variables["power"] = NumberValue{power_kw, "kW"};
    ctx.variables["response_time"] = NumberValue{response_ms, "ms"};
    return ctx;
}

}  // namespace

TEST_CASE("resolve_all_in: normal mode executes everything normally") {
    const auto model = flight_model();
    const auto assignment = resolve_all_in(model, WorkflowMode{});
    for (const auto& [ms_id, decision] : assignment.decisions) {
        CHECK(decision == ModalityDecision::UseNormal);
    }
}

TEST_CASE("resolve_all_in: basic+low-power skips optionals and lowers the rest") {
    const auto model = flight_model();
    const auto assignment = resolve_all_in(model, WorkflowMode{true, true, false});
    CHECK(assignment.decisions.at("weather_information") == ModalityDecision::Skip);
    CHECK(assignment.decisions.at("rental_car_booking") == ModalityDecision::Skip);
    CHECK(assignment.decisions.at("flight_search") == ModalityDecision::UseLowPower);
    CHECK(assignment.decisions.at("flight_booking") == ModalityDecision::UseLowPower);
    CHECK(assignment.decisions.at("payment") == ModalityDecision::UseLowPower);
}

TEST_CASE("resolve_all_in: basic without optionals equals normal") {
    auto a = task("a", 1, 1);
    auto b = task("b", 1, 1);
    a.relevance = Relevance::Mandatory;
    const auto model = build_application("m", {a, b}, {{"a", "b"}});
    CHECK(resolve_all_in(model, WorkflowMode{true, false, false}) ==
          resolve_all_in(model, WorkflowMode{}));
}

TEST_CASE("resolve_all_in rejects the contradictory mode") {
    const auto model = flight_model();
    CHECK_THROWS_AS(resolve_all_in(model, WorkflowMode{false, true, true}), SadpError);
}

TEST_CASE("resolve_rule_driven applies the paper tables") {
    const auto model = flight_model();
    SUBCASE("slow downstream skips the rental car") {
        const auto assignment = resolve_rule_driven(model, flight_ctx(3.0, 1200.0));
        CHECK(assignment.decisions.at("rental_car_booking") == ModalityDecision::Skip);
        CHECK(assignment.decisions.at("flight_search") == ModalityDecision::UseNormal);
    }
    SUBCASE("high grid power sends flight search to low power") {
        const auto assignment = resolve_rule_driven(model, flight_ctx(6.0, 500.0));
        CHECK(assignment.decisions.at("flight_search") == ModalityDecision::UseLowPower);
        CHECK(assignment.decisions.at("rental_car_booking") == ModalityDecision::UseNormal);
    }
    SUBCASE("5 kW exactly stays normal (strict comparison)") {
        const auto assignment = resolve_rule_driven(model, flight_ctx(5.0, 500.0));
        CHECK(assignment.decisions.at("flight_search") == ModalityDecision::UseNormal);
    }
}

TEST_CASE("resolve_rule_driven clamps skip on a mandatory task") {
    DecisionTable skipper;
    skipper.id = "skipper";
    skipper.default_output = ModalityDecision::Skip;
    auto pay = task("payment", 4, 300);
    pay.relevance = Relevance::Mandatory;
    pay.decision_table_ref = "skipper";
    const auto model = build_application("m", {pay}, {}, {{"skipper", skipper}});

    const auto assignment = resolve_rule_driven(model, ContextSnapshot{});
    CHECK(assignment.decisions.at("payment") == ModalityDecision::UseNormal);
    CHECK(assignment.clamped.count("payment") == 1);
    REQUIRE(assignment.warnings.size() == 1);

    const auto report = simulate(model, assignment);
    CHECK(report.outcomes[0].clamped);
}

TEST_CASE("resolve_rule_driven propagates rule errors with the task id") {
    const auto model = flight_model();
    ContextSnapshot ctx;  // empty: flight_search table inputs missing
    try {
        resolve_rule_driven(model, ctx);
        FAIL("expected MissingVariable");
    } catch (const SadpError& e) {
        CHECK(e.code() == ErrorCode::MissingVariable);
        CHECK(std::string(e.what()).find("flight_search") != std::string::npos);
    }
}

TEST_CASE("resolve_rule_driven uses the global table for table-less tasks") {
    DecisionTable lp;
    lp.id = "global";
    lp.default_output = ModalityDecision::UseLowPower;
    auto a = task("a", 1, 1);
    auto b = task("b", 1, 1);
    const auto model = build_application("m", {a, b}, {{"a", "b"}}, {{"global", lp}});
    const auto assignment = resolve_rule_driven(model, ContextSnapshot{}, "global");
    CHECK(assignment.decisions.at("a") == ModalityDecision::UseLowPower);
    CHECK(assignment.decisions.at("b") == ModalityDecision::UseLowPower);
}

TEST_CASE("simulate: two-task chain arithmetic") {
    const auto model = build_application("m", {task("a", 10, 100), task("b", 20, 50)},
                                         {{"a", "b"}});
    Assignment normal;
    normal.decisions = {{"a", ModalityDecision::UseNormal}, {"b", ModalityDecision::UseNormal}};
    const auto report = simulate(model, normal);
    CHECK(report.total_energy_j == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.response_time_ms == doctest::Approx(150.0).epsilon(1e-12));

    Assignment skip_b;
    skip_b.decisions = {{"a", ModalityDecision::UseNormal}, {"b", ModalityDecision::Skip}};
    auto tasks = model.microservices;
    tasks[1].relevance = Relevance::Optional;
    const auto model2 = build_application("m", tasks, model.edges);
    const auto report2 = simulate(model2, skip_b);
    CHECK(report2.total_energy_j == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report2.response_time_ms == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("simulate: skipped middle task still relays precedence") {
    // a -> b -> c with b skipped: response is a + c, not max(a, c).
    auto b = task("b", 1, 500);
    b.relevance = Relevance::Optional;
    const auto model = build_application("m", {task("a", 1, 100), b, task("c", 1, 200)},
                                         {{"a", "b"}, {"b", "c"}});
    Assignment assignment;
    assignment.decisions = {{"a", ModalityDecision::UseNormal},
                            {"b", ModalityDecision::Skip},
                            {"c", ModalityDecision::UseNormal}};
    const auto report = simulate(model, assignment);
    CHECK(report.response_time_ms == doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("simulate: basic+low-power beats normal on the flight model") {
    const auto model = flight_model();
    const auto normal = simulate(model, resolve_all_in(model, WorkflowMode{}));
    const auto eco = simulate(model, resolve_all_in(model, WorkflowMode{true, true, false}));
    // Hand-computed: 10.44 J vs 7.0 J.
    CHECK(normal.total_energy_j == doctest::Approx(10.44).epsilon(1e-12));
    CHECK(eco.total_energy_j == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(eco.total_energy_j < normal.total_energy_j);
    CHECK(normal.response_time_ms == doctest::Approx(1520.0).epsilon(1e-12));
    CHECK(eco.response_time_ms == doctest::Approx(1100.0).epsilon(1e-12));

    // Fallback flags exactly on the non-variant tasks that ran low-power.
    for (const auto& outcome : eco.outcomes) {
        if (outcome.id == "flight_booking" || outcome.id == "payment") {
            CHECK(outcome.fallback_used);
        } else {
            CHECK_FALSE(outcome.fallback_used);
        }
    }
}

TEST_CASE("simulate: all-skip run is degenerate but defined") {
    auto a = task("a", 1, 1);
    a.relevance = Relevance::Optional;
    const auto model = build_application("m", {a}, {});
    Assignment assignment;
    assignment.decisions = {{"a", ModalityDecision::Skip}};
    const auto report = simulate(model, assignment);
    CHECK(report.mean_quality == 1.0);
    CHECK(report.total_energy_j == 0.0);
    REQUIRE(report.warnings.size() == 1);
}

TEST_CASE("simulate never reads undeclared variants; fallback flags are exact") {
    std::mt19937 rng(2718);
    for (int i = 0; i < 150; ++i) {
        const auto model = gen::random_model(rng);
        std::uniform_int_distribution<int> pick(0, 3);
        Assignment assignment;
        for (const auto& ms : model.microservices) {
            ModalityDecision d = ModalityDecision::UseNormal;
            switch (pick(rng)) {
                case 0: d = ModalityDecision::UseNormal; break;
                case 1: d = ModalityDecision::UseLowPower; break;
                case 2: d = ModalityDecision::UseHighPerformance; break;
                case 3:
                    d = ms.relevance == Relevance::Optional ? ModalityDecision::Skip
                                                            : ModalityDecision::UseNormal;
                    break;
            }
            assignment.decisions[ms.id] = d;
        }
        const auto report = simulate(model, assignment);
        for (const auto& outcome : report.outcomes) {
            const auto* ms = model.find(outcome.id);
            REQUIRE(ms != nullptr);
            if (outcome.decision == ModalityDecision::Skip) {
                CHECK_FALSE(outcome.profile_used.has_value());
                CHECK_FALSE(outcome.fallback_used);
                continue;
            }
            const Modality wanted = decision_modality(outcome.decision);
            if (ms->has_variant(wanted)) {
                CHECK(*outcome.profile_used == ms->declared_variants.at(wanted));
                CHECK_FALSE(outcome.fallback_used);
            } else {
                CHECK(*outcome.profile_used == ms->baseline_profile);
                CHECK(outcome.fallback_used == (outcome.decision != ModalityDecision::UseNormal));
            }
        }
    }
}

TEST_CASE("critical path matches all-paths enumeration on small DAGs") {
    std::mt19937 rng(1618);
    gen::ModelParams params;
    params.max_tasks = 10;
    for (int i = 0; i < 150; ++i) {
        const auto model = gen::random_model(rng, params);
        const auto assignment = resolve_all_in(model, WorkflowMode{});
        const auto report = simulate(model, assignment);
        std::map<std::string, double> durations;
        for (const auto& ms : model.microservices) {
            const auto it = ms.declared_variants.find(Modality::Normal);
            durations[ms.id] = it != ms.declared_variants.end() ? it->second.duration_ms
                                                                : ms.baseline_profile.duration_ms;
        }
        const double brute = oracle::longest_path_all_paths(model, durations);
        CHECK(report.response_time_ms == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("energy ordering holds for ordered variant profiles") {
    std::mt19937 rng(5050);
    gen::ModelParams params;
    params.ordered_variant_power = true;
    for (int i = 0; i < 150; ++i) {
        const auto model = gen::random_model(rng, params);
        const double lp =
            simulate(model, resolve_all_in(model, WorkflowMode{false, true, false}))
                .total_energy_j;
        const double n = simulate(model, resolve_all_in(model, WorkflowMode{})).total_energy_j;
        const double hp =
            simulate(model, resolve_all_in(model, WorkflowMode{false, false, true}))
                .total_energy_j;
        CHECK(lp <= n + 1e-9);
        CHECK(n <= hp + 1e-9);
    }
}

TEST_CASE("adding basic to a mode never increases energy") {
    std::mt19937 rng(6060);
    for (int i = 0; i < 200; ++i) {
        const auto model = gen::random_model(rng);
        const WorkflowMode bases[] = {
            WorkflowMode{},
            WorkflowMode{false, true, false},
            WorkflowMode{false, false, true},
        };
        for (const auto& base : bases) {
            WorkflowMode with_basic = base;
            with_basic.basic = true;
            const double before =
                simulate(model, resolve_all_in(model, base)).total_energy_j;
            const double after =
                simulate(model, resolve_all_in(model, with_basic)).total_energy_j;
            CHECK(after <= before + 1e-9);
        }
    }
}

TEST_CASE("all-in equals rule-driven with constant per-task tables") {
    std::mt19937 rng(7070);
    std::uniform_int_distribution<int> mode_pick(0, 5);
    for (int i = 0; i < 100; ++i) {
        auto model = gen::random_model(rng);
        WorkflowMode mode;
        switch (mode_pick(rng)) {
            case 0: break;
            case 1: mode.basic = true; break;
            case 2: mode.low_power = true; break;
            case 3: mode.high_performance = true; break;
            case 4: mode.basic = mode.low_power = true; break;
            case 5: mode.basic = mode.high_performance = true; break;
        }
        const auto expected = resolve_all_in(model, mode);

        // One unconditional table per task returning the all-in decision.
        std::map<std::string, DecisionTable> tables;
        auto tasks = model.microservices;
        for (auto& ms : tasks) {
            DecisionTable table;
            table.id = "const_" + ms.id;
            table.rules = {{{}, expected.decisions.at(ms.id), ""}};
            ms.decision_table_ref = table.id;
            tables.emplace(table.id, std::move(table));
        }
        const auto rebuilt =
            build_application(model.id, tasks, model.edges, tables, model.catalog);
        const auto actual = resolve_rule_driven(rebuilt, ContextSnapshot{});
        CHECK(actual.decisions == expected.decisions);
    }
}

TEST_CASE("no resolver ever skips a non-optional task") {
    std::mt19937 rng(8080);
    std::uniform_int_distribution<int> decision_pick(0, 3);
    for (int i = 0; i < 100; ++i) {
        auto model = gen::random_model(rng);
        std::map<std::string, DecisionTable> tables;
        auto tasks = model.microservices;
        for (auto& ms : tasks) {
            DecisionTable table;
            table.id = "rng_" + ms.id;
            table.default_output = static_cast<ModalityDecision>(decision_pick(rng));
            ms.decision_table_ref = table.id;
            tables.emplace(table.id, std::move(table));
        }
        const auto rebuilt =
            build_application(model.id, tasks, model.edges, tables, model.catalog);
        const auto assignment = resolve_rule_driven(rebuilt, ContextSnapshot{});
        for (const auto& ms : rebuilt.microservices) {
            if (ms.relevance != Relevance::Optional) {
                CHECK(assignment.decisions.at(ms.id) != ModalityDecision::Skip);
            }
        }
    }
}

TEST_CASE("optimizer: all-optional model under pure energy weight skips everything") {
    auto a = task("a", 10, 100);
    auto b = task("b", 20, 50);
    a.relevance = Relevance::Optional;
    b.relevance = Relevance::Optional;
    const auto model = build_application("m", {a, b}, {{"a", "b"}});
    OptimizationObjective objective;
    objective.weight_energy = 1.0;
    const auto result = optimize_assignment(model, objective);
    CHECK(result.assignment.decisions.at("a") == ModalityDecision::Skip);
    CHECK(result.assignment.decisions.at("b") == ModalityDecision::Skip);
    CHECK(result.report.total_energy_j == 0.0);
    CHECK(result.objective_value == 0.0);
}

TEST_CASE("optimizer: reward weight keeps the rental car running") {
    const auto model = flight_model();
    OptimizationObjective objective;
    objective.weight_energy = 1.0;
    objective.weight_reward = 100.0;  // 2.5 reward dwarfs its 1 J cost
    const auto result = optimize_assignment(model, objective);
    CHECK(result.assignment.decisions.at("rental_car_booking") != ModalityDecision::Skip);
    CHECK(result.assignment.decisions.at("weather_information") == ModalityDecision::Skip);

    const auto reference = oracle::enumerate_best(model, objective);
    CHECK(result.objective_value == reference.cost);
    CHECK(result.assignment.decisions == reference.decisions);
}

TEST_CASE("optimizer matches exhaustive enumeration with binding bounds") {
    const auto model = flight_model();
    OptimizationObjective objective;
    objective.weight_energy = 1.0;
    objective.max_response_time_ms = 1300.0;  // forbids the slowest combinations
    const auto result = optimize_assignment(model, objective);
    const auto reference = oracle::enumerate_best(model, objective);
    REQUIRE(reference.feasible);
    CHECK(result.objective_value == reference.cost);
    CHECK(result.assignment.decisions == reference.decisions);
    CHECK(result.report.response_time_ms <= 1300.0);
}

TEST_CASE("optimizer reports infeasible bounds with the tightest violation") {
    const auto model = flight_model();
    OptimizationObjective objective;
    objective.weight_energy = 1.0;
    objective.max_response_time_ms = 100.0;  // unreachable: critical path >= 1050
    try {
        optimize_assignment(model, objective);
        FAIL("expected Infeasible");
    } catch (const SadpError& e) {
        CHECK(e.code() == ErrorCode::Infeasible);
        CHECK(std::string(e.what()).find("max_response_time_ms") != std::string::npos);
    }
}

TEST_CASE("optimizer rejects useless objectives and oversized exact requests") {
    const auto model = flight_model();
    CHECK_THROWS_AS(optimize_assignment(model, OptimizationObjective{}), SadpError);

    OptimizationObjective objective;
    objective.weight_energy = 1.0;
    try {
        optimize_assignment(model, objective, /*allow_greedy=*/false, /*exact_limit=*/2);
        FAIL("expected TooLargeForExact");
    } catch (const SadpError& e) {
        CHECK(e.code() == ErrorCode::TooLargeForExact);
    }
}

TEST_CASE("greedy fallback still returns a feasible, flagged result") {
    std::mt19937 rng(9090);
    gen::ModelParams params;
    params.min_tasks = 5;
    params.max_tasks = 6;
    const auto model = gen::random_model(rng, params);
    OptimizationObjective objective;
    objective.weight_energy = 1.0;
    const auto result = optimize_assignment(model, objective, true, /*exact_limit=*/3);
    CHECK_FALSE(result.exact);
    REQUIRE(!result.assignment.warnings.empty());
    const auto reference = oracle::enumerate_best(model, objective);
    CHECK(result.objective_value >= reference.cost);  // greedy may be suboptimal, never better
}

TEST_CASE("optimizer equals the oracle on random instances") {
    std::mt19937 rng(13579);
    gen::ModelParams params;
    params.max_tasks = 6;
    std::uniform_real_distribution<double> weight(0.0, 2.0);
    std::bernoulli_distribution with_bound(0.3);
    for (int i = 0; i < 60; ++i) {
        const auto model = gen::random_model(rng, params);
        OptimizationObjective objective;
        objective.weight_energy = weight(rng);
        objective.weight_time = weight(rng);
        objective.weight_reward = weight(rng);
        if (!objective.valid()) objective.weight_energy = 1.0;
        if (with_bound(rng)) objective.max_response_time_ms = 500.0;
        if (with_bound(rng)) objective.max_energy_j = 20.0;

        const auto reference = oracle::enumerate_best(model, objective);
        if (!reference.feasible) {
            CHECK_THROWS_AS(optimize_assignment(model, objective), SadpError);
            continue;
        }
        const auto result = optimize_assignment(model, objective);
        CHECK(result.objective_value == reference.cost);
        CHECK(result.assignment.decisions == reference.decisions);
    }
}

TEST_CASE("run_timeline aggregates per-entry reports") {
    const auto model = flight_model();
    EnactmentConfig config;
    config.strategy = EnactmentConfig::Strategy::RuleDriven;

    SUBCASE("empty timeline") {
        const auto run = run_timeline(model, config, ContextTimeline{});
        CHECK(run.entries.empty());
        CHECK(run.total_energy_j == 0.0);
        CHECK(run.mean_response_time_ms == 0.0);
    }

    SUBCASE("alternating power crosses the 5 kW threshold") {
        ContextTimeline timeline;
        timeline.entries.push_back({"r1", flight_ctx(3.0, 500.0)});
        timeline.entries.push_back({"r2", flight_ctx(6.0, 500.0)});
        const auto run = run_timeline(model, config, timeline);
        REQUIRE(run.entries.size() == 2);
        REQUIRE(run.entries[0].report.has_value());
        REQUIRE(run.entries[1].report.has_value());
        const auto& first = run.entries[0].report->outcomes;
        const auto& second = run.entries[1].report->outcomes;
        for (std::size_t i = 0; i < first.size(); ++i) {
            if (first[i].id == "flight_search") {
                CHECK(first[i].decision == ModalityDecision::UseNormal);
                CHECK(second[i].decision == ModalityDecision::UseLowPower);
            } else {
                CHECK(first[i].decision == second[i].decision);
            }
        }
    }

    SUBCASE("aggregate energy equals the per-report sum") {
        ContextTimeline timeline;
        std::mt19937 rng(111);
        std::uniform_real_distribution<double> power(0.0, 10.0);
        std::uniform_real_distribution<double> rt(0.0, 2000.0);
        for (int i = 0; i < 100; ++i) {
            timeline.entries.push_back(
                {"r" + std::to_string(i), flight_ctx(power(rng), rt(rng))});
        }
        const auto run = run_timeline(model, config, timeline);
        double sum = 0.0;
        for (const auto& entry : run.entries) {
            REQUIRE(entry.report.has_value());
            sum += entry.report->total_energy_j;
        }
        CHECK(std::abs(run.total_energy_j - sum) <= 1e-9);
    }
}

TEST_CASE("run_timeline is fail-soft by default and strict on request") {
    const auto model = flight_model();
    EnactmentConfig config;
    config.strategy = EnactmentConfig::Strategy::RuleDriven;
    ContextTimeline timeline;
    timeline.entries.push_back({"good", flight_ctx(3.0, 500.0)});
    ContextSnapshot broken;  // missing both table inputs
    timeline.entries.push_back({"bad", broken});

    const auto run = run_timeline(model, config, timeline, false);
    CHECK(run.failed_entries == 1);
    CHECK(run.entries[1].error.find("MissingVariable") != std::string::npos);

    CHECK_THROWS_AS(run_timeline(model, config, timeline, true), SadpError);
}
