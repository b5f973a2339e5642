#include <array>
#include <cmath>

#include "doctest.h"
#include "ecoswitch/errors.hpp"
#include "ecoswitch/mapek.hpp"
#include "test_support.hpp"

using namespace ecoswitch;

namespace {

RequestLogEntry observed(std::uint64_t id, const ModelId& model, double energy, double confidence) {
    RequestLogEntry e;
    e.request_id = id;
    e.arrival_time = static_cast<double>(id);
    e.model = model;
    e.energy = energy;
    e.confidence = confidence;
    e.model_proc_time = 0.01;
    e.system_proc_time = 0.01;
    return e;
}

Controller reference_controller(PolicyKind kind, double epsilon = 0.0, std::size_t k = 3,
                                int initial = 1) {
    const auto ids = testing::four_models();
    return Controller(testing::reference_a_rows(), Policy{kind, std::nullopt, epsilon}, ControllerConfig{k},
                      ids[static_cast<std::size_t>(initial - 1)], 1);
}

}  // namespace

TEST_SUITE("mapek") {

TEST_CASE("score formula") {
    CHECK(compute_score(1.61, 0.536) == doctest::Approx(0.74704).epsilon(1e-12));
    CHECK(compute_score(7.5, 1.0) == 0.0);
    CHECK(compute_score(0.0, 0.3) == 0.0);
    CHECK_THROWS_AS(compute_score(-1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(compute_score(1.0, 1.1), ValidationError);
    CHECK_THROWS_AS(compute_score(1.0, -0.1), ValidationError);
}

TEST_CASE("e_avg is the min/max midpoint") {
    CHECK(e_avg(BaseRuleRow{{1, "m"}, 2, 16, 0.5}) == 9.0);
    CHECK(e_avg(BaseRuleRow{{1, "m"}, 5, 5, 0.5}) == 5.0);
    CHECK(e_avg(BaseRuleRow{{1, "m"}, 0, 4, 0.5}) == 2.0);
}

TEST_CASE("trigger uses a strict inequality") {
    std::vector<BaseRuleRow> a{{{1, "m"}, 2.0, 2.0, 0.6}};
    const auto row = init_runtime_rules(a, 3)[0];
    CHECK(needs_adaptation(3.0, 0.5, row));
    CHECK_FALSE(needs_adaptation(1.0, 0.9, row));
    CHECK_FALSE(needs_adaptation(2.0, 0.6, row));
    CHECK(needs_adaptation(std::nextafter(2.0, 3.0), 0.6, row));
}

TEST_CASE("reference rows: leaving large picks nano") {
    auto b = testing::reference_b_rows();
    CHECK(planner_score(b[0]) == doctest::Approx(0.747).epsilon(1e-3));
    CHECK(planner_score(b[1]) == doctest::Approx(1.683).epsilon(1e-3));
    CHECK(planner_score(b[2]) == doctest::Approx(3.103).epsilon(1e-3));
    const ModelId large{4, "large"};

    auto at_mean = exploit(b, large, 17.705, 0.5);
    REQUIRE(at_mean.is_switch());
    CHECK(at_mean.target->name == "nano");

    auto above = exploit(b, large, 17.8, 0.675);
    REQUIRE(above.is_switch());
    CHECK(above.target->name == "nano");
    CHECK(above.reason == Reason::energy_branch);
    CHECK(above.code() == 1);
}

TEST_CASE("cheapest model under energy pressure stays put") {
    auto b = testing::reference_b_rows();
    auto a = exploit(b, {1, "nano"}, 1.7, 0.5);
    CHECK_FALSE(a.is_switch());
    CHECK(a.reason == Reason::energy_branch);
    CHECK(a.code() == -1);
}

TEST_CASE("confidence branch") {
    auto b = testing::reference_b_rows();
    auto from_small = exploit(b, {2, "small"}, 4.0, 0.5);
    REQUIRE(from_small.is_switch());
    CHECK(from_small.target->name == "nano");
    CHECK(from_small.reason == Reason::confidence_branch);

    CHECK_FALSE(exploit(b, {1, "nano"}, 1.0, 0.5).is_switch());

    auto none = exploit(b, {2, "small"}, 4.0, 0.7);
    CHECK_FALSE(none.is_switch());
    CHECK(none.no_candidates);

    auto to_medium = exploit(b, {2, "small"}, 4.0, 0.62);
    REQUIRE(to_medium.is_switch());
    CHECK(to_medium.target->name == "medium");
}

TEST_CASE("ties go to the lowest index") {
    auto b = testing::reference_b_rows();
    for (auto& row : b) {
        row.e_min = row.e_max = row.e_latest = 2.0;
        row.c_avg = 0.5;
    }
    b[3].c_avg = 0.875;
    b[3].e_min = b[3].e_max = b[3].e_latest = 4.0;  // 4 * 0.125 == 2 * 0.25 exactly
    b[1].c_avg = 0.75;
    b[2].c_avg = 0.75;
    auto a = exploit(b, {1, "nano"}, 1.0, 0.6);
    REQUIRE(a.is_switch());
    CHECK(a.target->index == 2);
}

TEST_CASE("planner uses min(e_avg, e_latest)") {
    auto b = testing::reference_b_rows();
    b[3].e_latest = 0.5;  // large looks cheap right now: 0.5 * 0.325 < nano's 0.747
    auto a = exploit(b, {2, "small"}, 4.0, 0.5);
    REQUIRE(a.is_switch());
    CHECK(a.target->name == "large");
}

TEST_CASE("exploration is uniform over models") {
    auto b = testing::reference_b_rows();
    SplitMix64 rng(2024);
    std::array<int, 4> counts{};
    const int draws = 10000;
    int switches = 0;
    for (int i = 0; i < draws; ++i) {
        auto a = plan(b, {1, "nano"}, 1.0, 0.5, 1.0, rng);
        CHECK(a.reason == Reason::explore);
        if (a.is_switch()) {
            ++counts[a.target->slot()];
            ++switches;
        } else {
            ++counts[0];
        }
    }
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(draws) - 0.25) <= 0.02);
    CHECK(switches == draws - counts[0]);
}

TEST_CASE("epsilon zero never explores") {
    auto b = testing::reference_b_rows();
    SplitMix64 rng(1);
    for (int i = 0; i < 1000; ++i) CHECK(plan(b, {4, "large"}, 20.0, 0.6, 0.0, rng).reason != Reason::explore);
    CHECK_THROWS_AS(PlannerConfig({1.5, 0}).validate(), ConfigError);
    CHECK_THROWS_AS(PlannerConfig({-0.1, 0}).validate(), ConfigError);
}

TEST_CASE("exploitation choice survives scaling every energy") {
    SplitMix64 rng(33);
    for (int trial = 0; trial < 2000; ++trial) {
        auto b = testing::reference_b_rows();
        for (auto& row : b) {
            row.e_min = 1 + 10 * rng.uniform01();
            row.e_max = row.e_min + 5 * rng.uniform01();
            row.e_latest = 12 * rng.uniform01();
            row.c_avg = rng.uniform01();
        }
        const ModelId current = b[rng() % 4].model;
        const double e_bar = 14 * rng.uniform01();
        const double c_bar = rng.uniform01();
        const double scale = 0.1 + 5 * rng.uniform01();
        auto scaled = b;
        for (auto& row : scaled) {
            row.e_min *= scale;
            row.e_max *= scale;
            row.e_latest *= scale;
        }
        const auto x = exploit(b, current, e_bar, c_bar);
        const auto y = exploit(scaled, current, e_bar * scale, c_bar);
        CHECK(x.code() == y.code());
        if (x.is_switch() && x.reason == Reason::energy_branch) CHECK(b[x.target->slot()].e_avg() < e_bar);
        if (x.is_switch() && x.reason == Reason::confidence_branch) CHECK(b[x.target->slot()].c_avg > c_bar);
    }
}

TEST_CASE("execute counts only real switches") {
    auto ctl = reference_controller(PolicyKind::naive3);
    CHECK(ctl.execute(Action::switch_to({2, "small"}, Reason::explore)));
    CHECK(ctl.current_model().name == "small");
    CHECK(ctl.state().switch_count == 1);
    CHECK_FALSE(ctl.execute(Action::no_adapt()));
    CHECK_FALSE(ctl.execute(Action::switch_to({2, "small"}, Reason::explore)));
    CHECK(ctl.state().switch_count == 1);
    CHECK(ctl.state().phase_energy.executor == doctest::Approx(3 * PhaseCosts{}.executor));
    CHECK_THROWS_AS(ctl.execute(Action::switch_to({9, "huge"}, Reason::explore)), ValidationError);
}

TEST_CASE("monitor rejects entries from an inactive model") {
    auto ctl = reference_controller(PolicyKind::naive3);
    CHECK_THROWS_AS(ctl.monitor_step(observed(1, {2, "small"}, 1.0, 0.5)), ValidationError);
    ctl.monitor_step(observed(1, {1, "nano"}, 1.0, 0.5));
    CHECK(ctl.log().size() == 1);
    CHECK(ctl.state().monitor_window.size() == 1);
}

TEST_CASE("analyzer tick: below threshold still refreshes B") {
    auto ctl = reference_controller(PolicyKind::naive3);
    CHECK(ctl.analyzer_tick().reason == Reason::not_triggered);  // empty window
    ctl.monitor_step(observed(1, {1, "nano"}, 1.0, 0.9));
    auto a = ctl.analyzer_tick();
    CHECK_FALSE(a.is_switch());
    CHECK(a.reason == Reason::not_triggered);
    CHECK(ctl.state().runtime_rules[0].e_latest == 1.0);
    CHECK(ctl.state().runtime_rules[0].c_avg == 0.9);
    CHECK(ctl.state().triggers == 0);
}

TEST_CASE("analyzer tick: scripted run through both branches") {
    // k = 3 on the reference rows, starting on small (threshold 4.327 * 0.389 = 1.683).
    auto ctl = reference_controller(PolicyKind::naive3, 0.0, 3, 2);
    const ModelId small{2, "small"};
    ctl.monitor_step(observed(1, small, 4.0, 0.62));
    auto a1 = ctl.analyzer_tick();  // 4.0 * 0.38 = 1.52: quiet
    CHECK(a1.reason == Reason::not_triggered);

    ctl.monitor_step(observed(2, small, 6.0, 0.62));
    auto a2 = ctl.analyzer_tick();  // window (5.0, 0.62): 1.9 > 1.683, energy branch -> nano
    REQUIRE(a2.is_switch());
    CHECK(a2.reason == Reason::energy_branch);
    CHECK(a2.target->name == "nano");
    CHECK(ctl.execute(a2));

    // Window still holds small's samples: (4, 6, 1.5) / (0.62, 0.62, 0.3).
    ctl.monitor_step(observed(3, {1, "nano"}, 1.5, 0.3));
    auto a3 = ctl.analyzer_tick();  // (3.833, 0.513) vs nano 0.747: energy branch, nano cheapest
    CHECK_FALSE(a3.is_switch());
    CHECK(a3.reason == Reason::energy_branch);
    CHECK(ctl.state().triggers == 2);
    CHECK(ctl.state().runtime_rules[0].c_avg == 0.3);
    CHECK(ctl.state().runtime_rules[1].c_avg == doctest::Approx(0.62));
}

TEST_CASE("planner sees B from before this tick's refresh") {
    auto ctl = reference_controller(PolicyKind::naive3, 0.0, 1, 2);
    const ModelId small{2, "small"};
    // c = 0.1 would drop small's c_avg to 0.1 and make medium the argmin; the snapshot keeps 0.611.
    ctl.monitor_step(observed(1, small, 4.0, 0.1));
    auto a = ctl.analyzer_tick();  // 3.6 > 1.683, confidence branch over c_avg > 0.1
    REQUIRE(a.is_switch());
    CHECK(a.reason == Reason::confidence_branch);
    CHECK(a.target->name == "nano");
    CHECK(ctl.state().runtime_rules[1].c_avg == 0.1);
}

TEST_CASE("identical observations give identical decisions") {
    auto one = reference_controller(PolicyKind::ecomls, 0.3);
    auto two = reference_controller(PolicyKind::ecomls, 0.3);
    for (std::uint64_t id = 1; id <= 500; ++id) {
        const double e = 1.0 + static_cast<double>(id % 7);
        const double c = 0.1 * static_cast<double>(id % 9);
        one.monitor_step(observed(id, one.current_model(), e, c));
        two.monitor_step(observed(id, two.current_model(), e, c));
        const auto a = one.analyzer_tick();
        const auto b = two.analyzer_tick();
        CHECK(a.code() == b.code());
        CHECK(a.reason == b.reason);
        if (a.reason != Reason::not_triggered) {
            one.execute(a);
            two.execute(b);
        }
    }
    CHECK(one.state().switch_count == two.state().switch_count);
}

TEST_CASE("naive policies freeze the right columns") {
    for (auto kind : {PolicyKind::naive1, PolicyKind::naive2}) {
        auto ctl = reference_controller(kind);
        const auto before = ctl.state().runtime_rules;
        for (std::uint64_t id = 1; id <= 50; ++id) {
            ctl.monitor_step(observed(id, ctl.current_model(), 0.5 + 0.1 * static_cast<double>(id % 5), 0.2));
            const auto a = ctl.analyzer_tick();
            if (a.reason != Reason::not_triggered) ctl.execute(a);
        }
        const auto& after = ctl.state().runtime_rules;
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(after[i].e_min == before[i].e_min);
            CHECK(after[i].e_max == before[i].e_max);
            CHECK(after[i].e_latest == before[i].e_latest);
            if (kind == PolicyKind::naive1) {
                CHECK(after[i].c_avg == before[i].c_avg);
                CHECK(after[i].c_window.empty());
            }
        }
        if (kind == PolicyKind::naive2) CHECK(after[0].c_avg == doctest::Approx(0.2));
    }
}

TEST_CASE("no-switch policy charges nothing and never moves") {
    Controller ctl(testing::reference_a_rows(), Policy{PolicyKind::no_switch, ModelId{3, "medium"}, 0.0},
                   ControllerConfig{}, {1, "nano"}, 1);
    CHECK(ctl.current_model().name == "medium");
    for (std::uint64_t id = 1; id <= 20; ++id) {
        ctl.monitor_step(observed(id, ctl.current_model(), 50.0, 0.0));
        CHECK_FALSE(ctl.analyzer_tick().is_switch());
    }
    CHECK(ctl.state().phase_energy.total() == 0.0);
    CHECK(ctl.state().switch_count == 0);
}

TEST_CASE("phase accumulators never decrease") {
    auto ctl = reference_controller(PolicyKind::ecomls, 0.2);
    PhaseEnergy last;
    SplitMix64 rng(8);
    for (std::uint64_t id = 1; id <= 2000; ++id) {
        ctl.monitor_step(observed(id, ctl.current_model(), 20 * rng.uniform01(), rng.uniform01()));
        const auto a = ctl.analyzer_tick();
        if (a.reason != Reason::not_triggered) ctl.execute(a);
        const auto& now = ctl.state().phase_energy;
        CHECK(now.monitor >= last.monitor);
        CHECK(now.analyzer >= last.analyzer);
        CHECK(now.planner >= last.planner);
        CHECK(now.executor >= last.executor);
        last = now;
    }
    CHECK(last.monitor == doctest::Approx(2000 * 1.25));
}

TEST_CASE("window reset option clears the monitor window on a switch") {
    Controller ctl(testing::reference_a_rows(), Policy{PolicyKind::naive3, std::nullopt, 0.0},
                   ControllerConfig{3, TriggerSource::window, true}, {1, "nano"}, 1);
    ctl.monitor_step(observed(1, {1, "nano"}, 1.0, 0.5));
    ctl.execute(Action::switch_to({2, "small"}, Reason::explore));
    CHECK(ctl.state().monitor_window.empty());
}

TEST_CASE("wall-clock meter charges watts times elapsed time") {
    WallClockMeter meter(10.0);
    CHECK(meter.timed());
    CHECK(meter.joules(Phase::planner, std::chrono::milliseconds(500)) == doctest::Approx(5.0));
    CHECK_THROWS_AS(WallClockMeter(0.0), ConfigError);
    SyntheticMeter synthetic;
    CHECK(synthetic.joules(Phase::monitor, std::chrono::hours(1)) == 1.25);
}

TEST_CASE("baseline policies by name") {
    const auto ids = testing::four_models();
    CHECK(baseline_policy("nano", ids).kind == PolicyKind::no_switch);
    CHECK(baseline_policy("no_switch:large", ids).fixed_model->index == 4);
    CHECK(baseline_policy("no_switch:2", ids).name() == "small");
    CHECK(baseline_policy("naive1", ids).updates() == KnowledgeUpdate::frozen);
    CHECK(baseline_policy("naive2", ids).updates() == KnowledgeUpdate::confidence_only);
    CHECK(baseline_policy("naive3", ids).updates() == KnowledgeUpdate::full);
    CHECK(baseline_policy("naive3", ids).epsilon == 0.0);
    CHECK(baseline_policy("ecomls", ids, 0.2).name() == "ecomls_eps0.2");
    CHECK(baseline_policy("ecomls:0.4", ids).epsilon == 0.4);
    CHECK_THROWS_AS(baseline_policy("greedy", ids), ConfigError);
    CHECK_THROWS_AS(baseline_policy("no_switch:huge", ids), ConfigError);
    CHECK_THROWS_AS(baseline_policy("ecomls:2", ids), ConfigError);
}

}  // TEST_SUITE
