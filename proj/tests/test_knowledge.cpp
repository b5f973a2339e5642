#include <numeric>
#include <sstream>

#include "doctest.h"
#include "ecoswitch/errors.hpp"
#include "ecoswitch/knowledge.hpp"
#include "ecoswitch/seeds.hpp"
#include "test_support.hpp"

using namespace ecoswitch;

namespace {

RequestLogEntry entry(std::uint64_t id, double energy = 1.0, double confidence = 0.5) {
    RequestLogEntry e;
    e.request_id = id;
    e.arrival_time = static_cast<double>(id);
    e.model = {1, "nano"};
    e.energy = energy;
    e.confidence = confidence;
    e.model_proc_time = 0.02;
    e.system_proc_time = 0.03;
    e.detections = 3;
    return e;
}

double plain_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("knowledge") {

TEST_CASE("ring buffer evicts oldest and tracks the mean") {
    RingBuffer rb(3);
    CHECK(rb.empty());
    CHECK_THROWS_AS(rb.mean(), NoDataError);
    CHECK_THROWS_AS(rb.latest(), NoDataError);
    rb.push(1.0);
    rb.push(2.0);
    CHECK(rb.mean() == doctest::Approx(1.5));
    rb.push(3.0);
    rb.push(4.0);
    CHECK(rb.full());
    CHECK(rb.values() == std::vector<double>{2.0, 3.0, 4.0});
    CHECK(rb.latest() == 4.0);
    CHECK(rb.mean() == doctest::Approx(3.0));
    rb.clear();
    CHECK(rb.empty());
    CHECK_THROWS_AS(RingBuffer(0), ConfigError);
}

TEST_CASE("ring buffer running mean stays within 1e-12 of recomputation") {
    SplitMix64 rng(11);
    RingBuffer rb(7);
    for (int i = 0; i < 200000; ++i) {
        rb.push(rng.uniform01() * (i % 3 == 0 ? 1e3 : 1.0));
        if (i % 997 == 0) CHECK(std::abs(rb.mean() - plain_mean(rb.values())) < 1e-9);
    }
    RingBuffer unit(7);
    for (int i = 0; i < 100000; ++i) {
        unit.push(rng.uniform01());
        REQUIRE(std::abs(unit.mean() - plain_mean(unit.values())) <= 1e-12);
    }
}

TEST_CASE("log_request keeps insertion order and rejects non-increasing ids") {
    LogRepository repo;
    repo.log_request(entry(1));
    CHECK(repo.size() == 1);
    repo.log_request(entry(2));
    repo.log_request(entry(3));
    std::vector<std::uint64_t> ids;
    for (const auto& e : repo) ids.push_back(e.request_id);
    CHECK(ids == std::vector<std::uint64_t>{1, 2, 3});
    CHECK_THROWS_AS(repo.log_request(entry(2)), OrderingError);
    CHECK_THROWS_AS(repo.log_request(entry(3)), OrderingError);
    CHECK(repo.size() == 3);
}

TEST_CASE("log entries are validated") {
    LogRepository repo;
    CHECK_THROWS_AS(repo.log_request(entry(1, -1.0)), ValidationError);
    CHECK_THROWS_AS(repo.log_request(entry(1, 1.0, 1.2)), ValidationError);
    auto slow = entry(1);
    slow.system_proc_time = 0.01;
    CHECK_THROWS_AS(repo.log_request(slow), ValidationError);
    auto neg = entry(1);
    neg.detections = -1;
    CHECK_THROWS_AS(repo.log_request(neg), ValidationError);
    CHECK(repo.empty());
}

TEST_CASE("log export header and rows") {
    LogRepository repo;
    repo.log_request(entry(1, 1.61, 0.536));
    std::ostringstream out;
    repo.write_csv(out);
    CHECK(out.str() ==
          "request_id,arrival_time,model,energy_j,confidence,model_proc_time_s,system_proc_time_s,detections\n"
          "1,1,nano,1.61,0.536,0.02,0.03,3\n");
}

TEST_CASE("init_runtime_rules seeds e_latest with the midpoint") {
    std::vector<BaseRuleRow> a{{{1, "m"}, 2.0, 16.0, 0.5}};
    auto b = init_runtime_rules(a, 5);
    REQUIRE(b.size() == 1);
    CHECK(b[0].e_min == 2.0);
    CHECK(b[0].e_max == 16.0);
    CHECK(b[0].e_latest == 9.0);
    CHECK(b[0].c_avg == 0.5);
    CHECK(b[0].c_window.empty());
    CHECK(b[0].c_window.capacity() == 5);

    CHECK_THROWS_AS(init_runtime_rules({}, 5), ConfigError);
    CHECK_THROWS_AS(init_runtime_rules(a, 0), ConfigError);

    auto four = init_runtime_rules(testing::reference_a_rows(), 10);
    REQUIRE(four.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(four[i].model.index == static_cast<int>(i + 1));
}

TEST_CASE("update_runtime_rules refreshes e_latest and the confidence window") {
    std::vector<BaseRuleRow> a{{{1, "m"}, 2.0, 16.0, 0.5}};
    auto row = init_runtime_rules(a, 2)[0];
    row = update_runtime_rules(row, 5.0, 0.6);
    row = update_runtime_rules(row, 3.0, 0.8);
    CHECK(row.e_latest == 3.0);
    CHECK(row.c_avg == doctest::Approx(0.7));

    auto row2 = init_runtime_rules(a, 2)[0];
    row2 = update_runtime_rules(row2, 1.0, 0.5);
    row2 = update_runtime_rules(row2, 1.0, 0.5);
    row2 = update_runtime_rules(row2, 1.0, 0.9);
    CHECK(row2.c_window.values() == std::vector<double>{0.5, 0.9});
    CHECK(row2.c_avg == doctest::Approx(0.7));
    CHECK(row2.e_min == 2.0);
    CHECK(row2.e_max == 16.0);

    CHECK_THROWS_AS(update_runtime_rules(row2, 1.0, 1.5), ValidationError);
    CHECK_THROWS_AS(update_runtime_rules(row2, -1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(update_runtime_confidence(row2, -0.1), ValidationError);
}

TEST_CASE("update_runtime_confidence leaves energies alone") {
    auto row = testing::reference_b_rows(3)[0];
    const double latest = row.e_latest;
    row = update_runtime_confidence(row, 0.9);
    CHECK(row.e_latest == latest);
    CHECK(row.c_avg == 0.9);
}

TEST_CASE("window_stats means, partial windows and empty windows") {
    SlidingWindow w(3);
    CHECK_THROWS_AS(window_stats(w), NoDataError);
    w.push(5.0, 0.9);
    auto one = window_stats(w);
    CHECK(one.e_bar == 5.0);
    CHECK(one.c_bar == 0.9);

    SlidingWindow full(3);
    full.push(1.0, 0.4);
    full.push(2.0, 0.5);
    full.push(3.0, 0.6);
    auto s = window_stats(full);
    CHECK(s.e_bar == doctest::Approx(2.0));
    CHECK(s.c_bar == doctest::Approx(0.5));

    SlidingWindow constant(4);
    for (int i = 0; i < 13; ++i) constant.push(1.61, 0.536);
    auto c = window_stats(constant);
    CHECK(c.e_bar == 1.61);
    CHECK(c.c_bar == 0.536);

    full.clear();
    CHECK(full.empty());
}

TEST_CASE("base rules CSV round trip") {
    testing::TempDir dir;
    auto a = testing::reference_a_rows();
    {
        auto out = std::ofstream(dir / "A.csv");
        write_base_rules_csv(out, a);
    }
    auto back = read_base_rules_csv(dir / "A.csv", testing::four_models());
    REQUIRE(back.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back[i].model == a[i].model);
        CHECK(back[i].e_min == a[i].e_min);
        CHECK(back[i].e_max == a[i].e_max);
        CHECK(back[i].c_avg == a[i].c_avg);
    }
    testing::write_text(dir / "bad.csv", "model,e_min,e_max,c_avg\nnano,3,2,0.5\n");
    CHECK_THROWS_AS(read_base_rules_csv(dir / "bad.csv", testing::four_models()), Error);
    CHECK_THROWS_AS(read_base_rules_csv(dir / "missing.csv", testing::four_models()), IoError);
}

TEST_CASE("runtime rules export lists the confidence window") {
    auto b = testing::reference_b_rows(3);
    b[0] = update_runtime_rules(b[0], 2.0, 0.25);
    b[0] = update_runtime_rules(b[0], 1.0, 0.75);
    std::ostringstream out;
    write_runtime_rules_csv(out, {b[0]});
    CHECK(out.str() == "model,e_min,e_max,e_latest,c_avg,c_window\nnano,1.61,1.61,1,0.5,0.25;0.75\n");
}

}  // TEST_SUITE
