#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fpl/rng.hpp"
#include "fpl/types.hpp"

using namespace fpl;

TEST_CASE("uniform pool sets k = ln n and unit weight sum") {
    const ExpertPool one = make_uniform_pool(1);
    CHECK(one.size() == 1);
    CHECK(one.complexity(0) == doctest::Approx(0.0));

    const ExpertPool two = make_uniform_pool(2);
    CHECK(two.complexity(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(two.complexity(1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(two.uniform_complexities());

    const ExpertPool four = make_uniform_pool(4);
    CHECK(four.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_uniform_pool(0), std::invalid_argument);
}

TEST_CASE("countable pool follows 1/2 + 2 ln i") {
    const ExpertPool p1 = make_countable_pool(1);
    CHECK(p1.complexity(0) == doctest::Approx(0.5).epsilon(1e-15));

    const ExpertPool p2 = make_countable_pool(2);
    CHECK(p2.complexity(1) == doctest::Approx(0.5 + 2.0 * std::log(2.0)).epsilon(1e-12));

    // Independent summation oracle for the weight sum at cap 100.
    double oracle = 0.0;
    for (int i = 1; i <= 100; ++i) oracle += std::exp(-0.5) / (static_cast<double>(i) * i);
    const ExpertPool p100 = make_countable_pool(100);
    CHECK(p100.weight_sum() == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(p100.weight_sum() <= 1.0);

    CHECK_THROWS_AS(make_countable_pool(0), std::invalid_argument);
}

TEST_CASE("finitized countable pool uses entering times ceil(k)") {
    const ExpertPool pool = make_countable_pool(10, true);
    CHECK(pool.entering_time(0) == 1);   // ceil(0.5)
    for (int i = 0; i < pool.size(); ++i) {
        CHECK(pool.entering_time(i) ==
              static_cast<std::int64_t>(std::ceil(pool.complexity(i))));
    }
    CHECK(pool.has_entering_times());
    CHECK_FALSE(make_countable_pool(10).has_entering_times());
}

TEST_CASE("pool rejects invalid complexities and entering times") {
    CHECK_THROWS_AS(ExpertPool({-0.1, 0.5}), std::invalid_argument);
    // Two experts with weight 1 each: weight sum 2 > 1.
    CHECK_THROWS_AS(ExpertPool({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ExpertPool({0.5}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(ExpertPool({0.5, 0.9}, {1}), std::invalid_argument);
}

TEST_CASE("loss vectors are confined to [0,1]") {
    CHECK_NOTHROW(LossVector({0.0, 1.0, 0.5}));
    CHECK_THROWS_AS(LossVector({0.5, 1.2}), std::invalid_argument);
    CHECK_THROWS_AS(LossVector({-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(LossVector({}), std::invalid_argument);
}

TEST_CASE("accumulate tracks totals, minima and the round counter") {
    GameState state(2);
    CHECK(state.round() == 0);
    state.accumulate(LossVector({0.0, 1.0}));
    CHECK(state.round() == 1);
    CHECK(state.cum_loss(0) == 0.0);
    CHECK(state.cum_loss(1) == 1.0);
    CHECK(state.cum_min() == 0.0);

    state.accumulate(LossVector({1.0, 0.0}));
    CHECK(state.cum_loss(0) == 1.0);
    CHECK(state.cum_loss(1) == 1.0);
    CHECK(state.cum_min() == 1.0);

    CHECK_THROWS_AS(state.accumulate(LossVector({0.5})), std::invalid_argument);
}

TEST_CASE("prefix splits of a sequence accumulate to the one-shot sums") {
    rng::Stream stream(404);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(stream.next_u64() % 6);
        const int T = 1 + static_cast<int>(stream.next_u64() % 40);
        GameState running(n);
        std::vector<double> oneshot(static_cast<std::size_t>(n), 0.0);
        for (int t = 0; t < T; ++t) {
            std::vector<double> row(static_cast<std::size_t>(n));
            for (auto& x : row) x = stream.uniform01();
            for (int i = 0; i < n; ++i) oneshot[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
            running.accumulate(LossVector(row));
        }
        for (int i = 0; i < n; ++i) {
            CHECK(running.cum_loss(i) ==
                  doctest::Approx(oneshot[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("best expert in hindsight breaks ties at the lowest index") {
    GameState state(3);
    state.accumulate(LossVector({1.0, 1.0, 1.0}));
    state.accumulate(LossVector({1.0, 0.0, 0.5}));
    state.accumulate(LossVector({1.0, 0.0, 0.5}));
    const BestExpert best = best_expert_in_hindsight(state);
    CHECK(best.index == 1);
    CHECK(best.loss == doctest::Approx(1.0));

    GameState tie(2);
    tie.accumulate(LossVector({1.0, 1.0}));
    CHECK(best_expert_in_hindsight(tie).index == 0);

    GameState empty(2);
    CHECK_THROWS_AS(best_expert_in_hindsight(empty), std::logic_error);
}

TEST_CASE("best expert dominates every expert's cumulative loss") {
    rng::Stream stream(505);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(stream.next_u64() % 5);
        GameState state(n);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> row(static_cast<std::size_t>(n));
            for (auto& x : row) x = stream.uniform01();
            state.accumulate(LossVector(row));
        }
        const BestExpert best = best_expert_in_hindsight(state);
        for (int i = 0; i < n; ++i) CHECK(best.loss <= state.cum_loss(i) + 1e-15);
        CHECK(best.loss == doctest::Approx(state.cum_min()));
    }
}

TEST_CASE("the alternating trap sequence favors expert 2 with loss 2.5 at T=6") {
    // Direct summation oracle: expert 1 sees 0,1,0,1,0,1; expert 2 sees
    // 1/2,0,1,0,1,0.
    GameState state(2);
    const double rows[6][2] = {{0, 0.5}, {1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}};
    for (const auto& row : rows) state.accumulate(LossVector({row[0], row[1]}));
    const BestExpert best = best_expert_in_hindsight(state);
    CHECK(best.index == 1);
    CHECK(best.loss == doctest::Approx(2.5));
    CHECK(state.cum_loss(0) == doctest::Approx(3.0));
}

TEST_CASE("decisions validate simplex weights") {
    CHECK_NOTHROW(Decision::weights({0.5, 0.5}));
    CHECK_NOTHROW(Decision::weights({1.0}));
    CHECK_THROWS_AS(Decision::weights({0.6, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(Decision::weights({1.2, -0.2}), std::invalid_argument);
    const Decision d = Decision::index(3);
    CHECK(d.is_index());
    CHECK(d.chosen() == 3);
}
