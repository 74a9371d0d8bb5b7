#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fpl/rng.hpp"
#include "fpl/schedules.hpp"

using namespace fpl;

TEST_CASE("static rates") {
    CHECK(eta_static(1.0, 100.0) == doctest::Approx(0.1));
    CHECK(eta_static(std::log(2.0), 2.0 * std::log(2.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(eta_static_ratio(0.25) == doctest::Approx(0.5));
    CHECK_THROWS_AS(eta_static(0.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(eta_static(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(eta_static_ratio(0.0), std::invalid_argument);
}

TEST_CASE("dynamic rates") {
    CHECK(eta_dynamic_t(4) == doctest::Approx(0.5));
    CHECK(eta_dynamic_t(1, 2.0) == doctest::Approx(1.0));
    CHECK(eta_dynamic_t(8, std::log(2.0)) ==
          doctest::Approx(std::sqrt(std::log(2.0) / 16.0)).epsilon(1e-12));
    CHECK(eta_dynamic_t(8, std::log(2.0)) == doctest::Approx(0.2082).epsilon(1e-3));
    CHECK_THROWS_AS(eta_dynamic_t(0), std::invalid_argument);
}

TEST_CASE("self-confident rates") {
    CHECK(eta_self_confident(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(eta_self_confident(7.0, 1.0) == doctest::Approx(0.25));
    CHECK(eta_self_confident(1.0, 4.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(eta_self_confident(-0.1), std::invalid_argument);
}

TEST_CASE("penalized-minimum adaptive rate") {
    const std::vector<double> k0 = {0.0};
    CHECK(eta_adaptive_min_penalized(std::vector<double>{1.0}, k0) == doctest::Approx(0.5));
    CHECK(eta_adaptive_min_penalized(std::vector<double>{0.0}, k0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // Both branches evaluated: min{sqrt(202), 10 + sqrt(102)} = sqrt(202).
    const std::vector<double> k = {0.0, 10.0};
    const std::vector<double> s = {100.0, 0.0};
    CHECK(eta_adaptive_min_penalized(s, k) ==
          doctest::Approx(1.0 / std::sqrt(202.0)).epsilon(1e-12));
    CHECK(eta_adaptive_min_penalized(s, k) == doctest::Approx(0.07036).epsilon(1e-4));

    CHECK_THROWS_AS(eta_adaptive_min_penalized({}, {}), std::invalid_argument);
}

TEST_CASE("best-loss adaptive rate clamps at sqrt(1/2)") {
    CHECK(eta_adaptive_smin(0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(eta_adaptive_smin(4.0, 1.0) == doctest::Approx(std::sqrt(0.5) * 0.5).epsilon(1e-12));
    CHECK(eta_adaptive_smin(1.0, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(eta_adaptive_smin(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("every schedule is non-increasing along nondecreasing observables") {
    rng::Stream stream(606);
    const ExpertPool pool = make_uniform_pool(4);
    const double K = pool.max_complexity();

    const std::vector<ScheduleSpec> specs = {
        {.kind = ScheduleKind::kStaticL, .loss_horizon = 50.0},
        {.kind = ScheduleKind::kStaticKL, .complexity_bound = K, .loss_horizon = 50.0},
        {.kind = ScheduleKind::kStaticRatio, .ratio = 0.2},
        {.kind = ScheduleKind::kDynamicT},
        {.kind = ScheduleKind::kDynamicKT, .complexity_bound = K},
        {.kind = ScheduleKind::kSelfConfident},
        {.kind = ScheduleKind::kSelfConfidentK, .complexity_bound = K},
        {.kind = ScheduleKind::kAdaptiveMinPenalized},
        {.kind = ScheduleKind::kAdaptiveSminK, .complexity_bound = K},
    };

    for (const ScheduleSpec& spec : specs) {
        Schedule schedule(spec, pool);
        std::vector<double> cum(4, 0.0);
        double learner = 0.0;
        double last = std::numeric_limits<double>::infinity();
        double last_inv = 0.0;   // 1/eta_0 = 0 exactly
        for (std::int64_t t = 1; t <= 300; ++t) {
            double cmin = cum[0];
            for (double c : cum) cmin = std::min(cmin, c);
            const double eta = schedule.eta({t, learner, cum, cmin});
            CHECK(eta > 0.0);
            CHECK(eta <= last + 1e-12);
            // telescoping increments of 1/eta are nonnegative
            CHECK(1.0 / eta - last_inv >= -1e-12);
            last = eta;
            last_inv = 1.0 / eta;
            learner += stream.uniform01();
            for (auto& c : cum) c += stream.uniform01();
        }
    }
}

TEST_CASE("self-confident schedules reject decreasing observables") {
    const ExpertPool pool = make_uniform_pool(2);
    Schedule schedule({.kind = ScheduleKind::kSelfConfident}, pool);
    std::vector<double> cum(2, 0.0);
    CHECK_NOTHROW(schedule.eta({1, 5.0, cum, 0.0}));
    CHECK_THROWS_AS(schedule.eta({2, 4.0, cum, 0.0}), std::invalid_argument);
}

TEST_CASE("schedules reject stalled rounds and missing parameters") {
    const ExpertPool pool = make_uniform_pool(2);
    Schedule schedule({.kind = ScheduleKind::kDynamicT}, pool);
    std::vector<double> cum(2, 0.0);
    CHECK_NOTHROW(schedule.eta({1, 0.0, cum, 0.0}));
    CHECK_THROWS_AS(schedule.eta({1, 0.0, cum, 0.0}), std::invalid_argument);

    CHECK_THROWS_AS(Schedule({.kind = ScheduleKind::kDynamicKT}, pool), std::invalid_argument);
    CHECK_THROWS_AS(Schedule({.kind = ScheduleKind::kStaticL}, pool), std::invalid_argument);
}

TEST_CASE("penalized-minimum and best-loss rates stay within a 4x envelope") {
    // Sanity envelope for uniform pools (K = ln n, n <= 16): both rules are
    // O(1/sqrt(s_min)) once s_min >= 10.
    for (int n : {2, 4, 8, 16}) {
        const ExpertPool pool = make_uniform_pool(n);
        const double K = pool.max_complexity();
        for (double smin : {10.0, 31.6, 100.0, 1000.0, 100000.0}) {
            const std::vector<double> cum(static_cast<std::size_t>(n), smin);
            const double a = eta_adaptive_min_penalized(cum, pool.complexities());
            const double b = eta_adaptive_smin(smin, K);
            const double ratio = a / b;
            CHECK(ratio >= 0.25);
            CHECK(ratio <= 4.0);
        }
    }
}

TEST_CASE("schedule kinds round-trip through their names") {
    for (ScheduleKind kind : {ScheduleKind::kStaticL, ScheduleKind::kStaticKL,
                              ScheduleKind::kStaticRatio, ScheduleKind::kDynamicT,
                              ScheduleKind::kDynamicKT, ScheduleKind::kSelfConfident,
                              ScheduleKind::kSelfConfidentK, ScheduleKind::kAdaptiveMinPenalized,
                              ScheduleKind::kAdaptiveSminK}) {
        CHECK(schedule_kind_from_name(schedule_kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(schedule_kind_from_name("nonsense"), std::invalid_argument);
}
