#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fpl/harness.hpp"

using namespace fpl;

namespace {

EnvironmentSpec bernoulli_env(int n, double p, std::uint64_t seed, bool shared = false) {
    EnvironmentSpec env;
    env.kind = EnvironmentKind::kBernoulli;
    env.bernoulli_p.assign(static_cast<std::size_t>(n), p);
    env.seed = seed;
    env.share_seed_across_replicas = shared;
    return env;
}

} // namespace

TEST_CASE("a single expert has zero regret by construction") {
    RunSpec spec{.pool = make_uniform_pool(1)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.horizon = 10;
    spec.seed = 1;
    auto env = make_bernoulli({0.5}, 99);
    const GameTrace trace = run_game(spec, *env, true);
    CHECK(trace.actual_total == doctest::Approx(trace.final_cum[0]));
    CHECK(trace.regret() == doctest::Approx(0.0));
    CHECK(trace.rounds.size() == 10);
}

TEST_CASE("all-zero losses give zero learner loss") {
    RunSpec spec{.pool = make_uniform_pool(3)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.horizon = 100;
    spec.seed = 2;
    auto env = make_fixed({LossVector({0.0, 0.0, 0.0})});
    const GameTrace trace = run_game(spec, *env, false);
    CHECK(trace.actual_total == 0.0);
    CHECK(trace.final_cum_min == 0.0);
}

TEST_CASE("same spec and seed replay the same game") {
    RunSpec spec{.pool = make_uniform_pool(4)};
    spec.schedule = {.kind = ScheduleKind::kDynamicKT, .complexity_bound = std::log(4.0)};
    spec.horizon = 500;
    spec.seed = 12345;
    auto env_a = make_bernoulli(std::vector<double>(4, 0.4), 5);
    auto env_b = make_bernoulli(std::vector<double>(4, 0.4), 5);
    const GameTrace a = run_game(spec, *env_a, true);
    const GameTrace b = run_game(spec, *env_b, true);
    CHECK(a.actual_total == b.actual_total);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
        CHECK(a.rounds[t].decision == b.rounds[t].decision);
        CHECK(a.rounds[t].eta == b.rounds[t].eta);
    }
}

TEST_CASE("exact-expected mode records per-round expected losses") {
    RunSpec spec{.pool = make_uniform_pool(3)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.mode = RunMode::kExactExpected;
    spec.horizon = 50;
    spec.seed = 7;
    auto env = make_bernoulli(std::vector<double>(3, 0.5), 11);
    const GameTrace trace = run_game(spec, *env, true);
    CHECK(std::isfinite(trace.expected_total));
    for (const auto& r : trace.rounds) {
        CHECK(r.expected_loss >= 0.0);
        CHECK(r.expected_loss <= 1.0);
    }
    // Expected and realized totals should be in the same ballpark.
    CHECK(std::abs(trace.expected_total - trace.actual_total) <= 15.0);
}

TEST_CASE("deterministic weights realize the expected loss") {
    RunSpec spec{.pool = make_uniform_pool(3)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.predictor = PredictorKind::kDeterministicWeights;
    spec.horizon = 30;
    spec.seed = 3;
    auto env = make_bernoulli(std::vector<double>(3, 0.5), 13);
    const GameTrace trace = run_game(spec, *env, true);
    CHECK(trace.expected_total == doctest::Approx(trace.actual_total));
    for (const auto& r : trace.rounds) CHECK(r.decision == -1);
}

TEST_CASE("monte carlo replication: determinism and degenerate stderr") {
    RunSpec spec{.pool = make_uniform_pool(1)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.horizon = 20;
    spec.seed = 21;
    EnvironmentSpec env;
    env.kind = EnvironmentKind::kFixed;
    env.fixed_rows = {LossVector({0.25})};

    const McResult a = monte_carlo_regret(spec, env, 8);
    CHECK(a.regret_stderr == doctest::Approx(0.0));
    CHECK(a.mean_regret == doctest::Approx(0.0));

    const McResult b = monte_carlo_regret(spec, env, 8);
    CHECK(a.mean_actual == b.mean_actual);

    CHECK_THROWS_AS(monte_carlo_regret(spec, env, 1), std::invalid_argument);
}

TEST_CASE("replica results do not depend on the thread count") {
    RunSpec spec{.pool = make_uniform_pool(3)};
    spec.schedule = {.kind = ScheduleKind::kDynamicKT, .complexity_bound = std::log(3.0)};
    spec.horizon = 200;
    spec.seed = 33;
    const EnvironmentSpec env = bernoulli_env(3, 0.5, 404);
    const McResult serial = monte_carlo_regret(spec, env, 12, 1);
    const McResult threaded = monte_carlo_regret(spec, env, 12, 4);
    CHECK(serial.mean_regret == threaded.mean_regret);
    CHECK(serial.regret_stderr == threaded.regret_stderr);
}

TEST_CASE("bound evaluation rejects mismatched configurations") {
    RunSpec spec{.pool = make_uniform_pool(2)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.horizon = 100;
    spec.seed = 4;
    const EnvironmentSpec env = bernoulli_env(2, 0.5, 17);
    const McResult mc = monte_carlo_regret(spec, env, 4);

    CHECK_THROWS_AS(evaluate_bound(BoundId::kSelfConfidentK, mc, spec), ConfigError);
    CHECK_THROWS_AS(evaluate_bound(BoundId::kDynamicKT, mc, spec), ConfigError);
    CHECK_NOTHROW(evaluate_bound(BoundId::kDynamicT, mc, spec));

    // K below max complexity must be refused.
    RunSpec bad = spec;
    bad.schedule = {.kind = ScheduleKind::kDynamicKT, .complexity_bound = 0.1};
    CHECK_THROWS_AS(evaluate_bound(BoundId::kDynamicKT, mc, bad), ConfigError);
}

TEST_CASE("every matching upper bound passes on sampled Bernoulli games") {
    // The bounds hold for all sequences, so a failure here is a build bug.
    const int n = 4;
    const double K = std::log(static_cast<double>(n));
    const EnvironmentSpec env = bernoulli_env(n, 0.5, 71);

    struct Case {
        ScheduleSpec schedule;
        BoundId bound;
        RunMode mode = RunMode::kActual;
    };
    const std::vector<Case> cases = {
        {{.kind = ScheduleKind::kStaticL, .loss_horizon = 2000.0}, BoundId::kStaticL},
        {{.kind = ScheduleKind::kStaticKL, .complexity_bound = K, .loss_horizon = 2000.0},
         BoundId::kStaticKL},
        {{.kind = ScheduleKind::kDynamicT}, BoundId::kDynamicT},
        {{.kind = ScheduleKind::kDynamicKT, .complexity_bound = K}, BoundId::kDynamicKT},
        {{.kind = ScheduleKind::kSelfConfident, .ell_source = EllSource::kExact},
         BoundId::kSelfConfident, RunMode::kExactExpected},
        {{.kind = ScheduleKind::kSelfConfidentK, .complexity_bound = K,
          .ell_source = EllSource::kExact},
         BoundId::kSelfConfidentK, RunMode::kExactExpected},
        {{.kind = ScheduleKind::kAdaptiveMinPenalized}, BoundId::kAdaptivePenalized},
        {{.kind = ScheduleKind::kAdaptiveSminK, .complexity_bound = K}, BoundId::kAdaptiveSminK},
    };

    for (const Case& c : cases) {
        RunSpec spec{.pool = make_uniform_pool(n)};
        spec.schedule = c.schedule;
        spec.mode = c.mode;
        spec.horizon = 2000;
        spec.seed = 55;
        const McResult mc = monte_carlo_regret(spec, env, 30);
        const BoundReport report = evaluate_bound(c.bound, mc, spec);
        INFO(report.theorem, " slack=", report.slack, " stderr=", report.lhs_stderr);
        CHECK(report.pass);
    }
}

TEST_CASE("static-ratio bound and its implied-horizon side conditions") {
    const int n = 3;
    RunSpec spec{.pool = make_uniform_pool(n)};
    const double k = std::log(static_cast<double>(n));
    const double L = 2000.0;
    spec.schedule = {.kind = ScheduleKind::kStaticRatio, .ratio = k / L};
    spec.horizon = 1000;   // realized loss <= 1000 <= implied horizon
    spec.seed = 77;
    const McResult mc = monte_carlo_regret(spec, bernoulli_env(n, 0.5, 78), 20);
    const BoundReport report = evaluate_bound(BoundId::kStaticRatio, mc, spec);
    CHECK(report.pass);

    // Implied horizon below the realized loss: no valid target expert.
    RunSpec tight = spec;
    tight.schedule.ratio = k / 10.0;
    RunSpec run_tight = tight;
    run_tight.horizon = 1000;
    const McResult mc_tight = monte_carlo_regret(run_tight, bernoulli_env(n, 0.5, 78), 4);
    CHECK_THROWS_AS(evaluate_bound(BoundId::kStaticRatio, mc_tight, run_tight), ConfigError);
}

TEST_CASE("the lower bound holds exactly in expectation") {
    RunSpec spec{.pool = make_uniform_pool(4)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.mode = RunMode::kExactExpected;
    spec.horizon = 300;
    spec.seed = 91;
    const McResult mc = monte_carlo_regret(spec, bernoulli_env(4, 0.5, 92), 5);
    const BoundReport report = evaluate_bound(BoundId::kLowerBeh, mc, spec);
    CHECK(report.lower_bound);
    CHECK(report.pass);

    RunSpec nonuniform{.pool = ExpertPool({0.5, 2.0})};
    nonuniform.schedule = spec.schedule;
    nonuniform.horizon = spec.horizon;
    CHECK_THROWS_AS(evaluate_bound(BoundId::kLowerBeh, mc, nonuniform), ConfigError);
}

TEST_CASE("infeasible-rule diagnostics satisfy their hindsight bound") {
    RunSpec spec{.pool = make_uniform_pool(3)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.mode = RunMode::kExactExpected;
    spec.ifpl_diagnostic = true;
    spec.horizon = 200;
    spec.seed = 14;
    const McResult mc = monte_carlo_regret(spec, bernoulli_env(3, 0.5, 15), 4);
    const BoundReport report = evaluate_bound(BoundId::kIfplVsBeh, mc, spec);
    CHECK(report.diagnostic);
    CHECK(report.pass);

    auto env = bernoulli_env(3, 0.5, 15).instantiate(0);
    const GameTrace trace = run_game(spec, *env, true);
    const BoundReport factor = evaluate_round_bound(BoundId::kFplVsIfplFactor, trace, spec);
    CHECK(factor.pass);

    RunSpec no_diag = spec;
    no_diag.ifpl_diagnostic = false;
    const McResult mc2 = monte_carlo_regret(no_diag, bernoulli_env(3, 0.5, 15), 4);
    CHECK_THROWS_AS(evaluate_bound(BoundId::kIfplVsBeh, mc2, no_diag), ConfigError);
}

TEST_CASE("adaptive adversary: per-step randomization obeys the dynamic bound") {
    RunSpec spec{.pool = make_uniform_pool(2)};
    spec.schedule = {.kind = ScheduleKind::kDynamicKT, .complexity_bound = std::log(2.0)};
    spec.regime = Regime::kFreshPerStep;
    spec.horizon = 1000;
    spec.seed = 23;
    EnvironmentSpec env;
    env.kind = EnvironmentKind::kLastChoicePunisher;
    env.dimension = 2;
    const McResult mc = monte_carlo_regret(spec, env, 40);
    const BoundReport report = evaluate_bound(BoundId::kDynamicKT, mc, spec);
    CHECK(report.pass);
}

TEST_CASE("coverage check validates its preconditions") {
    RunSpec spec{.pool = make_uniform_pool(2)};
    spec.schedule = {.kind = ScheduleKind::kDynamicKT, .complexity_bound = std::log(2.0)};
    spec.horizon = 100;
    spec.seed = 31;
    const EnvironmentSpec env = bernoulli_env(2, 0.5, 32, true);

    // c too large for the sequence: expected loss < 3c.
    CHECK_THROWS_AS(high_probability_check(spec, env, 40.0, 2.0, 10), ConfigError);

    RunSpec once = spec;
    once.regime = Regime::kInitialOnce;
    CHECK_THROWS_AS(high_probability_check(once, env, 3.0, 2.0, 10), ConfigError);

    EnvironmentSpec adaptive;
    adaptive.kind = EnvironmentKind::kLastChoicePunisher;
    adaptive.dimension = 2;
    CHECK_THROWS_AS(high_probability_check(spec, adaptive, 3.0, 2.0, 10), ConfigError);

    const CoverageReport report = high_probability_check(spec, env, 3.0, 2.0, 400);
    CHECK(report.expected_total >= 9.0);
    CHECK(report.ch_pass);
    CHECK(report.markov_pass);
}

TEST_CASE("the loss ratio approaches one under an adaptive rate") {
    RunSpec spec{.pool = make_uniform_pool(5)};
    spec.schedule = {.kind = ScheduleKind::kAdaptiveSminK, .complexity_bound = std::log(5.0)};
    spec.seed = 41;
    spec.horizon = 0;   // per grid point
    const EnvironmentSpec env = bernoulli_env(5, 0.5, 42, true);
    const std::vector<std::int64_t> grid = {1'000, 10'000, 100'000};
    const auto points = ratio_convergence_check(spec, env, grid);
    REQUIRE(points.size() == 3);
    for (const auto& p : points) {
        CHECK_FALSE(p.degenerate);
        CHECK(p.ratio > 0.9);
    }
    CHECK(std::abs(points[2].ratio - 1.0) < std::abs(points[0].ratio - 1.0));

    RunSpec nonuniform{.pool = ExpertPool({0.5, 2.0})};
    nonuniform.schedule = spec.schedule;
    nonuniform.seed = 41;
    CHECK_THROWS_AS(ratio_convergence_check(nonuniform, env, grid), ConfigError);
}

TEST_CASE("self-confident schedules run from realized or sampled loss feeds") {
    // The realized-loss (u) and per-round sampling feeds are config options;
    // neither needs exact-expected mode.
    RunSpec spec{.pool = make_uniform_pool(3)};
    spec.schedule = {.kind = ScheduleKind::kSelfConfidentK,
                     .complexity_bound = std::log(3.0),
                     .ell_source = EllSource::kActual};
    spec.horizon = 300;
    spec.seed = 51;
    auto env = make_bernoulli(std::vector<double>(3, 0.5), 52);
    const GameTrace from_actual = run_game(spec, *env, true);
    CHECK(from_actual.rounds.front().eta ==
          doctest::Approx(std::sqrt(std::log(3.0) / 2.0)).epsilon(1e-12));
    CHECK(from_actual.eta_final < from_actual.rounds.front().eta);

    spec.schedule.ell_source = EllSource::kMonteCarlo;
    spec.mc_probability_samples = 64;
    auto env2 = make_bernoulli(std::vector<double>(3, 0.5), 52);
    const GameTrace from_sampled = run_game(spec, *env2, false);
    CHECK(from_sampled.actual_total > 0.0);

    // The exact feed outside exact-expected mode is refused.
    spec.schedule.ell_source = EllSource::kExact;
    auto env3 = make_bernoulli(std::vector<double>(3, 0.5), 52);
    CHECK_THROWS_AS(run_game(spec, *env3, false), ConfigError);
}

TEST_CASE("simplex play cannot face an adaptive adversary") {
    RunSpec spec{.pool = make_uniform_pool(2)};
    spec.schedule = {.kind = ScheduleKind::kDynamicT};
    spec.predictor = PredictorKind::kDeterministicWeights;
    spec.horizon = 10;
    spec.seed = 61;
    auto env = make_last_choice_punisher(2);
    CHECK_THROWS_AS(run_game(spec, *env, false), ConfigError);
}

TEST_CASE("identity suites pass on many random instances") {
    CHECK(check_loss_decomposition_identity(300, 61).pass);
    CHECK(check_hindsight_zero_regret(300, 62).pass);
    CHECK(check_prequential_nonnegative_regret(300, 63).pass);
}

TEST_CASE("bound ids round-trip through their names") {
    for (BoundId id : {BoundId::kIfplVsBeh, BoundId::kFplVsIfplFactor, BoundId::kStaticL,
                       BoundId::kStaticKL, BoundId::kStaticRatio, BoundId::kDynamicT,
                       BoundId::kDynamicKT, BoundId::kSelfConfident, BoundId::kSelfConfidentK,
                       BoundId::kAdaptivePenalized, BoundId::kAdaptiveSminK,
                       BoundId::kHierarchyChain, BoundId::kLowerBeh}) {
        CHECK(bound_id_from_name(bound_id_name(id)) == id);
    }
    CHECK_THROWS_AS(bound_id_from_name("thm42"), std::invalid_argument);
}
