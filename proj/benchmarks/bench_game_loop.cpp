#include <benchmark/benchmark.h>

#include <cmath>

#include "fpl/harness.hpp"

namespace {

void BM_GameRounds(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    fpl::RunSpec spec{.pool = fpl::make_uniform_pool(n)};
    spec.schedule = {.kind = fpl::ScheduleKind::kDynamicKT,
                     .complexity_bound = std::log(static_cast<double>(n))};
    spec.horizon = 10'000;
    spec.seed = 7;
    fpl::EnvironmentSpec env;
    env.kind = fpl::EnvironmentKind::kBernoulli;
    env.bernoulli_p.assign(static_cast<std::size_t>(n), 0.5);
    env.seed = 11;

    for (auto _ : state) {
        auto instance = env.instantiate(0);
        benchmark::DoNotOptimize(fpl::run_game(spec, *instance, false));
    }
    state.SetItemsProcessed(state.iterations() * spec.horizon);
}
BENCHMARK(BM_GameRounds)->Arg(2)->Arg(16)->Arg(128);

void BM_HierarchicalRounds(benchmark::State& state) {
    fpl::RunSpec spec{.pool = fpl::make_countable_pool(static_cast<int>(state.range(0)))};
    spec.schedule = {.kind = fpl::ScheduleKind::kDynamicT};
    spec.predictor = fpl::PredictorKind::kHierarchicalFpl;
    spec.horizon = 10'000;
    spec.seed = 7;
    fpl::EnvironmentSpec env;
    env.kind = fpl::EnvironmentKind::kBernoulli;
    env.bernoulli_p.assign(static_cast<std::size_t>(spec.pool.size()), 0.5);
    env.seed = 11;

    for (auto _ : state) {
        auto instance = env.instantiate(0);
        benchmark::DoNotOptimize(fpl::run_game(spec, *instance, false));
    }
    state.SetItemsProcessed(state.iterations() * spec.horizon);
}
BENCHMARK(BM_HierarchicalRounds)->Arg(100);

void BM_ExactExpectedRounds(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    fpl::RunSpec spec{.pool = fpl::make_uniform_pool(n)};
    spec.schedule = {.kind = fpl::ScheduleKind::kSelfConfidentK,
                     .complexity_bound = std::log(static_cast<double>(n)),
                     .ell_source = fpl::EllSource::kExact};
    spec.mode = fpl::RunMode::kExactExpected;
    spec.horizon = 1'000;
    spec.seed = 7;
    fpl::EnvironmentSpec env;
    env.kind = fpl::EnvironmentKind::kBernoulli;
    env.bernoulli_p.assign(static_cast<std::size_t>(n), 0.5);
    env.seed = 11;

    for (auto _ : state) {
        auto instance = env.instantiate(0);
        benchmark::DoNotOptimize(fpl::run_game(spec, *instance, false));
    }
    state.SetItemsProcessed(state.iterations() * spec.horizon);
}
BENCHMARK(BM_ExactExpectedRounds)->Arg(5)->Arg(10);

} // namespace

BENCHMARK_MAIN();
