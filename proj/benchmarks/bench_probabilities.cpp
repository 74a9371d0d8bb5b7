#include <benchmark/benchmark.h>

#include <vector>

#include "fpl/exact_probabilities.hpp"
#include "fpl/rng.hpp"

namespace {

fpl::PenalizedScore random_score(int n, std::uint64_t seed) {
    fpl::rng::Stream stream(seed);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (auto& x : s) x = 20.0 * stream.uniform01();
    return fpl::PenalizedScore::of(std::move(s));
}

void BM_SubsetSum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const fpl::PenalizedScore score = random_score(n, 99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fpl::choice_probabilities_subset_sum(score, 0.5));
    }
}
BENCHMARK(BM_SubsetSum)->DenseRange(2, 14, 4);

void BM_Quadrature(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const fpl::PenalizedScore score = random_score(n, 99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fpl::choice_probabilities_quadrature(score, 0.5));
    }
}
BENCHMARK(BM_Quadrature)->RangeMultiplier(4)->Range(2, 512);

} // namespace

BENCHMARK_MAIN();
