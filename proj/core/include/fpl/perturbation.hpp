#pragma once
// Exponential perturbation sampling in both randomization regimes, plus the
// distributional facts about max_i {q^i - k^i} that the regret analysis
// rests on: its exact CDF (independent components), a union tail bound, and
// an expectation bound.

#include <cstdint>
#include <span>
#include <vector>

#include "fpl/rng.hpp"

namespace fpl {

enum class Regime {
    kInitialOnce,   // one perturbation vector drawn at t = 0, reused forever
    kFreshPerStep,  // an independent vector each round
};

// n independent Exp(1) draws, each with density e^{-q} on [0, inf),
// generated by inverse CDF q = -ln(u), u in (0,1].
std::vector<double> sample_exponential_vector(int n, rng::Stream& stream);

// Holds the learner's perturbation vector(s). Under kInitialOnce the vector
// never changes after construction; under kFreshPerStep round t always maps
// to the same substream (seed, t), so a round's vector is stable no matter
// how often it is requested or in which order rounds are replayed.
class Perturbation {
public:
    Perturbation(Regime regime, int n, std::uint64_t seed);

    std::span<const double> at_round(std::int64_t t);   // t >= 1
    Regime regime() const { return regime_; }
    std::uint64_t seed() const { return seed_; }
    int size() const { return n_; }

private:
    Regime regime_;
    int n_;
    std::uint64_t seed_;
    std::int64_t cached_round_ = -1;
    std::vector<double> current_;
};

// P[max_i {q^i - k^i} >= a] = 1 - prod_i max{0, 1 - e^{-a - k^i}},
// exact for independent Exp(1) components. a may be negative.
double shifted_max_cdf(double a, std::span<const double> complexities);

// min{1, u e^{-a}} with u = sum_i e^{-k^i}; upper-bounds shifted_max_cdf
// and, unlike it, holds even for dependent components.
double shifted_max_tail_bound(double a, std::span<const double> complexities);

// E[max_i {q^i - k^i}] <= 1 + ln u.
double shifted_max_expectation_bound(std::span<const double> complexities);

} // namespace fpl
