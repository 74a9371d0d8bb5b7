#pragma once
// Exact per-round choice probabilities of the perturbed-leader rule.
//
// With penalized scores s (cumulative loss plus k/eta) and perturbations
// q^i/eta, the probability that expert i attains the minimum is
//
//   P[I = i] = integral_{-inf}^{s_min} eta e^{-eta (s^i - m)}
//              prod_{j != i} (1 - e^{-eta (s^j - m)}) dm,
//
// which expands into an alternating sum over subsets containing i. Both
// routes are implemented and cross-check each other: the subset sum is
// exact but exponential in n, the quadrature handles any pool size.

#include <span>
#include <vector>

#include "fpl/types.hpp"

namespace fpl {

// Hard cap for the subset-sum route: 2^(n-1) terms per expert.
inline constexpr int kSubsetSumMaxExperts = 15;

// s = s_{<t} + k/eta together with its cached minimum.
struct PenalizedScore {
    std::vector<double> values;
    double min_value = 0.0;

    static PenalizedScore of(std::vector<double> values);
    static PenalizedScore from(std::span<const double> cum_prev,
                               std::span<const double> complexities, double eta);
    int size() const { return static_cast<int>(values.size()); }
};

// Inclusion-exclusion over subsets containing i, grouped by subset size and
// combined with compensated summation. Throws if n > kSubsetSumMaxExperts.
std::vector<double> choice_probabilities_subset_sum(const PenalizedScore& score, double eta);

// One-dimensional quadrature of the integral above. Substituting
// v = e^{-eta (s_min - m)} maps the domain to (0,1] and the integrand per
// expert becomes b_i * prod_{j != i} (1 - b_j v) with b_j = e^{-eta (s^j - s_min)},
// a polynomial of degree n-1. Gauss-Legendre with doubling node counts
// (16, 32, ..., 4096) runs until successive estimates agree to 1e-10 per
// component; the raw sum must land within 1e-7 of 1 or the call fails.
std::vector<double> choice_probabilities_quadrature(const PenalizedScore& score, double eta);

// Subset sum when n <= kSubsetSumMaxExperts, quadrature above the cap.
std::vector<double> choice_probabilities(const PenalizedScore& score, double eta);

// ell_t = sum_i P[I = i] * s_t^i.
double expected_loss(const PenalizedScore& score, double eta, const LossVector& losses);

} // namespace fpl
