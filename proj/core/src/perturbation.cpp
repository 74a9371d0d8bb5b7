#include "fpl/perturbation.hpp"

#include <cmath>
#include <stdexcept>

namespace fpl {

std::vector<double> sample_exponential_vector(int n, rng::Stream& stream) {
    if (n < 1) throw std::invalid_argument("sample_exponential_vector: n must be >= 1");
    std::vector<double> q(static_cast<std::size_t>(n));
    for (auto& x : q) x = stream.exponential();
    return q;
}

Perturbation::Perturbation(Regime regime, int n, std::uint64_t seed)
    : regime_(regime), n_(n), seed_(seed) {
    if (n < 1) throw std::invalid_argument("Perturbation: n must be >= 1");
    if (regime_ == Regime::kInitialOnce) {
        rng::Stream stream(rng::derive(seed_, rng::kLabelRound, 0));
        current_ = sample_exponential_vector(n_, stream);
        cached_round_ = 0;
    }
}

std::span<const double> Perturbation::at_round(std::int64_t t) {
    if (t < 1) throw std::invalid_argument("Perturbation::at_round: t must be >= 1");
    if (regime_ == Regime::kInitialOnce) return current_;
    if (t != cached_round_) {
        rng::Stream stream(rng::derive(seed_, rng::kLabelRound, static_cast<std::uint64_t>(t)));
        current_ = sample_exponential_vector(n_, stream);
        cached_round_ = t;
    }
    return current_;
}

double shifted_max_cdf(double a, std::span<const double> complexities) {
    if (complexities.empty()) throw std::invalid_argument("shifted_max_cdf: empty complexities");
    double below = 1.0;   // P[max < a]
    for (double k : complexities) {
        const double p = 1.0 - std::exp(-a - k);
        below *= (p > 0.0) ? p : 0.0;
        if (below == 0.0) break;
    }
    return 1.0 - below;
}

double shifted_max_tail_bound(double a, std::span<const double> complexities) {
    if (complexities.empty()) throw std::invalid_argument("shifted_max_tail_bound: empty complexities");
    double u = 0.0;
    for (double k : complexities) u += std::exp(-k);
    const double bound = u * std::exp(-a);
    return bound < 1.0 ? bound : 1.0;
}

double shifted_max_expectation_bound(std::span<const double> complexities) {
    if (complexities.empty()) {
        throw std::invalid_argument("shifted_max_expectation_bound: empty complexities");
    }
    double u = 0.0;
    for (double k : complexities) u += std::exp(-k);
    return 1.0 + std::log(u);
}

} // namespace fpl
