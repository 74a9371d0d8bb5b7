#include "fpl/exact_probabilities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fpl {

namespace {

struct KahanAccumulator {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void check_inputs(const PenalizedScore& score, double eta) {
    if (score.values.empty()) throw std::invalid_argument("choice_probabilities: empty score");
    if (!(eta > 0.0)) throw std::invalid_argument("choice_probabilities: eta must be > 0");
    for (double v : score.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("choice_probabilities: non-finite score");
    }
}

// Gauss-Legendre nodes/weights on [0,1], cached per node count.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const QuadratureRule& gauss_legendre(int m) {
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(m));
    rule.weights.resize(static_cast<std::size_t>(m));
    // Roots of the Legendre polynomial P_m on (-1,1) by Newton iteration,
    // then affinely mapped to [0,1].
    for (int k = 0; k < (m + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(k)] = 0.5 * (1.0 - x);
        rule.weights[static_cast<std::size_t>(k)] = 0.5 * w;
        rule.nodes[static_cast<std::size_t>(m - 1 - k)] = 0.5 * (1.0 + x);
        rule.weights[static_cast<std::size_t>(m - 1 - k)] = 0.5 * w;
    }
    return cache.emplace(m, std::move(rule)).first->second;
}

// P_i estimates for a fixed rule; shares the factor products across experts
// via prefix/suffix products at every node.
std::vector<double> quadrature_pass(std::span<const double> b, const QuadratureRule& rule) {
    const std::size_t n = b.size();
    std::vector<double> integral(n, 0.0);
    std::vector<double> prefix(n + 1), suffix(n + 1);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double v = rule.nodes[g];
        const double w = rule.weights[g];
        prefix[0] = 1.0;
        for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * (1.0 - b[j] * v);
        suffix[n] = 1.0;
        for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * (1.0 - b[j] * v);
        for (std::size_t i = 0; i < n; ++i) integral[i] += w * prefix[i] * suffix[i + 1];
    }
    for (std::size_t i = 0; i < n; ++i) integral[i] *= b[i];
    return integral;
}

std::vector<double> finalize_probabilities(std::vector<double> p, const char* where) {
    double raw = 0.0;
    for (double& x : p) {
        if (x < 0.0 && x > -1e-12) x = 0.0;   // alternating-sum dust
        raw += x;
    }
    if (std::abs(raw - 1.0) > 1e-7) {
        throw std::runtime_error(std::string(where) + ": probabilities sum to " +
                                 std::to_string(raw) + ", off from 1 by more than 1e-7");
    }
    for (double& x : p) x /= raw;
    return p;
}

} // namespace

PenalizedScore PenalizedScore::of(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("PenalizedScore: empty");
    PenalizedScore s;
    s.min_value = *std::min_element(values.begin(), values.end());
    s.values = std::move(values);
    return s;
}

PenalizedScore PenalizedScore::from(std::span<const double> cum_prev,
                                    std::span<const double> complexities, double eta) {
    if (cum_prev.size() != complexities.size()) {
        throw std::invalid_argument("PenalizedScore::from: size mismatch");
    }
    if (!(eta > 0.0)) throw std::invalid_argument("PenalizedScore::from: eta must be > 0");
    std::vector<double> v(cum_prev.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cum_prev[i] + complexities[i] / eta;
    return of(std::move(v));
}

std::vector<double> choice_probabilities_subset_sum(const PenalizedScore& score, double eta) {
    check_inputs(score, eta);
    const int n = score.size();
    if (n > kSubsetSumMaxExperts) {
        throw std::invalid_argument("choice_probabilities_subset_sum: n = " + std::to_string(n) +
                                    " above cap " + std::to_string(kSubsetSumMaxExperts));
    }
    if (n == 1) return {1.0};

    std::vector<double> gap(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) gap[static_cast<std::size_t>(i)] = score.values[static_cast<std::size_t>(i)] - score.min_value;

    const std::uint32_t full = 1u << n;
    // dsum[mask] = sum of gaps over the subset; built from the lowest set bit.
    std::vector<double> dsum(full, 0.0);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const int low = std::countr_zero(mask);
        dsum[mask] = dsum[mask & (mask - 1)] + gap[static_cast<std::size_t>(low)];
    }

    // by_size[m-1][i]: total weight of size-m subsets containing i.
    std::vector<std::vector<double>> by_size(static_cast<std::size_t>(n),
                                             std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const double w = std::exp(-eta * dsum[mask]);
        const int m = std::popcount(mask);
        auto& row = by_size[static_cast<std::size_t>(m - 1)];
        std::uint32_t rest = mask;
        while (rest != 0) {
            const int i = std::countr_zero(rest);
            row[static_cast<std::size_t>(i)] += w;
            rest &= rest - 1;
        }
    }

    // Alternating combination, one Kahan accumulator per expert so the
    // near-cancelling size terms do not erode the small probabilities.
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        KahanAccumulator acc;
        for (int m = 1; m <= n; ++m) {
            const double sign = (m % 2 == 1) ? 1.0 : -1.0;
            acc.add(sign / m * by_size[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(i)]);
        }
        p[static_cast<std::size_t>(i)] = acc.sum;
    }
    return finalize_probabilities(std::move(p), "choice_probabilities_subset_sum");
}

std::vector<double> choice_probabilities_quadrature(const PenalizedScore& score, double eta) {
    check_inputs(score, eta);
    const std::size_t n = score.values.size();
    if (n == 1) return {1.0};

    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::exp(-eta * (score.values[i] - score.min_value));

    // The integrand is a polynomial of degree n-1, so an m-node rule is
    // already exact once 2m-1 >= n-1; start there and double until two
    // passes agree componentwise.
    int m = 16;
    while (2 * m - 1 < static_cast<int>(n) - 1) m *= 2;
    std::vector<double> prev = quadrature_pass(b, gauss_legendre(m));
    constexpr int kMaxNodes = 4096;
    for (m *= 2; m <= kMaxNodes; m *= 2) {
        std::vector<double> cur = quadrature_pass(b, gauss_legendre(m));
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
        prev = std::move(cur);
        if (diff < 1e-10) {
            return finalize_probabilities(std::move(prev), "choice_probabilities_quadrature");
        }
    }
    throw std::runtime_error("choice_probabilities_quadrature: no convergence at " +
                             std::to_string(kMaxNodes) + " nodes");
}

std::vector<double> choice_probabilities(const PenalizedScore& score, double eta) {
    if (score.size() <= kSubsetSumMaxExperts) return choice_probabilities_subset_sum(score, eta);
    return choice_probabilities_quadrature(score, eta);
}

double expected_loss(const PenalizedScore& score, double eta, const LossVector& losses) {
    if (losses.size() != score.size()) throw std::invalid_argument("expected_loss: size mismatch");
    const std::vector<double> p = choice_probabilities(score, eta);
    double ell = 0.0;
    for (int i = 0; i < losses.size(); ++i) ell += p[static_cast<std::size_t>(i)] * losses[i];
    return ell;
}

} // namespace fpl
