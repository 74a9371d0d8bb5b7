#include "fpl/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fpl {

ExpertPool::ExpertPool(std::vector<double> complexities,
                       std::vector<std::int64_t> entering_times)
    : complexities_(std::move(complexities)), entering_times_(std::move(entering_times)) {
    if (complexities_.empty()) {
        throw std::invalid_argument("ExpertPool: need at least one expert");
    }
    if (entering_times_.empty()) {
        entering_times_.assign(complexities_.size(), 1);
    } else if (entering_times_.size() != complexities_.size()) {
        throw std::invalid_argument("ExpertPool: entering_times size mismatch");
    }

    double sum = 0.0;
    max_complexity_ = complexities_.front();
    for (std::size_t i = 0; i < complexities_.size(); ++i) {
        const double k = complexities_[i];
        if (!(k >= 0.0) || !std::isfinite(k)) {
            throw std::invalid_argument("ExpertPool: complexity " + std::to_string(i) +
                                        " must be finite and >= 0");
        }
        if (entering_times_[i] < 1) {
            throw std::invalid_argument("ExpertPool: entering time " + std::to_string(i) +
                                        " must be >= 1");
        }
        if (entering_times_[i] != 1) has_entering_times_ = true;
        if (k != complexities_.front()) uniform_ = false;
        if (k > max_complexity_) max_complexity_ = k;
        sum += std::exp(-k);
    }
    weight_sum_ = sum;
    if (sum > 1.0 + kPoolValiditySlack) {
        throw std::invalid_argument("ExpertPool: sum of exp(-k^i) = " + std::to_string(sum) +
                                    " exceeds 1; complexities are not valid code lengths");
    }
}

ExpertPool make_uniform_pool(int n) {
    if (n < 1) throw std::invalid_argument("make_uniform_pool: n must be >= 1");
    return ExpertPool(std::vector<double>(static_cast<std::size_t>(n), std::log(static_cast<double>(n))));
}

ExpertPool make_countable_pool(int cap, bool finitized) {
    if (cap < 1) throw std::invalid_argument("make_countable_pool: cap must be >= 1");
    std::vector<double> k(static_cast<std::size_t>(cap));
    std::vector<std::int64_t> tau;
    if (finitized) tau.resize(static_cast<std::size_t>(cap));
    for (int i = 1; i <= cap; ++i) {
        const double ki = 0.5 + 2.0 * std::log(static_cast<double>(i));
        k[static_cast<std::size_t>(i - 1)] = ki;
        if (finitized) {
            tau[static_cast<std::size_t>(i - 1)] = static_cast<std::int64_t>(std::ceil(ki));
        }
    }
    return ExpertPool(std::move(k), std::move(tau));
}

LossVector::LossVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("LossVector: empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::invalid_argument("LossVector: component " + std::to_string(i) + " = " +
                                        std::to_string(v) + " outside [0,1]");
        }
    }
}

GameState::GameState(int experts) {
    if (experts < 1) throw std::invalid_argument("GameState: need at least one expert");
    cum_loss_.assign(static_cast<std::size_t>(experts), 0.0);
}

void GameState::accumulate(const LossVector& losses) {
    if (losses.size() != experts()) {
        throw std::invalid_argument("GameState::accumulate: dimension mismatch");
    }
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cum_loss_.size(); ++i) {
        cum_loss_[i] += losses[static_cast<int>(i)];
        if (cum_loss_[i] < mn) mn = cum_loss_[i];
    }
    cum_min_ = mn;
    ++round_;
}

void GameState::add_learner_losses(double expected, double actual) {
    learner_cum_expected_ += expected;
    learner_cum_actual_ += actual;
}

BestExpert best_expert_in_hindsight(const GameState& state) {
    if (state.round() < 1) {
        throw std::logic_error("best_expert_in_hindsight: empty history");
    }
    const int idx = arg_min(state.cum_loss());
    return BestExpert{idx, state.cum_loss(idx)};
}

int arg_min(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("arg_min: empty vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[static_cast<std::size_t>(i)] < values[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

Decision Decision::index(int chosen) {
    if (chosen < 0) throw std::invalid_argument("Decision::index: negative index");
    Decision d;
    d.chosen_ = chosen;
    return d;
}

Decision Decision::weights(std::vector<double> w) {
    if (w.empty()) throw std::invalid_argument("Decision::weights: empty");
    double sum = 0.0;
    for (double x : w) {
        if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
            throw std::invalid_argument("Decision::weights: entry outside [0,1]");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSimplexSlack) {
        throw std::invalid_argument("Decision::weights: sum " + std::to_string(sum) +
                                    " deviates from 1 by more than 1e-9");
    }
    Decision d;
    d.weights_ = std::move(w);
    return d;
}

} // namespace fpl
