#pragma once
// Domain types shared by every module: expert pools with complexity
// penalties, per-round loss vectors, cumulative game state, and decisions
// (a single expert index or a point on the probability simplex).

#include <cstdint>
#include <span>
#include <vector>

namespace fpl {

// Slack allowed on sum_i exp(-k^i) <= 1 when validating a pool.
inline constexpr double kPoolValiditySlack = 1e-12;
// Slack allowed on sum of simplex weights.
inline constexpr double kSimplexSlack = 1e-9;

// A pool of n experts. Expert i carries a complexity penalty k^i >= 0
// (weight exp(-k^i)) and an entering time tau^i >= 1 before which the
// expert is not considered by the decision rules. Immutable once built;
// sum_i exp(-k^i) <= 1 is enforced at construction.
class ExpertPool {
public:
    explicit ExpertPool(std::vector<double> complexities,
                        std::vector<std::int64_t> entering_times = {});

    int size() const { return static_cast<int>(complexities_.size()); }
    double complexity(int i) const { return complexities_[static_cast<std::size_t>(i)]; }
    std::span<const double> complexities() const { return complexities_; }
    std::int64_t entering_time(int i) const { return entering_times_[static_cast<std::size_t>(i)]; }
    std::span<const std::int64_t> entering_times() const { return entering_times_; }

    double weight_sum() const { return weight_sum_; }   // sum_i exp(-k^i)
    double max_complexity() const { return max_complexity_; }
    bool uniform_complexities() const { return uniform_; }
    bool has_entering_times() const { return has_entering_times_; }
    bool active(int i, std::int64_t t) const { return t >= entering_time(i); }

private:
    std::vector<double> complexities_;
    std::vector<std::int64_t> entering_times_;
    double weight_sum_ = 0.0;
    double max_complexity_ = 0.0;
    bool uniform_ = true;
    bool has_entering_times_ = false;
};

// k^i = ln n for all i, so the weights are uniform and sum to exactly 1.
ExpertPool make_uniform_pool(int n);

// Finite cap on a countable class: k^i = 1/2 + 2 ln i for i = 1..cap.
// With finitized = true, entering times are tau^i = ceil(k^i), so experts
// join the game gradually instead of all competing from round 1.
ExpertPool make_countable_pool(int cap, bool finitized = false);

// One round of losses; every component must lie in [0,1].
class LossVector {
public:
    explicit LossVector(std::vector<double> values);

    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const { return values_; }

private:
    std::vector<double> values_;
};

// Sequential per-game accumulator: round counter t, cumulative per-expert
// losses s_{1:t}, their minimum, and the learner's own cumulative losses.
class GameState {
public:
    explicit GameState(int experts);

    int experts() const { return static_cast<int>(cum_loss_.size()); }
    std::int64_t round() const { return round_; }               // t (0 before round 1)
    std::span<const double> cum_loss() const { return cum_loss_; }
    double cum_loss(int i) const { return cum_loss_[static_cast<std::size_t>(i)]; }
    double cum_min() const { return cum_min_; }                 // s_{1:t}^min

    void accumulate(const LossVector& losses);
    void add_learner_losses(double expected, double actual);

    double learner_cum_expected() const { return learner_cum_expected_; }
    double learner_cum_actual() const { return learner_cum_actual_; }

private:
    std::vector<double> cum_loss_;
    std::int64_t round_ = 0;
    double cum_min_ = 0.0;
    double learner_cum_expected_ = 0.0;
    double learner_cum_actual_ = 0.0;
};

struct BestExpert {
    int index;    // 0-based; lowest index wins ties
    double loss;
};

// arg min_i s_{1:t}^i after at least one round.
BestExpert best_expert_in_hindsight(const GameState& state);

// Lowest-index arg min of an arbitrary vector (the decision rule M on the
// set of unit vectors, reported as an index).
int arg_min(std::span<const double> values);

// A decision: either a single expert index or a weight vector on the
// simplex (entries in [0,1] summing to 1 within kSimplexSlack).
class Decision {
public:
    static Decision index(int chosen);
    static Decision weights(std::vector<double> w);

    bool is_index() const { return chosen_ >= 0; }
    int chosen() const { return chosen_; }
    std::span<const double> weight_vector() const { return weights_; }

private:
    Decision() = default;
    int chosen_ = -1;
    std::vector<double> weights_;
};

} // namespace fpl
