#include "fpl/predictors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fpl/exact_probabilities.hpp"

namespace fpl {

namespace {

int penalized_arg_min(const GameState& state, const ExpertPool& pool, double eta,
                      std::span<const double> perturbation, const LossVector* current) {
    if (!(eta > 0.0)) throw std::invalid_argument("fpl_decide: eta must be > 0");
    if (static_cast<int>(perturbation.size()) != pool.size()) {
        throw std::invalid_argument("fpl_decide: perturbation size mismatch");
    }
    const std::int64_t t = state.round() + 1;
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pool.size(); ++i) {
        if (!pool.active(i, t)) continue;
        double score = state.cum_loss(i) +
                       (pool.complexity(i) - perturbation[static_cast<std::size_t>(i)]) / eta;
        if (current != nullptr) score += (*current)[i];
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    if (best < 0) throw std::runtime_error("fpl_decide: no active experts at round " + std::to_string(t));
    return best;
}

} // namespace

const char* predictor_kind_name(PredictorKind kind) {
    switch (kind) {
        case PredictorKind::kFpl: return "fpl";
        case PredictorKind::kIfpl: return "ifpl";
        case PredictorKind::kFl: return "fl";
        case PredictorKind::kHierarchicalFpl: return "hierarchical-fpl";
        case PredictorKind::kDeterministicWeights: return "deterministic-weights";
    }
    throw std::logic_error("predictor_kind_name: unknown kind");
}

PredictorKind predictor_kind_from_name(std::string_view name) {
    for (PredictorKind k : {PredictorKind::kFpl, PredictorKind::kIfpl, PredictorKind::kFl,
                            PredictorKind::kHierarchicalFpl, PredictorKind::kDeterministicWeights}) {
        if (name == predictor_kind_name(k)) return k;
    }
    throw std::invalid_argument("unknown predictor kind: " + std::string(name));
}

int fpl_decide(const GameState& state, const ExpertPool& pool, double eta,
               std::span<const double> perturbation) {
    return penalized_arg_min(state, pool, eta, perturbation, nullptr);
}

int ifpl_decide(const GameState& state, const ExpertPool& pool, double eta,
                std::span<const double> perturbation, const LossVector& current_losses) {
    if (current_losses.size() != pool.size()) {
        throw std::invalid_argument("ifpl_decide: loss dimension mismatch");
    }
    return penalized_arg_min(state, pool, eta, perturbation, &current_losses);
}

int fl_decide(const GameState& state, const ExpertPool& pool) {
    const std::int64_t t = state.round() + 1;
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pool.size(); ++i) {
        if (!pool.active(i, t)) continue;
        const double score = state.cum_loss(i) + pool.complexity(i);
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    if (best < 0) throw std::runtime_error("fl_decide: no active experts");
    return best;
}

Decision weight_vector(const GameState& state, const ExpertPool& pool, double eta) {
    const std::int64_t t = state.round() + 1;
    std::vector<int> active;
    for (int i = 0; i < pool.size(); ++i) {
        if (pool.active(i, t)) active.push_back(i);
    }
    if (active.empty()) throw std::runtime_error("weight_vector: no active experts");

    std::vector<double> scores;
    scores.reserve(active.size());
    for (int i : active) {
        scores.push_back(state.cum_loss(i) + pool.complexity(i) / eta);
    }
    const std::vector<double> p = choice_probabilities(PenalizedScore::of(std::move(scores)), eta);

    std::vector<double> w(static_cast<std::size_t>(pool.size()), 0.0);
    for (std::size_t j = 0; j < active.size(); ++j) {
        w[static_cast<std::size_t>(active[j])] = p[j];
    }
    return Decision::weights(std::move(w));
}

int HierarchicalFpl::class_label(double complexity) {
    const int label = static_cast<int>(std::ceil(complexity));
    return label < 1 ? 1 : label;
}

HierarchicalFpl::HierarchicalFpl(ExpertPool pool, InnerScheduleKind inner, Regime regime,
                                 std::uint64_t seed)
    : pool_(std::move(pool)),
      inner_kind_(inner),
      state_(pool_.size()),
      expert_perturbation_(regime, pool_.size(), rng::derive(seed, rng::kLabelPerturbation)),
      meta_perturbation_(regime, class_label(pool_.max_complexity()) < 1 ? 1 : class_label(pool_.max_complexity()),
                         rng::derive(seed, rng::kLabelMetaPerturbation)) {
    const int top = class_label(pool_.max_complexity());
    std::vector<ClassInfo> slots(static_cast<std::size_t>(top));
    for (int label = 1; label <= top; ++label) {
        slots[static_cast<std::size_t>(label - 1)].label = label;
        slots[static_cast<std::size_t>(label - 1)].meta_complexity =
            0.5 + 2.0 * std::log(static_cast<double>(label));
    }
    for (int i = 0; i < pool_.size(); ++i) {
        slots[static_cast<std::size_t>(class_label(pool_.complexity(i)) - 1)].members.push_back(i);
    }
    for (auto& slot : slots) {
        if (!slot.members.empty()) classes_.push_back(std::move(slot));   // empty classes skipped
    }
}

double HierarchicalFpl::inner_eta(const ClassInfo& info, std::int64_t t) const {
    const double K = static_cast<double>(info.label);
    switch (inner_kind_) {
        case InnerScheduleKind::kDynamic:
            return std::sqrt(K / (2.0 * static_cast<double>(t)));
        case InnerScheduleKind::kSelfConfident:
            return std::sqrt(K / (2.0 * (info.meta_cum + 1.0)));
        case InnerScheduleKind::kAdaptiveSmin: {
            double smin = std::numeric_limits<double>::infinity();
            for (int i : info.members) smin = std::min(smin, state_.cum_loss(i));
            if (smin <= K) return std::sqrt(0.5);
            return std::sqrt(0.5) * std::sqrt(K / smin);
        }
    }
    throw std::logic_error("HierarchicalFpl: unknown inner schedule");
}

double HierarchicalFpl::meta_eta(std::int64_t t) const {
    switch (inner_kind_) {
        case InnerScheduleKind::kDynamic:
            return 1.0 / std::sqrt(static_cast<double>(t));
        case InnerScheduleKind::kSelfConfident:
            return 1.0 / std::sqrt(2.0 * (learner_cum_ + 1.0));
        case InnerScheduleKind::kAdaptiveSmin: {
            double denom = std::numeric_limits<double>::infinity();
            for (const auto& info : classes_) {
                const double k = info.meta_complexity;
                denom = std::min(denom, k + std::sqrt(k * k + 2.0 * info.meta_cum + 2.0));
            }
            return 1.0 / denom;
        }
    }
    throw std::logic_error("HierarchicalFpl: unknown inner schedule");
}

int HierarchicalFpl::decide(std::int64_t t) {
    if (t != state_.round() + 1) {
        throw std::logic_error("HierarchicalFpl::decide: round mismatch");
    }
    const std::span<const double> q = expert_perturbation_.at_round(t);
    const std::span<const double> meta_q = meta_perturbation_.at_round(t);

    // Every class plays virtually each round; its realized loss feeds the
    // meta states no matter which class the meta ends up following.
    int best_class = -1;
    double best_meta_score = std::numeric_limits<double>::infinity();
    const double meta_rate = meta_eta(t);
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        ClassInfo& info = classes_[c];
        const double rate = inner_eta(info, t);
        int pick = -1;
        double pick_score = std::numeric_limits<double>::infinity();
        for (int i : info.members) {
            if (!pool_.active(i, t)) continue;
            const double score = state_.cum_loss(i) +
                                 (pool_.complexity(i) - q[static_cast<std::size_t>(i)]) / rate;
            if (score < pick_score) {
                pick_score = score;
                pick = i;
            }
        }
        info.pending_pick = pick;
        if (pick < 0) continue;   // class entirely inactive this round

        const double meta_score =
            info.meta_cum +
            (info.meta_complexity - meta_q[static_cast<std::size_t>(info.label - 1)]) / meta_rate;
        if (meta_score < best_meta_score) {
            best_meta_score = meta_score;
            best_class = static_cast<int>(c);
        }
    }
    if (best_class < 0) throw std::runtime_error("HierarchicalFpl::decide: all classes empty");

    pending_round_ = t;
    pending_expert_ = classes_[static_cast<std::size_t>(best_class)].pending_pick;
    return pending_expert_;
}

void HierarchicalFpl::observe(const LossVector& losses) {
    if (pending_round_ != state_.round() + 1) {
        throw std::logic_error("HierarchicalFpl::observe: decide must precede observe");
    }
    if (losses.size() != pool_.size()) {
        throw std::invalid_argument("HierarchicalFpl::observe: loss dimension mismatch");
    }
    for (auto& info : classes_) {
        if (info.pending_pick >= 0) info.meta_cum += losses[info.pending_pick];
        info.pending_pick = -1;
    }
    learner_cum_ += losses[pending_expert_];
    state_.accumulate(losses);
    pending_round_ = -1;
    pending_expert_ = -1;
}

} // namespace fpl
