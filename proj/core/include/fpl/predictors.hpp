#pragma once
// Decision makers. fpl_decide sees only the past losses s_{<t} plus the
// perturbed complexity penalty; ifpl_decide additionally sees the current
// round's losses and exists purely as an analysis/diagnostic device;
// fl_decide is the unperturbed baseline that adversarial sequences defeat.
// HierarchicalFpl runs one inner FPL per complexity class plus a meta FPL
// across the classes.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fpl/perturbation.hpp"
#include "fpl/types.hpp"

namespace fpl {

enum class PredictorKind {
    kFpl,
    kIfpl,
    kFl,
    kHierarchicalFpl,
    kDeterministicWeights,
};

const char* predictor_kind_name(PredictorKind kind);
PredictorKind predictor_kind_from_name(std::string_view name);

// arg min over active experts of s_{<t}^i + (k^i - q^i)/eta; lowest index
// wins ties. Experts with entering time tau^i > t are excluded.
int fpl_decide(const GameState& state, const ExpertPool& pool, double eta,
               std::span<const double> perturbation);

// Same objective on s_{1:t} (current losses included). Diagnostic only.
int ifpl_decide(const GameState& state, const ExpertPool& pool, double eta,
                std::span<const double> perturbation, const LossVector& current_losses);

// arg min of s_{<t}^i + k^i; no perturbation (eta conceptually infinite).
int fl_decide(const GameState& state, const ExpertPool& pool);

// Simplex decision w_t with w_t^i = P[I_t = i], computed exactly. Playing
// w_t deterministically realizes the expected loss w_t . s_t.
Decision weight_vector(const GameState& state, const ExpertPool& pool, double eta);

// Inner learning-rate rule of the hierarchy; the meta level pairs with it
// (dynamic inner -> 1/sqrt(t) meta, loss-driven inner -> loss-driven meta).
enum class InnerScheduleKind {
    kDynamic,        // eta_t^K = sqrt(K/(2t)),  meta 1/sqrt(t)
    kSelfConfident,  // eta_t^K = sqrt(K/(2(u^K_{<t}+1))), meta 1/sqrt(2(u~+1))
    kAdaptiveSmin,   // eta_t^K = sqrt(1/2) min{1, sqrt(K/s^min)}, meta min-penalized
};

// Two-level FPL. Experts are grouped into classes E^K = {i : ceil(k^i) = K}
// (complexity zero joins class 1); class K runs its own inner FPL every
// round as a virtual play, and a meta FPL with class complexities
// 1/2 + 2 ln K picks which class's expert is actually followed. Meta states
// accumulate the realized inner losses.
class HierarchicalFpl {
public:
    HierarchicalFpl(ExpertPool pool, InnerScheduleKind inner, Regime regime, std::uint64_t seed);

    int decide(std::int64_t t);                 // expert actually followed at round t
    void observe(const LossVector& losses);     // reveal round losses; updates all levels
    double meta_eta(std::int64_t t) const;      // the meta level's rate at round t

    const GameState& state() const { return state_; }
    const ExpertPool& pool() const { return pool_; }

    static int class_label(double complexity);
    int class_count() const { return static_cast<int>(classes_.size()); }
    int class_label_at(int c) const { return classes_[static_cast<std::size_t>(c)].label; }
    std::span<const int> class_members(int c) const { return classes_[static_cast<std::size_t>(c)].members; }
    double meta_complexity(int c) const { return classes_[static_cast<std::size_t>(c)].meta_complexity; }
    double meta_cum_loss(int c) const { return classes_[static_cast<std::size_t>(c)].meta_cum; }
    double learner_cum_actual() const { return learner_cum_; }

private:
    struct ClassInfo {
        int label = 0;
        double meta_complexity = 0.0;
        std::vector<int> members;
        double meta_cum = 0.0;     // realized u^K_{1:t}
        int pending_pick = -1;
    };

    double inner_eta(const ClassInfo& info, std::int64_t t) const;

    ExpertPool pool_;
    InnerScheduleKind inner_kind_;
    GameState state_;
    Perturbation expert_perturbation_;
    Perturbation meta_perturbation_;
    std::vector<ClassInfo> classes_;
    double learner_cum_ = 0.0;
    std::int64_t pending_round_ = -1;
    int pending_expert_ = -1;
};

} // namespace fpl
