#pragma once
// Learning-rate rules eta_t. Each rule maps observable history (round
// index, the learner's own cumulative loss, or the experts' cumulative
// losses) to a positive rate, and every rule is non-increasing in t as long
// as its observable is nondecreasing — the regret bounds require that.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fpl/types.hpp"

namespace fpl {

enum class ScheduleKind {
    kStaticL,              // eta = 1/sqrt(L)
    kStaticKL,             // eta = sqrt(K/L)
    kStaticRatio,          // eta = sqrt(k^i/L), the ratio supplied directly
    kDynamicT,             // eta_t = 1/sqrt(t)
    kDynamicKT,            // eta_t = sqrt(K/(2t))
    kSelfConfident,        // eta_t = 1/sqrt(2(ell_{<t}+1))
    kSelfConfidentK,       // eta_t = sqrt(K/(2(ell_{<t}+1)))
    kAdaptiveMinPenalized, // eta_t = 1/min_i{k^i + sqrt((k^i)^2 + 2 s^i_{<t} + 2)}
    kAdaptiveSminK,        // eta_t = sqrt(1/2) * min{1, sqrt(K/s_{<t}^min)}
};

// Which running loss feeds the self-confident rules.
enum class EllSource {
    kExact,       // exact expected loss ell_{<t} (needs choice probabilities)
    kMonteCarlo,  // per-round Monte Carlo estimate of ell_t
    kActual,      // realized loss u_{<t}
};

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::kDynamicT;
    double complexity_bound = 0.0;  // K, for the *K* kinds
    double loss_horizon = 0.0;      // L, for the static kinds
    double ratio = 0.0;             // k^i/L, for kStaticRatio
    EllSource ell_source = EllSource::kExact;

    bool needs_complexity_bound() const {
        return kind == ScheduleKind::kStaticKL || kind == ScheduleKind::kDynamicKT ||
               kind == ScheduleKind::kSelfConfidentK || kind == ScheduleKind::kAdaptiveSminK;
    }
    bool self_confident() const {
        return kind == ScheduleKind::kSelfConfident || kind == ScheduleKind::kSelfConfidentK;
    }
};

const char* schedule_kind_name(ScheduleKind kind);
ScheduleKind schedule_kind_from_name(std::string_view name);

// Pure per-kind formulas.
double eta_static(double K, double L);                     // sqrt(K/L); K = 1 gives 1/sqrt(L)
double eta_static_ratio(double ratio);                     // sqrt(ratio)
double eta_dynamic_t(std::int64_t t);                      // 1/sqrt(t)
double eta_dynamic_t(std::int64_t t, double K);            // sqrt(K/(2t))
double eta_self_confident(double ell_prev);                // 1/sqrt(2(ell+1))
double eta_self_confident(double ell_prev, double K);      // sqrt(K/(2(ell+1)))
double eta_adaptive_min_penalized(std::span<const double> cum_prev,
                                  std::span<const double> complexities);
double eta_adaptive_smin(double s_min_prev, double K);

// What a schedule is allowed to observe when asked for eta_t. Everything is
// strictly pre-round-t information.
struct Observables {
    std::int64_t t = 1;                  // current round, >= 1
    double learner_prev = 0.0;           // ell_{<t} or u_{<t}, per EllSource
    std::span<const double> cum_prev{};  // s_{<t}
    double cum_min_prev = 0.0;           // s_{<t}^min
};

// Stateful wrapper: dispatches on kind, rejects decreasing observables, and
// checks the emitted sequence never increases. 1/eta_0 is exactly 0.
class Schedule {
public:
    Schedule(ScheduleSpec spec, const ExpertPool& pool);

    double eta(const Observables& obs);
    const ScheduleSpec& spec() const { return spec_; }
    double last_eta() const { return last_eta_; }

private:
    ScheduleSpec spec_;
    std::vector<double> complexities_;
    std::int64_t last_t_ = 0;
    double last_learner_ = 0.0;
    double last_eta_ = 0.0;
    bool emitted_ = false;
};

} // namespace fpl
