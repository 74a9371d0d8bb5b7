#include "fpl/schedules.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fpl {

namespace {
constexpr double kMonotoneSlack = 1e-12;
}

const char* schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::kStaticL: return "static-L";
        case ScheduleKind::kStaticKL: return "static-KL";
        case ScheduleKind::kStaticRatio: return "static-ratio";
        case ScheduleKind::kDynamicT: return "dynamic-t";
        case ScheduleKind::kDynamicKT: return "dynamic-Kt";
        case ScheduleKind::kSelfConfident: return "self-confident";
        case ScheduleKind::kSelfConfidentK: return "self-confident-K";
        case ScheduleKind::kAdaptiveMinPenalized: return "adaptive-min-penalized";
        case ScheduleKind::kAdaptiveSminK: return "adaptive-smin-K";
    }
    throw std::logic_error("schedule_kind_name: unknown kind");
}

ScheduleKind schedule_kind_from_name(std::string_view name) {
    for (ScheduleKind k : {ScheduleKind::kStaticL, ScheduleKind::kStaticKL,
                           ScheduleKind::kStaticRatio, ScheduleKind::kDynamicT,
                           ScheduleKind::kDynamicKT, ScheduleKind::kSelfConfident,
                           ScheduleKind::kSelfConfidentK, ScheduleKind::kAdaptiveMinPenalized,
                           ScheduleKind::kAdaptiveSminK}) {
        if (name == schedule_kind_name(k)) return k;
    }
    throw std::invalid_argument("unknown schedule kind: " + std::string(name));
}

double eta_static(double K, double L) {
    if (!(L >= 1.0)) throw std::invalid_argument("eta_static: L must be >= 1");
    if (!(K > 0.0)) throw std::invalid_argument("eta_static: K must be > 0");
    return std::sqrt(K / L);
}

double eta_static_ratio(double ratio) {
    if (!(ratio > 0.0)) throw std::invalid_argument("eta_static_ratio: ratio must be > 0");
    return std::sqrt(ratio);
}

double eta_dynamic_t(std::int64_t t) {
    if (t < 1) throw std::invalid_argument("eta_dynamic_t: t must be >= 1");
    return 1.0 / std::sqrt(static_cast<double>(t));
}

double eta_dynamic_t(std::int64_t t, double K) {
    if (t < 1) throw std::invalid_argument("eta_dynamic_t: t must be >= 1");
    if (!(K > 0.0)) throw std::invalid_argument("eta_dynamic_t: K must be > 0");
    return std::sqrt(K / (2.0 * static_cast<double>(t)));
}

double eta_self_confident(double ell_prev) {
    if (!(ell_prev >= 0.0)) throw std::invalid_argument("eta_self_confident: negative observable");
    return 1.0 / std::sqrt(2.0 * (ell_prev + 1.0));
}

double eta_self_confident(double ell_prev, double K) {
    if (!(ell_prev >= 0.0)) throw std::invalid_argument("eta_self_confident: negative observable");
    if (!(K > 0.0)) throw std::invalid_argument("eta_self_confident: K must be > 0");
    return std::sqrt(K / (2.0 * (ell_prev + 1.0)));
}

double eta_adaptive_min_penalized(std::span<const double> cum_prev,
                                  std::span<const double> complexities) {
    if (cum_prev.empty() || cum_prev.size() != complexities.size()) {
        throw std::invalid_argument("eta_adaptive_min_penalized: empty pool or size mismatch");
    }
    double denom = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cum_prev.size(); ++i) {
        const double k = complexities[i];
        const double s = cum_prev[i];
        if (!(s >= 0.0)) throw std::invalid_argument("eta_adaptive_min_penalized: negative loss");
        const double v = k + std::sqrt(k * k + 2.0 * s + 2.0);
        if (v < denom) denom = v;
    }
    return 1.0 / denom;
}

double eta_adaptive_smin(double s_min_prev, double K) {
    if (!(K > 0.0)) throw std::invalid_argument("eta_adaptive_smin: K must be > 0");
    if (!(s_min_prev >= 0.0)) throw std::invalid_argument("eta_adaptive_smin: negative observable");
    const double root_half = std::sqrt(0.5);
    if (s_min_prev <= K) return root_half;   // min{1, sqrt(K/s)} clamps at 1
    return root_half * std::sqrt(K / s_min_prev);
}

Schedule::Schedule(ScheduleSpec spec, const ExpertPool& pool)
    : spec_(spec), complexities_(pool.complexities().begin(), pool.complexities().end()) {
    if (spec_.needs_complexity_bound() && !(spec_.complexity_bound > 0.0)) {
        throw std::invalid_argument(std::string("Schedule: kind ") +
                                    schedule_kind_name(spec_.kind) + " requires K > 0");
    }
    switch (spec_.kind) {
        case ScheduleKind::kStaticL:
        case ScheduleKind::kStaticKL:
            if (!(spec_.loss_horizon >= 1.0)) {
                throw std::invalid_argument("Schedule: static kinds require L >= 1");
            }
            break;
        case ScheduleKind::kStaticRatio:
            if (!(spec_.ratio > 0.0)) {
                throw std::invalid_argument("Schedule: static-ratio requires ratio > 0");
            }
            break;
        default:
            break;
    }
}

double Schedule::eta(const Observables& obs) {
    if (obs.t < 1) throw std::invalid_argument("Schedule::eta: t must be >= 1");
    if (obs.t <= last_t_) throw std::invalid_argument("Schedule::eta: rounds must advance");
    if (spec_.self_confident()) {
        if (obs.learner_prev < 0.0 || obs.learner_prev + 1e-12 < last_learner_) {
            throw std::invalid_argument("Schedule::eta: learner loss observable decreased");
        }
        last_learner_ = obs.learner_prev;
    }

    double eta = 0.0;
    switch (spec_.kind) {
        case ScheduleKind::kStaticL:
            eta = eta_static(1.0, spec_.loss_horizon);
            break;
        case ScheduleKind::kStaticKL:
            eta = eta_static(spec_.complexity_bound, spec_.loss_horizon);
            break;
        case ScheduleKind::kStaticRatio:
            eta = eta_static_ratio(spec_.ratio);
            break;
        case ScheduleKind::kDynamicT:
            eta = eta_dynamic_t(obs.t);
            break;
        case ScheduleKind::kDynamicKT:
            eta = eta_dynamic_t(obs.t, spec_.complexity_bound);
            break;
        case ScheduleKind::kSelfConfident:
            eta = eta_self_confident(obs.learner_prev);
            break;
        case ScheduleKind::kSelfConfidentK:
            eta = eta_self_confident(obs.learner_prev, spec_.complexity_bound);
            break;
        case ScheduleKind::kAdaptiveMinPenalized:
            eta = eta_adaptive_min_penalized(obs.cum_prev, complexities_);
            break;
        case ScheduleKind::kAdaptiveSminK:
            eta = eta_adaptive_smin(obs.cum_min_prev, spec_.complexity_bound);
            break;
    }

    if (emitted_ && eta > last_eta_ + kMonotoneSlack) {
        throw std::logic_error("Schedule::eta: rate increased from " + std::to_string(last_eta_) +
                               " to " + std::to_string(eta));
    }
    last_t_ = obs.t;
    last_eta_ = eta;
    emitted_ = true;
    return eta;
}

} // namespace fpl
