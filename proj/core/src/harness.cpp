#include "fpl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "fpl/exact_probabilities.hpp"
#include "fpl/rng.hpp"

namespace fpl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kExactSlack = 1e-9;

// Choice probabilities of the decision rule at the current round, scattered
// over the full pool (inactive experts get probability zero). With
// `current` set, scores include the current round's losses (the infeasible
// rule).
std::vector<double> round_weights(const GameState& state, const ExpertPool& pool, double eta,
                                  const LossVector* current) {
    const std::int64_t t = state.round() + 1;
    std::vector<int> active;
    active.reserve(static_cast<std::size_t>(pool.size()));
    for (int i = 0; i < pool.size(); ++i) {
        if (pool.active(i, t)) active.push_back(i);
    }
    if (active.empty()) throw std::runtime_error("round_weights: no active experts");

    std::vector<double> scores;
    scores.reserve(active.size());
    for (int i : active) {
        double s = state.cum_loss(i) + pool.complexity(i) / eta;
        if (current != nullptr) s += (*current)[i];
        scores.push_back(s);
    }
    const std::vector<double> p = choice_probabilities(PenalizedScore::of(std::move(scores)), eta);
    std::vector<double> w(static_cast<std::size_t>(pool.size()), 0.0);
    for (std::size_t j = 0; j < active.size(); ++j) w[static_cast<std::size_t>(active[j])] = p[j];
    return w;
}

double dot_losses(std::span<const double> w, const LossVector& losses) {
    double sum = 0.0;
    for (int i = 0; i < losses.size(); ++i) sum += w[static_cast<std::size_t>(i)] * losses[i];
    return sum;
}

// Sampling estimate of ell_t, used only to feed a self-confident schedule
// when EllSource::kMonteCarlo is selected.
double sampled_expected_loss(const GameState& state, const ExpertPool& pool, double eta,
                             const LossVector& losses, std::uint64_t seed, std::int64_t t,
                             int samples) {
    rng::Stream stream(rng::derive(seed, rng::kLabelProbeSample, static_cast<std::uint64_t>(t)));
    std::vector<double> q(static_cast<std::size_t>(pool.size()));
    double sum = 0.0;
    for (int s = 0; s < samples; ++s) {
        for (auto& x : q) x = stream.exponential();
        sum += losses[fpl_decide(state, pool, eta, q)];
    }
    return sum / samples;
}

void validate_run_spec(const RunSpec& spec, const Environment& env) {
    if (spec.horizon < 1) throw ConfigError("run_game: horizon must be >= 1");
    if (env.dimension() != spec.pool.size()) {
        throw ConfigError("run_game: environment dimension does not match pool size");
    }
    if (spec.predictor == PredictorKind::kHierarchicalFpl && spec.mode == RunMode::kExactExpected) {
        throw ConfigError("run_game: exact-expected mode is not available for hierarchical-fpl");
    }
    if (spec.ifpl_diagnostic && spec.mode != RunMode::kExactExpected) {
        throw ConfigError("run_game: the infeasible-rule diagnostic needs exact-expected mode");
    }
    if (spec.schedule.self_confident() && spec.schedule.ell_source == EllSource::kExact &&
        spec.mode != RunMode::kExactExpected &&
        spec.predictor != PredictorKind::kDeterministicWeights &&
        spec.predictor != PredictorKind::kFl) {
        throw ConfigError(
            "run_game: self-confident schedule with exact loss source needs exact-expected mode");
    }
    if (spec.schedule.self_confident() && spec.schedule.ell_source == EllSource::kMonteCarlo &&
        spec.mc_probability_samples < 1) {
        throw ConfigError("run_game: mc_probability_samples must be >= 1");
    }
    if (env.adaptive() && spec.predictor == PredictorKind::kDeterministicWeights) {
        throw ConfigError("run_game: adaptive environments need single-expert decisions");
    }
}

GameTrace run_hierarchical(const RunSpec& spec, Environment& env, bool keep_rounds) {
    HierarchicalFpl hier(spec.pool, spec.hierarchy_inner, spec.regime,
                         rng::derive(spec.seed, rng::kLabelPerturbation));
    GameTrace trace;
    trace.horizon = spec.horizon;
    trace.expected_total = kNaN;
    trace.ifpl_total = kNaN;
    if (keep_rounds) trace.rounds.reserve(static_cast<std::size_t>(spec.horizon));

    std::vector<int> history;
    history.reserve(static_cast<std::size_t>(spec.horizon));
    double eta = 0.0;
    for (std::int64_t t = 1; t <= spec.horizon; ++t) {
        const LossVector losses = env.next_losses(t, history);
        eta = hier.meta_eta(t);
        const int choice = hier.decide(t);
        const double u = losses[choice];
        hier.observe(losses);
        history.push_back(choice);
        trace.actual_total += u;
        if (keep_rounds) trace.rounds.push_back({eta, choice, u, kNaN, kNaN, hier.state().cum_min()});
    }

    trace.final_cum.assign(hier.state().cum_loss().begin(), hier.state().cum_loss().end());
    trace.final_cum_min = hier.state().cum_min();
    trace.beh_index = best_expert_in_hindsight(hier.state()).index;
    trace.eta_final = eta;
    return trace;
}

} // namespace

int EnvironmentSpec::experts() const {
    switch (kind) {
        case EnvironmentKind::kFixed:
            return fixed_rows.empty() ? 0 : fixed_rows.front().size();
        case EnvironmentKind::kFlKiller:
            return 2;
        case EnvironmentKind::kBernoulli:
            return static_cast<int>(bernoulli_p.size());
        case EnvironmentKind::kLastChoicePunisher:
        case EnvironmentKind::kCustomAdaptive:
            return dimension;
    }
    return 0;
}

std::unique_ptr<Environment> EnvironmentSpec::instantiate(std::uint64_t replica) const {
    switch (kind) {
        case EnvironmentKind::kFixed: {
            if (!fixed_rows.empty()) return make_fixed(fixed_rows);
            if (!csv_path.empty()) return load_fixed_csv(csv_path);
            throw ConfigError("fixed environment: no rows and no csv path");
        }
        case EnvironmentKind::kFlKiller:
            return make_fl_killer();
        case EnvironmentKind::kBernoulli: {
            std::uint64_t s = rng::derive(seed, rng::kLabelEnvironment);
            if (!share_seed_across_replicas) s = rng::derive(s, replica);
            return make_bernoulli(bernoulli_p, s);
        }
        case EnvironmentKind::kLastChoicePunisher:
            return make_last_choice_punisher(dimension);
        case EnvironmentKind::kCustomAdaptive:
            if (!custom) throw ConfigError("custom-adaptive environment: missing transition");
            return make_custom_adaptive(dimension, custom);
    }
    throw ConfigError("EnvironmentSpec: unknown kind");
}

GameTrace run_game(const RunSpec& spec, Environment& env, bool keep_rounds) {
    validate_run_spec(spec, env);
    if (spec.predictor == PredictorKind::kHierarchicalFpl) {
        return run_hierarchical(spec, env, keep_rounds);
    }

    const ExpertPool& pool = spec.pool;
    const int n = pool.size();
    GameState state(n);
    Schedule schedule(spec.schedule, pool);
    Perturbation perturbation(spec.regime, n, rng::derive(spec.seed, rng::kLabelPerturbation));

    const bool exact_mode = spec.mode == RunMode::kExactExpected;
    const bool weights_play = spec.predictor == PredictorKind::kDeterministicWeights;
    const bool track_expected = exact_mode || weights_play;

    GameTrace trace;
    trace.horizon = spec.horizon;
    trace.expected_total = track_expected ? 0.0 : kNaN;
    trace.ifpl_total = spec.ifpl_diagnostic ? 0.0 : kNaN;
    trace.diagnostic_predictor = spec.predictor == PredictorKind::kIfpl;
    if (keep_rounds) trace.rounds.reserve(static_cast<std::size_t>(spec.horizon));

    std::vector<int> history;
    history.reserve(static_cast<std::size_t>(spec.horizon));
    double mc_ell_cum = 0.0;
    double eta = std::numeric_limits<double>::infinity();

    for (std::int64_t t = 1; t <= spec.horizon; ++t) {
        const LossVector losses = env.next_losses(t, history);

        if (spec.predictor != PredictorKind::kFl) {
            double learner_prev = 0.0;
            switch (spec.schedule.ell_source) {
                case EllSource::kExact: learner_prev = state.learner_cum_expected(); break;
                case EllSource::kActual: learner_prev = state.learner_cum_actual(); break;
                case EllSource::kMonteCarlo: learner_prev = mc_ell_cum; break;
            }
            eta = schedule.eta({t, learner_prev, state.cum_loss(), state.cum_min()});
        }

        int choice = -1;
        double u = 0.0;
        double ell = kNaN;
        double r = kNaN;

        switch (spec.predictor) {
            case PredictorKind::kFpl:
                choice = fpl_decide(state, pool, eta, perturbation.at_round(t));
                u = losses[choice];
                if (exact_mode) ell = dot_losses(round_weights(state, pool, eta, nullptr), losses);
                break;
            case PredictorKind::kIfpl:
                choice = ifpl_decide(state, pool, eta, perturbation.at_round(t), losses);
                u = losses[choice];
                if (exact_mode) ell = dot_losses(round_weights(state, pool, eta, &losses), losses);
                break;
            case PredictorKind::kFl:
                choice = fl_decide(state, pool);
                u = losses[choice];
                if (exact_mode) ell = u;
                break;
            case PredictorKind::kDeterministicWeights: {
                const Decision d = weight_vector(state, pool, eta);
                u = dot_losses(d.weight_vector(), losses);
                ell = u;
                break;
            }
            case PredictorKind::kHierarchicalFpl:
                break;   // handled above
        }

        if (spec.ifpl_diagnostic) {
            r = dot_losses(round_weights(state, pool, eta, &losses), losses);
            trace.ifpl_total += r;
        }
        if (spec.schedule.self_confident() && spec.schedule.ell_source == EllSource::kMonteCarlo) {
            mc_ell_cum += sampled_expected_loss(state, pool, eta, losses, spec.seed, t,
                                                spec.mc_probability_samples);
        }

        state.add_learner_losses(track_expected ? ell : 0.0, u);
        state.accumulate(losses);
        history.push_back(choice);
        trace.actual_total += u;
        if (track_expected) trace.expected_total += ell;
        if (keep_rounds) trace.rounds.push_back({eta, choice, u, ell, r, state.cum_min()});
    }

    trace.final_cum.assign(state.cum_loss().begin(), state.cum_loss().end());
    trace.final_cum_min = state.cum_min();
    trace.beh_index = best_expert_in_hindsight(state).index;
    trace.eta_final = eta;
    return trace;
}

namespace {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr mean_stderr(std::span<const double> xs) {
    MeanStderr out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0)) /
                  std::sqrt(static_cast<double>(xs.size()));
    return out;
}

template <typename Fn>
void parallel_replicas(int replicas, int threads, Fn&& body) {
    unsigned tc = threads > 0 ? static_cast<unsigned>(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
    tc = std::min<unsigned>(tc, static_cast<unsigned>(replicas));
    if (tc <= 1) {
        for (int r = 0; r < replicas; ++r) body(r);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(tc);
    for (unsigned w = 0; w < tc; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= replicas) return;
                try {
                    body(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

McResult monte_carlo_regret(const RunSpec& spec, const EnvironmentSpec& env_spec, int replicas,
                            int threads) {
    if (replicas < 2) throw std::invalid_argument("monte_carlo_regret: need at least 2 replicas");
    McResult result;
    result.replicas.resize(static_cast<std::size_t>(replicas));
    parallel_replicas(replicas, threads, [&](int r) {
        RunSpec replica_spec = spec;
        replica_spec.seed = rng::derive(spec.seed, rng::kLabelReplica, static_cast<std::uint64_t>(r));
        auto env = env_spec.instantiate(static_cast<std::uint64_t>(r));
        result.replicas[static_cast<std::size_t>(r)] = run_game(replica_spec, *env, false);
    });

    std::vector<double> regrets, actuals;
    regrets.reserve(result.replicas.size());
    actuals.reserve(result.replicas.size());
    for (const auto& t : result.replicas) {
        regrets.push_back(t.regret());
        actuals.push_back(t.actual_total);
    }
    const MeanStderr reg = mean_stderr(regrets);
    const MeanStderr act = mean_stderr(actuals);
    result.mean_regret = reg.mean;
    result.regret_stderr = reg.stderr_;
    result.mean_actual = act.mean;
    result.actual_stderr = act.stderr_;
    return result;
}

const char* bound_id_name(BoundId id) {
    switch (id) {
        case BoundId::kIfplVsBeh: return "ifpl-beh";
        case BoundId::kFplVsIfplFactor: return "fpl-ifpl-factor";
        case BoundId::kStaticL: return "static-l";
        case BoundId::kStaticKL: return "static-kl";
        case BoundId::kStaticRatio: return "static-ratio";
        case BoundId::kDynamicT: return "dynamic-t";
        case BoundId::kDynamicKT: return "dynamic-kt";
        case BoundId::kSelfConfident: return "self-confident";
        case BoundId::kSelfConfidentK: return "self-confident-k";
        case BoundId::kAdaptivePenalized: return "adaptive-penalized";
        case BoundId::kAdaptiveSminK: return "adaptive-smin-k";
        case BoundId::kHierarchyChain: return "hierarchy-chain";
        case BoundId::kLowerBeh: return "lower-beh";
    }
    throw std::logic_error("bound_id_name: unknown id");
}

BoundId bound_id_from_name(std::string_view name) {
    for (BoundId id : {BoundId::kIfplVsBeh, BoundId::kFplVsIfplFactor, BoundId::kStaticL,
                       BoundId::kStaticKL, BoundId::kStaticRatio, BoundId::kDynamicT,
                       BoundId::kDynamicKT, BoundId::kSelfConfident, BoundId::kSelfConfidentK,
                       BoundId::kAdaptivePenalized, BoundId::kAdaptiveSminK,
                       BoundId::kHierarchyChain, BoundId::kLowerBeh}) {
        if (name == bound_id_name(id)) return id;
    }
    throw std::invalid_argument("unknown bound id: " + std::string(name));
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("bound hypothesis not satisfied: " + what);
}

void require_schedule(const RunSpec& spec, ScheduleKind kind, BoundId id) {
    require(spec.schedule.kind == kind, std::string(bound_id_name(id)) + " needs schedule " +
                                            schedule_kind_name(kind) + ", configured " +
                                            schedule_kind_name(spec.schedule.kind));
}

void require_complexity_bound(const RunSpec& spec) {
    require(spec.schedule.complexity_bound >= spec.pool.max_complexity() - 1e-12,
            "K must dominate every expert complexity");
}

// Per-expert right-hand side of an upper bound, given the replica's final
// cumulative losses.
using RhsFn = std::function<double(int i, const GameTrace&)>;

BoundReport evaluate_upper(BoundId id, const McResult& mc, const RunSpec& spec, const RhsFn& rhs,
                           const std::vector<int>& candidates) {
    require(!mc.replicas.empty(), "no replicas");
    require(!candidates.empty(), "no expert satisfies the bound's side conditions");

    const bool exact = std::isfinite(mc.replicas.front().expected_total);
    BoundReport report;
    report.theorem = bound_id_name(id);

    if (exact) {
        // Exact expectations: the bound must hold replica by replica.
        double worst_slack = std::numeric_limits<double>::infinity();
        double worst_lhs = 0.0, worst_rhs = 0.0;
        for (const auto& trace : mc.replicas) {
            const double lhs = trace.expected_total;
            double best_rhs = std::numeric_limits<double>::infinity();
            for (int i : candidates) best_rhs = std::min(best_rhs, rhs(i, trace));
            if (best_rhs - lhs < worst_slack) {
                worst_slack = best_rhs - lhs;
                worst_lhs = lhs;
                worst_rhs = best_rhs;
            }
        }
        report.lhs = worst_lhs;
        report.rhs = worst_rhs;
        report.slack = worst_slack;
        report.lhs_stderr = 0.0;
        report.pass = worst_slack >= -kExactSlack;
        report.detail = "exact per replica over " + std::to_string(mc.replicas.size());
        return report;
    }

    // Sampled losses: for every candidate expert the mean margin must clear
    // -3 standard errors; report the binding expert.
    double binding_score = std::numeric_limits<double>::infinity();
    std::vector<double> margins(mc.replicas.size());
    for (int i : candidates) {
        for (std::size_t r = 0; r < mc.replicas.size(); ++r) {
            margins[r] = rhs(i, mc.replicas[r]) - mc.replicas[r].actual_total;
        }
        const MeanStderr m = mean_stderr(margins);
        const double score = m.mean + 3.0 * m.stderr_;
        if (score < binding_score) {
            binding_score = score;
            report.slack = m.mean;
            report.lhs_stderr = m.stderr_;
            report.detail = "binding expert " + std::to_string(i + 1) + " of " +
                            std::to_string(spec.pool.size());
        }
    }
    std::vector<double> lhs_vals(mc.replicas.size());
    for (std::size_t r = 0; r < mc.replicas.size(); ++r) lhs_vals[r] = mc.replicas[r].actual_total;
    report.lhs = mean_stderr(lhs_vals).mean;
    report.rhs = report.lhs + report.slack;
    report.pass = binding_score >= 0.0;
    return report;
}

std::vector<int> all_experts(const ExpertPool& pool) {
    std::vector<int> idx(static_cast<std::size_t>(pool.size()));
    for (int i = 0; i < pool.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    return idx;
}

} // namespace

namespace {
BoundReport evaluate_bound_impl(BoundId id, const McResult& mc, const RunSpec& spec);
}

BoundReport evaluate_bound(BoundId id, const McResult& mc, const RunSpec& spec) {
    BoundReport report = evaluate_bound_impl(id, mc, spec);
    // Anything measured on the infeasible rule stays flagged as diagnostic.
    if (spec.predictor == PredictorKind::kIfpl) report.diagnostic = true;
    return report;
}

namespace {

BoundReport evaluate_bound_impl(BoundId id, const McResult& mc, const RunSpec& spec) {
    require(!mc.replicas.empty(), "no replicas");
    require(!spec.pool.has_entering_times(),
            "bound evaluators assume every expert active from round 1");
    const ExpertPool& pool = spec.pool;
    const double T = static_cast<double>(spec.horizon);
    const double K = spec.schedule.complexity_bound;

    switch (id) {
        case BoundId::kStaticL: {
            require_schedule(spec, ScheduleKind::kStaticL, id);
            const double L = spec.schedule.loss_horizon;
            for (const auto& t : mc.replicas) {
                require(!(std::isfinite(t.expected_total) && t.expected_total > L),
                        "L must upper-bound the realized expected loss");
            }
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      return t.final_cum[static_cast<std::size_t>(i)] +
                                             std::sqrt(L) * (pool.complexity(i) + 1.0);
                                  },
                                  all_experts(pool));
        }
        case BoundId::kStaticKL: {
            require_schedule(spec, ScheduleKind::kStaticKL, id);
            require_complexity_bound(spec);
            const double L = spec.schedule.loss_horizon;
            for (const auto& t : mc.replicas) {
                require(!(std::isfinite(t.expected_total) && t.expected_total > L),
                        "L must upper-bound the realized expected loss");
            }
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      return t.final_cum[static_cast<std::size_t>(i)] +
                                             2.0 * std::sqrt(L * K);
                                  },
                                  all_experts(pool));
        }
        case BoundId::kStaticRatio: {
            require_schedule(spec, ScheduleKind::kStaticRatio, id);
            const double eta = eta_static_ratio(spec.schedule.ratio);
            // Valid targets: experts whose implied horizon L_i = k^i/eta^2
            // dominates both their realized loss and their complexity.
            std::vector<int> candidates;
            for (int i = 0; i < pool.size(); ++i) {
                const double k = pool.complexity(i);
                if (k <= 0.0) continue;
                const double implied_L = k / (eta * eta);
                bool ok = implied_L >= k && implied_L >= 1.0;
                for (const auto& t : mc.replicas) {
                    ok = ok && implied_L >= t.final_cum[static_cast<std::size_t>(i)];
                }
                if (ok) candidates.push_back(i);
            }
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      const double k = pool.complexity(i);
                                      return t.final_cum[static_cast<std::size_t>(i)] +
                                             2.0 * k / eta + 3.0 * k;
                                  },
                                  candidates);
        }
        case BoundId::kDynamicT:
            require_schedule(spec, ScheduleKind::kDynamicT, id);
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      return t.final_cum[static_cast<std::size_t>(i)] +
                                             std::sqrt(T) * (pool.complexity(i) + 2.0);
                                  },
                                  all_experts(pool));
        case BoundId::kDynamicKT:
            require_schedule(spec, ScheduleKind::kDynamicKT, id);
            require_complexity_bound(spec);
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      return t.final_cum[static_cast<std::size_t>(i)] +
                                             2.0 * std::sqrt(2.0 * T * K);
                                  },
                                  all_experts(pool));
        case BoundId::kSelfConfident:
            require_schedule(spec, ScheduleKind::kSelfConfident, id);
            require(spec.schedule.ell_source == EllSource::kExact &&
                        spec.mode == RunMode::kExactExpected,
                    "self-confident bound is proven for the exact expected-loss feed");
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      const double k = pool.complexity(i);
                                      const double s = t.final_cum[static_cast<std::size_t>(i)];
                                      return s + (k + 1.0) * std::sqrt(2.0 * (s + 1.0)) +
                                             2.0 * (k + 1.0) * (k + 1.0);
                                  },
                                  all_experts(pool));
        case BoundId::kSelfConfidentK:
            require_schedule(spec, ScheduleKind::kSelfConfidentK, id);
            require_complexity_bound(spec);
            require(spec.schedule.ell_source == EllSource::kExact &&
                        spec.mode == RunMode::kExactExpected,
                    "self-confident bound is proven for the exact expected-loss feed");
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      const double s = t.final_cum[static_cast<std::size_t>(i)];
                                      return s + 2.0 * std::sqrt(2.0 * (s + 1.0) * K) + 8.0 * K;
                                  },
                                  all_experts(pool));
        case BoundId::kAdaptivePenalized:
            require_schedule(spec, ScheduleKind::kAdaptiveMinPenalized, id);
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      const double k = pool.complexity(i);
                                      const double s = t.final_cum[static_cast<std::size_t>(i)];
                                      return s + (k + 2.0) * std::sqrt(2.0 * s) +
                                             2.0 * (k + 2.0) * (k + 2.0);
                                  },
                                  all_experts(pool));
        case BoundId::kAdaptiveSminK:
            require_schedule(spec, ScheduleKind::kAdaptiveSminK, id);
            require_complexity_bound(spec);
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      const double s = t.final_cum[static_cast<std::size_t>(i)];
                                      // log term only meaningful once s >= 1
                                      const double log_term = 5.0 * K * std::log(std::max(s, 1.0));
                                      return s + 2.0 * std::sqrt(2.0 * K * s) + log_term +
                                             3.0 * K + 6.0;
                                  },
                                  all_experts(pool));
        case BoundId::kHierarchyChain:
            require(spec.predictor == PredictorKind::kHierarchicalFpl,
                    "hierarchy-chain bound applies to the hierarchical predictor");
            require(spec.hierarchy_inner == InnerScheduleKind::kDynamic,
                    "hierarchy-chain bound is stated for the dynamic inner rate");
            return evaluate_upper(id, mc, spec,
                                  [&](int i, const GameTrace& t) {
                                      const double k = pool.complexity(i);
                                      const double bracket = 2.0 * std::sqrt(2.0 * (k + 1.0)) +
                                                             0.5 + 2.0 * std::log(k + 1.0) + 2.0;
                                      return t.final_cum[static_cast<std::size_t>(i)] +
                                             std::sqrt(T) * bracket;
                                  },
                                  all_experts(pool));
        case BoundId::kLowerBeh: {
            require(pool.uniform_complexities(), "lower bound needs uniform complexities");
            BoundReport report;
            report.theorem = bound_id_name(id);
            report.lower_bound = true;
            const double log_n = std::log(static_cast<double>(pool.size()));
            const bool exact = std::isfinite(mc.replicas.front().expected_total);
            if (exact) {
                double worst = std::numeric_limits<double>::infinity();
                for (const auto& t : mc.replicas) {
                    const double bound = t.final_cum_min - log_n / t.eta_final;
                    const double slack = t.expected_total - bound;
                    if (slack < worst) {
                        worst = slack;
                        report.lhs = t.expected_total;
                        report.rhs = bound;
                    }
                }
                report.slack = worst;
                report.pass = worst >= -kExactSlack;
                report.detail = "exact per replica over " + std::to_string(mc.replicas.size());
            } else {
                std::vector<double> margins(mc.replicas.size());
                std::vector<double> lhs_vals(mc.replicas.size());
                for (std::size_t r = 0; r < mc.replicas.size(); ++r) {
                    const auto& t = mc.replicas[r];
                    margins[r] = t.actual_total - (t.final_cum_min - log_n / t.eta_final);
                    lhs_vals[r] = t.actual_total;
                }
                const MeanStderr m = mean_stderr(margins);
                report.lhs = mean_stderr(lhs_vals).mean;
                report.rhs = report.lhs - m.mean;
                report.slack = m.mean;
                report.lhs_stderr = m.stderr_;
                report.pass = m.mean + 3.0 * m.stderr_ >= 0.0;
            }
            return report;
        }
        case BoundId::kIfplVsBeh: {
            BoundReport report;
            report.theorem = bound_id_name(id);
            report.diagnostic = true;
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& t : mc.replicas) {
                const double r_total =
                    spec.predictor == PredictorKind::kIfpl ? t.expected_total : t.ifpl_total;
                require(std::isfinite(r_total),
                        "infeasible-rule totals need exact-expected mode with diagnostics on");
                double best_rhs = std::numeric_limits<double>::infinity();
                for (int i = 0; i < pool.size(); ++i) {
                    best_rhs = std::min(best_rhs, t.final_cum[static_cast<std::size_t>(i)] +
                                                      pool.complexity(i) / t.eta_final);
                }
                if (best_rhs - r_total < worst) {
                    worst = best_rhs - r_total;
                    report.lhs = r_total;
                    report.rhs = best_rhs;
                }
            }
            report.slack = worst;
            report.pass = worst >= -kExactSlack;
            return report;
        }
        case BoundId::kFplVsIfplFactor:
            throw ConfigError("fpl-ifpl-factor is per-round; use evaluate_round_bound");
    }
    throw std::logic_error("evaluate_bound: unknown id");
}

} // namespace

BoundReport evaluate_round_bound(BoundId id, const GameTrace& trace, const RunSpec& spec) {
    require(id == BoundId::kFplVsIfplFactor, "only fpl-ifpl-factor is evaluated per round");
    require(spec.mode == RunMode::kExactExpected && spec.ifpl_diagnostic,
            "per-round factor bound needs exact-expected mode with diagnostics");
    require(!trace.rounds.empty(), "trace has no per-round records");

    BoundReport report;
    report.theorem = bound_id_name(id);
    report.diagnostic = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& round : trace.rounds) {
        const double rhs = std::exp(round.eta) * round.ifpl_loss;
        const double slack = rhs - round.expected_loss;
        if (slack < worst) {
            worst = slack;
            report.lhs = round.expected_loss;
            report.rhs = rhs;
        }
    }
    report.slack = worst;
    report.pass = worst >= -kExactSlack;
    report.detail = "worst round margin over " + std::to_string(trace.rounds.size());
    return report;
}

CoverageReport high_probability_check(const RunSpec& spec, const EnvironmentSpec& env_spec,
                                      double c, double markov_c, int replicas, int threads) {
    if (!(c > 0.0)) throw std::invalid_argument("high_probability_check: c must be > 0");
    if (!(markov_c > 1.0)) throw std::invalid_argument("high_probability_check: markov c must be > 1");
    if (replicas < 2) throw std::invalid_argument("high_probability_check: need >= 2 replicas");
    if (spec.regime != Regime::kFreshPerStep) {
        throw ConfigError("high_probability_check: independent per-step randomization required");
    }
    if (spec.schedule.self_confident()) {
        throw ConfigError("high_probability_check: use a rate independent of the learner's loss");
    }

    EnvironmentSpec shared = env_spec;
    shared.share_seed_across_replicas = true;
    {
        auto probe = shared.instantiate(0);
        if (probe->adaptive()) {
            throw ConfigError("high_probability_check: needs an oblivious (fixed) sequence");
        }
    }

    RunSpec exact_spec = spec;
    exact_spec.mode = RunMode::kExactExpected;
    auto exact_env = shared.instantiate(0);
    const GameTrace exact_trace = run_game(exact_spec, *exact_env, false);
    const double ell = exact_trace.expected_total;

    CoverageReport report;
    report.replicas = replicas;
    report.expected_total = ell;
    report.c = c;
    report.markov_c = markov_c;
    report.ch_threshold = 2.0 * std::exp(-c);
    report.markov_threshold = 1.0 / markov_c;
    if (ell < 3.0 * c) {
        throw ConfigError("high_probability_check: expected loss " + std::to_string(ell) +
                          " below 3c = " + std::to_string(3.0 * c));
    }
    report.deviation = std::sqrt(3.0 * c * ell);

    std::vector<double> actuals(static_cast<std::size_t>(replicas));
    RunSpec sample_spec = spec;
    sample_spec.mode = RunMode::kActual;
    parallel_replicas(replicas, threads, [&](int r) {
        RunSpec rs = sample_spec;
        rs.seed = rng::derive(spec.seed, rng::kLabelReplica, static_cast<std::uint64_t>(r));
        auto env = shared.instantiate(static_cast<std::uint64_t>(r));
        actuals[static_cast<std::size_t>(r)] = run_game(rs, *env, false).actual_total;
    });

    int ch_hits = 0, markov_hits = 0;
    for (double u : actuals) {
        if (std::abs(u - ell) >= report.deviation) ++ch_hits;
        if (u >= markov_c * ell) ++markov_hits;
    }
    const double R = static_cast<double>(replicas);
    report.ch_frequency = ch_hits / R;
    report.ch_stderr = std::sqrt(report.ch_frequency * (1.0 - report.ch_frequency) / R);
    report.ch_pass = report.ch_frequency <= report.ch_threshold + 3.0 * report.ch_stderr;
    report.markov_frequency = markov_hits / R;
    report.markov_stderr = std::sqrt(report.markov_frequency * (1.0 - report.markov_frequency) / R);
    report.markov_pass = report.markov_frequency <= report.markov_threshold + 3.0 * report.markov_stderr;
    return report;
}

std::vector<RatioPoint> ratio_convergence_check(const RunSpec& spec,
                                                const EnvironmentSpec& env_spec,
                                                std::span<const std::int64_t> grid) {
    if (grid.empty()) throw std::invalid_argument("ratio_convergence_check: empty grid");
    if (!spec.pool.uniform_complexities()) {
        throw ConfigError("ratio_convergence_check: uniform complexities required");
    }
    std::vector<RatioPoint> points;
    points.reserve(grid.size());
    for (std::int64_t horizon : grid) {
        RunSpec rs = spec;
        rs.mode = RunMode::kExactExpected;
        rs.horizon = horizon;
        auto env = env_spec.instantiate(0);
        const GameTrace trace = run_game(rs, *env, false);
        RatioPoint p;
        p.horizon = horizon;
        p.expected_total = trace.expected_total;
        p.cum_min = trace.final_cum_min;
        p.degenerate = trace.final_cum_min <= 0.0;
        p.ratio = p.degenerate ? std::numeric_limits<double>::quiet_NaN()
                               : trace.expected_total / trace.final_cum_min;
        points.push_back(p);
    }
    return points;
}

namespace {

// Random game on arbitrary real vectors (entries in [-5,5], n <= 8, T <= 8).
struct RealInstance {
    int n = 0;
    int horizon = 0;
    std::vector<std::vector<double>> losses;   // losses[t][i]
};

RealInstance random_instance(rng::Stream& stream) {
    RealInstance inst;
    inst.n = 1 + static_cast<int>(stream.next_u64() % 8);
    inst.horizon = 1 + static_cast<int>(stream.next_u64() % 8);
    inst.losses.resize(static_cast<std::size_t>(inst.horizon));
    for (auto& row : inst.losses) {
        row.resize(static_cast<std::size_t>(inst.n));
        for (auto& x : row) x = 10.0 * stream.uniform01() - 5.0;
    }
    return inst;
}

double dot_unit(int index, std::span<const double> v) { return v[static_cast<std::size_t>(index)]; }

} // namespace

IdentityCheckResult check_loss_decomposition_identity(int instances, std::uint64_t seed) {
    rng::Stream stream(seed);
    IdentityCheckResult result;
    result.instances = instances;
    double worst = 0.0;
    for (int inst = 0; inst < instances; ++inst) {
        const RealInstance game = random_instance(stream);
        // Alternate between the plain arg-min rule and a penalized arg-min
        // rule; the identity holds for any deterministic rule.
        std::vector<double> penalty(static_cast<std::size_t>(game.n), 0.0);
        if (inst % 2 == 1) {
            for (auto& k : penalty) k = 3.0 * stream.uniform01();
        }
        const auto rule = [&](std::span<const double> s) {
            std::vector<double> shifted(s.begin(), s.end());
            for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += penalty[i];
            return arg_min(shifted);
        };

        std::vector<double> prev(static_cast<std::size_t>(game.n), 0.0);
        std::vector<double> cum(static_cast<std::size_t>(game.n), 0.0);
        double lhs = 0.0, middle = 0.0, last = 0.0;
        for (int t = 0; t < game.horizon; ++t) {
            const auto& s_t = game.losses[static_cast<std::size_t>(t)];
            for (std::size_t i = 0; i < cum.size(); ++i) cum[i] = prev[i] + s_t[i];
            const int d_prev = rule(prev);
            const int d_cur = rule(cum);
            lhs += dot_unit(d_prev, s_t);
            middle += dot_unit(d_prev, prev) - dot_unit(d_cur, prev);
            last += dot_unit(d_prev, s_t) - dot_unit(d_cur, s_t);
            prev = cum;
        }
        const double rhs = dot_unit(rule(prev), prev) + middle + last;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    result.worst_violation = -worst;
    result.pass = worst <= 1e-9;
    return result;
}

IdentityCheckResult check_hindsight_zero_regret(int instances, std::uint64_t seed) {
    rng::Stream stream(seed);
    IdentityCheckResult result;
    result.instances = instances;
    double worst = std::numeric_limits<double>::infinity();
    for (int inst = 0; inst < instances; ++inst) {
        const RealInstance game = random_instance(stream);
        std::vector<double> cum(static_cast<std::size_t>(game.n), 0.0);
        double played = 0.0;
        for (int t = 0; t < game.horizon; ++t) {
            const auto& s_t = game.losses[static_cast<std::size_t>(t)];
            for (std::size_t i = 0; i < cum.size(); ++i) cum[i] += s_t[i];
            played += dot_unit(arg_min(cum), s_t);
        }
        const int best = arg_min(cum);
        worst = std::min(worst, dot_unit(best, cum) - played);
    }
    result.worst_violation = worst;
    result.pass = worst >= -1e-9;
    return result;
}

IdentityCheckResult check_prequential_nonnegative_regret(int instances, std::uint64_t seed) {
    rng::Stream stream(seed);
    IdentityCheckResult result;
    result.instances = instances;
    double worst = std::numeric_limits<double>::infinity();
    for (int inst = 0; inst < instances; ++inst) {
        const RealInstance game = random_instance(stream);
        std::vector<double> prev(static_cast<std::size_t>(game.n), 0.0);
        double played = 0.0;
        for (int t = 0; t < game.horizon; ++t) {
            const auto& s_t = game.losses[static_cast<std::size_t>(t)];
            played += dot_unit(arg_min(prev), s_t);
            for (std::size_t i = 0; i < prev.size(); ++i) prev[i] += s_t[i];
        }
        const int best = arg_min(prev);
        worst = std::min(worst, played - dot_unit(best, prev));
    }
    result.worst_violation = worst;
    result.pass = worst >= -1e-9;
    return result;
}

} // namespace fpl
