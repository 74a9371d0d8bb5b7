#pragma once
// Game loop and verification machinery: plays predictor vs environment,
// replicates games over disjoint random substreams, evaluates every
// implemented regret bound as a pass/fail report, and runs the
// high-probability and ratio-convergence checks.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpl/environments.hpp"
#include "fpl/perturbation.hpp"
#include "fpl/predictors.hpp"
#include "fpl/schedules.hpp"
#include "fpl/types.hpp"

namespace fpl {

// A requested run is inconsistent with a bound's hypotheses or with itself.
// Distinct from a failed bound: a failed bound is a result, this is a
// refusal to produce one.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode {
    kActual,         // sample decisions, record realized losses u_t
    kExactExpected,  // additionally compute exact expected losses ell_t
};

struct EnvironmentSpec {
    EnvironmentKind kind = EnvironmentKind::kFlKiller;
    int dimension = 0;                     // punisher / custom
    std::vector<double> bernoulli_p;
    std::vector<LossVector> fixed_rows;
    std::filesystem::path csv_path;        // alternative source for kFixed
    std::uint64_t seed = 0;
    bool share_seed_across_replicas = false;
    std::function<LossVector(std::int64_t, std::span<const int>)> custom;

    int experts() const;
    std::unique_ptr<Environment> instantiate(std::uint64_t replica) const;
};

struct RunSpec {
    ExpertPool pool;
    ScheduleSpec schedule{};
    PredictorKind predictor = PredictorKind::kFpl;
    InnerScheduleKind hierarchy_inner = InnerScheduleKind::kDynamic;
    Regime regime = Regime::kFreshPerStep;
    RunMode mode = RunMode::kActual;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    bool ifpl_diagnostic = false;      // also track r_t; exact-expected mode only
    int mc_probability_samples = 1000; // EllSource::kMonteCarlo estimator size
};

struct RoundRecord {
    double eta = 0.0;
    int decision = -1;           // sampled expert; -1 for simplex play
    double actual_loss = 0.0;    // u_t
    double expected_loss = 0.0;  // ell_t (NaN unless exact-expected mode)
    double ifpl_loss = 0.0;      // r_t (NaN unless diagnostic)
    double cum_best = 0.0;       // s_{1:t}^min after this round
};

struct GameTrace {
    std::int64_t horizon = 0;
    std::vector<RoundRecord> rounds;   // populated when keep_rounds
    double actual_total = 0.0;         // u_{1:T}
    double expected_total = 0.0;       // ell_{1:T}; NaN if not computed
    double ifpl_total = 0.0;           // r_{1:T}; NaN if not computed
    std::vector<double> final_cum;     // s_{1:T}
    double final_cum_min = 0.0;
    int beh_index = -1;
    double eta_final = 0.0;            // eta_T
    bool diagnostic_predictor = false; // decisions saw current losses (ifpl)

    double regret() const { return actual_total - final_cum_min; }
};

GameTrace run_game(const RunSpec& spec, Environment& env, bool keep_rounds = true);

struct McResult {
    std::vector<GameTrace> replicas;   // without per-round records
    double mean_regret = 0.0;
    double regret_stderr = 0.0;
    double mean_actual = 0.0;
    double actual_stderr = 0.0;
};

// Independent replicas on substreams derived from (seed, replica index).
McResult monte_carlo_regret(const RunSpec& spec, const EnvironmentSpec& env_spec, int replicas,
                            int threads = 0);

// Identifiers for the regret bounds the harness can evaluate.
enum class BoundId {
    kIfplVsBeh,        // r_{1:T} <= s^i_{1:T} + k^i/eta_T
    kFplVsIfplFactor,  // ell_t <= e^{eta_t} r_t each round
    kStaticL,          // eta = 1/sqrt(L):      ell <= s^i + sqrt(L)(k^i+1)
    kStaticKL,         // eta = sqrt(K/L):      ell <= s^i + 2 sqrt(LK)
    kStaticRatio,      // eta = sqrt(k^i/L):    ell <= s^i + 2 sqrt(L k^i) + 3 k^i
    kDynamicT,         // eta_t = 1/sqrt(t):    ell <= s^i + sqrt(T)(k^i+2)
    kDynamicKT,        // eta_t = sqrt(K/2t):   ell <= s^i + 2 sqrt(2TK)
    kSelfConfident,    // ell <= s^i + (k^i+1) sqrt(2(s^i+1)) + 2(k^i+1)^2
    kSelfConfidentK,   // ell <= s^i + 2 sqrt(2(s^i+1)K) + 8K
    kAdaptivePenalized,// ell <= s^i + (k^i+2) sqrt(2 s^i) + 2(k^i+2)^2
    kAdaptiveSminK,    // ell <= s^i + 2 sqrt(2K s^i) + 5K ln s^i + 3K + 6
    kHierarchyChain,   // ell~ <= s^i + sqrt(T)[2 sqrt(2(k^i+1)) + 1/2 + 2 ln(k^i+1) + 2]
    kLowerBeh,         // ell >= s^min - ln(n)/eta_T (uniform complexities)
};

const char* bound_id_name(BoundId id);
BoundId bound_id_from_name(std::string_view name);

struct BoundReport {
    std::string theorem;      // bound id string
    double lhs = 0.0;         // measured quantity (mean over replicas)
    double lhs_stderr = 0.0;  // 0 in exact mode / deterministic setups
    double rhs = 0.0;         // evaluated bound for the binding expert
    double slack = 0.0;       // margin by which the bound holds
    bool lower_bound = false;
    bool diagnostic = false;
    bool pass = false;        // slack + 3 * lhs_stderr >= 0
    std::string detail;
};

// Evaluates a bound against replica results. Throws ConfigError when the
// configuration does not satisfy the bound's hypotheses (wrong schedule
// kind, K below some k^i, missing exact-mode data, ...).
BoundReport evaluate_bound(BoundId id, const McResult& mc, const RunSpec& spec);

// Per-round bound check over a traced game (kFplVsIfplFactor).
BoundReport evaluate_round_bound(BoundId id, const GameTrace& trace, const RunSpec& spec);

struct CoverageReport {
    int replicas = 0;
    double expected_total = 0.0;   // exact ell_{1:T} of the fixed sequence
    double c = 0.0;
    double deviation = 0.0;        // sqrt(3 c ell)
    double ch_threshold = 0.0;     // 2 e^{-c}
    double ch_frequency = 0.0;
    double ch_stderr = 0.0;        // binomial
    bool ch_pass = false;
    double markov_c = 0.0;
    double markov_threshold = 0.0; // 1/c
    double markov_frequency = 0.0;
    double markov_stderr = 0.0;
    bool markov_pass = false;
};

// Frequency of |u_{1:T} - ell_{1:T}| >= sqrt(3 c ell) vs 2 e^{-c}, and of
// u >= c' ell vs 1/c', over replicas that share one fixed loss sequence and
// differ only in their per-step perturbations.
CoverageReport high_probability_check(const RunSpec& spec, const EnvironmentSpec& env_spec,
                                      double c, double markov_c, int replicas, int threads = 0);

struct RatioPoint {
    std::int64_t horizon = 0;
    double expected_total = 0.0;
    double cum_min = 0.0;
    double ratio = 0.0;       // ell_{1:t} / s_{1:t}^min
    bool degenerate = false;  // s^min = 0
};

// ell_{1:t} / s^min_{1:t} along a horizon grid; requires uniform
// complexities and a rate with eta_t -> 0, eta_t * s^min -> infinity.
std::vector<RatioPoint> ratio_convergence_check(const RunSpec& spec,
                                                const EnvironmentSpec& env_spec,
                                                std::span<const std::int64_t> grid);

struct IdentityCheckResult {
    int instances = 0;
    double worst_violation = 0.0;  // most negative margin seen
    bool pass = false;             // worst_violation >= -1e-9
};

// Loss decomposition of any deterministic rule d on cumulative states:
// sum_t d(s_{<t}).s_t = d(s_{1:T}).s_{1:T} + sum_t [d(s_{<t})-d(s_{1:t})].s_{<t}
//                       + sum_t [d(s_{<t})-d(s_{1:t})].s_t
IdentityCheckResult check_loss_decomposition_identity(int instances, std::uint64_t seed);

// Hindsight rule has zero regret: sum_t M(s_{1:t}).s_t <= M(s_{1:T}).s_{1:T}
IdentityCheckResult check_hindsight_zero_regret(int instances, std::uint64_t seed);

// Prequential rule has nonnegative regret: sum_t M(s_{<t}).s_t >= M(s_{1:T}).s_{1:T}
IdentityCheckResult check_prequential_nonnegative_regret(int instances, std::uint64_t seed);

} // namespace fpl
