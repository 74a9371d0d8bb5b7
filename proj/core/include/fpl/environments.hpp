#pragma once
// Loss-sequence generators. Oblivious kinds (fixed tables, the FL-killer
// alternation, seeded Bernoulli draws) ignore the learner's decisions;
// adaptive kinds see strictly past decisions I_{<t} and nothing newer.
// Every kind emits losses in [0,1]^n and is a pure function of
// (seed, kind, t, history), so games replay identically.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "fpl/types.hpp"

namespace fpl {

enum class EnvironmentKind {
    kFixed,
    kFlKiller,
    kBernoulli,
    kLastChoicePunisher,
    kCustomAdaptive,
};

const char* environment_kind_name(EnvironmentKind kind);
EnvironmentKind environment_kind_from_name(std::string_view name);

class Environment {
public:
    virtual ~Environment() = default;
    virtual int dimension() const = 0;
    virtual bool adaptive() const = 0;

    // Losses for round t >= 1. decision_history must contain exactly the
    // learner's choices for rounds 1..t-1.
    LossVector next_losses(std::int64_t t, std::span<const int> decision_history);

protected:
    virtual LossVector generate(std::int64_t t, std::span<const int> decision_history) = 0;
};

// Two experts; expert 1 alternates 0,1,0,1,... and expert 2 opens with 1/2
// and then alternates 0,1,0,1,... so the unperturbed leader is always wrong.
std::unique_ptr<Environment> make_fl_killer();

// Independent 0/1 losses, expert i hitting 1 with probability p[i].
std::unique_ptr<Environment> make_bernoulli(std::vector<double> p, std::uint64_t seed);

// Replays a fixed table of rows; rounds beyond the table wrap around.
std::unique_ptr<Environment> make_fixed(std::vector<LossVector> rows);

// CSV with one row per round and one column per expert, values in [0,1].
std::unique_ptr<Environment> load_fixed_csv(const std::filesystem::path& path);

// Adaptive: round 1 is all zeros, afterwards the expert chosen at t-1 gets
// loss 1 and everyone else 0.
std::unique_ptr<Environment> make_last_choice_punisher(int n);

// Adaptive with a user transition function (history -> losses).
std::unique_ptr<Environment> make_custom_adaptive(
    int n, std::function<LossVector(std::int64_t, std::span<const int>)> transition);

} // namespace fpl
