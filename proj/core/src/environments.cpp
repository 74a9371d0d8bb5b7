#include "fpl/environments.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fpl/rng.hpp"

namespace fpl {

const char* environment_kind_name(EnvironmentKind kind) {
    switch (kind) {
        case EnvironmentKind::kFixed: return "fixed";
        case EnvironmentKind::kFlKiller: return "fl-killer";
        case EnvironmentKind::kBernoulli: return "bernoulli";
        case EnvironmentKind::kLastChoicePunisher: return "last-choice-punisher";
        case EnvironmentKind::kCustomAdaptive: return "custom-adaptive";
    }
    throw std::logic_error("environment_kind_name: unknown kind");
}

EnvironmentKind environment_kind_from_name(std::string_view name) {
    for (EnvironmentKind k : {EnvironmentKind::kFixed, EnvironmentKind::kFlKiller,
                              EnvironmentKind::kBernoulli, EnvironmentKind::kLastChoicePunisher,
                              EnvironmentKind::kCustomAdaptive}) {
        if (name == environment_kind_name(k)) return k;
    }
    throw std::invalid_argument("unknown environment kind: " + std::string(name));
}

LossVector Environment::next_losses(std::int64_t t, std::span<const int> decision_history) {
    if (t < 1) throw std::invalid_argument("Environment::next_losses: t must be >= 1");
    if (static_cast<std::int64_t>(decision_history.size()) != t - 1) {
        throw std::invalid_argument("Environment::next_losses: history length " +
                                    std::to_string(decision_history.size()) +
                                    " does not match round " + std::to_string(t));
    }
    return generate(t, decision_history);
}

namespace {

class FlKillerEnvironment final : public Environment {
public:
    int dimension() const override { return 2; }
    bool adaptive() const override { return false; }

protected:
    LossVector generate(std::int64_t t, std::span<const int>) override {
        if (t == 1) return LossVector({0.0, 0.5});
        // From round 2 on: expert 1 alternates 1,0,... and expert 2 the opposite.
        const bool even = (t % 2) == 0;
        return LossVector({even ? 1.0 : 0.0, even ? 0.0 : 1.0});
    }
};

class BernoulliEnvironment final : public Environment {
public:
    BernoulliEnvironment(std::vector<double> p, std::uint64_t seed) : p_(std::move(p)), seed_(seed) {
        if (p_.empty()) throw std::invalid_argument("bernoulli environment: empty p");
        for (double x : p_) {
            if (!(x >= 0.0 && x <= 1.0)) {
                throw std::invalid_argument("bernoulli environment: p outside [0,1]");
            }
        }
    }
    int dimension() const override { return static_cast<int>(p_.size()); }
    bool adaptive() const override { return false; }

protected:
    LossVector generate(std::int64_t t, std::span<const int>) override {
        rng::Stream stream(rng::derive(seed_, rng::kLabelRound, static_cast<std::uint64_t>(t)));
        std::vector<double> losses(p_.size());
        for (std::size_t i = 0; i < p_.size(); ++i) {
            losses[i] = stream.uniform01() <= p_[i] ? 1.0 : 0.0;
        }
        return LossVector(std::move(losses));
    }

private:
    std::vector<double> p_;
    std::uint64_t seed_;
};

class FixedEnvironment final : public Environment {
public:
    explicit FixedEnvironment(std::vector<LossVector> rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw std::invalid_argument("fixed environment: no rows");
        for (const auto& row : rows_) {
            if (row.size() != rows_.front().size()) {
                throw std::invalid_argument("fixed environment: ragged rows");
            }
        }
    }
    int dimension() const override { return rows_.front().size(); }
    bool adaptive() const override { return false; }

protected:
    LossVector generate(std::int64_t t, std::span<const int>) override {
        return rows_[static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(rows_.size()))];
    }

private:
    std::vector<LossVector> rows_;
};

class LastChoicePunisherEnvironment final : public Environment {
public:
    explicit LastChoicePunisherEnvironment(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("last-choice-punisher: n must be >= 1");
    }
    int dimension() const override { return n_; }
    bool adaptive() const override { return true; }

protected:
    LossVector generate(std::int64_t t, std::span<const int> history) override {
        std::vector<double> losses(static_cast<std::size_t>(n_), 0.0);
        if (t > 1) {
            const int last = history[static_cast<std::size_t>(t - 2)];
            if (last < 0 || last >= n_) {
                throw std::invalid_argument("last-choice-punisher: decision out of range");
            }
            losses[static_cast<std::size_t>(last)] = 1.0;
        }
        return LossVector(std::move(losses));
    }

private:
    int n_;
};

class CustomAdaptiveEnvironment final : public Environment {
public:
    CustomAdaptiveEnvironment(int n,
                              std::function<LossVector(std::int64_t, std::span<const int>)> fn)
        : n_(n), fn_(std::move(fn)) {
        if (n < 1 || !fn_) throw std::invalid_argument("custom-adaptive: bad arguments");
    }
    int dimension() const override { return n_; }
    bool adaptive() const override { return true; }

protected:
    LossVector generate(std::int64_t t, std::span<const int> history) override {
        LossVector losses = fn_(t, history);
        if (losses.size() != n_) {
            throw std::invalid_argument("custom-adaptive: transition emitted wrong dimension");
        }
        return losses;
    }

private:
    int n_;
    std::function<LossVector(std::int64_t, std::span<const int>)> fn_;
};

} // namespace

std::unique_ptr<Environment> make_fl_killer() { return std::make_unique<FlKillerEnvironment>(); }

std::unique_ptr<Environment> make_bernoulli(std::vector<double> p, std::uint64_t seed) {
    return std::make_unique<BernoulliEnvironment>(std::move(p), seed);
}

std::unique_ptr<Environment> make_fixed(std::vector<LossVector> rows) {
    return std::make_unique<FixedEnvironment>(std::move(rows));
}

std::unique_ptr<Environment> load_fixed_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open loss CSV: " + path.string());
    std::vector<LossVector> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": cannot parse '" + cell + "' as a loss");
            }
        }
        if (row.empty()) continue;
        try {
            rows.emplace_back(std::move(row));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return make_fixed(std::move(rows));
}

std::unique_ptr<Environment> make_last_choice_punisher(int n) {
    return std::make_unique<LastChoicePunisherEnvironment>(n);
}

std::unique_ptr<Environment> make_custom_adaptive(
    int n, std::function<LossVector(std::int64_t, std::span<const int>)> transition) {
    return std::make_unique<CustomAdaptiveEnvironment>(n, std::move(transition));
}

} // namespace fpl
