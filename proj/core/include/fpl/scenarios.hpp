#pragma once
// Built-in verification scenarios. Each scenario pins its own seeds and
// parameters, states the claim it checks, and reports a pass/fail verdict
// plus the numbers behind it. The CLI exposes them by name and the
// acceptance suite runs all of them.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fpl/harness.hpp"

namespace fpl {

struct ScenarioMetric {
    std::string name;
    double value = 0.0;
};

struct ScenarioResult {
    std::string name;
    bool pass = false;
    std::vector<BoundReport> reports;
    std::vector<ScenarioMetric> metrics;
    std::string summary;   // one line of human-readable outcome
};

struct ScenarioOptions {
    std::uint64_t seed = 0;   // overrides the pinned seed when nonzero
    int replicas = 0;         // overrides the pinned replica count when > 0
    int threads = 0;
};

struct Scenario {
    std::string name;
    std::string claim;        // statement of the verified inequality/identity
    std::function<ScenarioResult(const ScenarioOptions&)> run;
};

const std::vector<Scenario>& scenario_catalog();
const Scenario* find_scenario(std::string_view name);

std::string render_scenario_json(const ScenarioResult& result, const std::string& claim);

} // namespace fpl
