#include "fpl/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fpl {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

struct ConfigLine {
    int lineno = 0;
    std::string section;
    std::string key;
    std::string value;
    bool consumed = false;
};

class ParsedConfig {
public:
    ParsedConfig(const std::string& text, std::string origin) : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string raw, section;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            const std::size_t hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) fail(lineno, "empty section name");
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
            ConfigLine parsed;
            parsed.lineno = lineno;
            parsed.section = section;
            parsed.key = trim(line.substr(0, eq));
            parsed.value = trim(line.substr(eq + 1));
            if (parsed.key.empty()) fail(lineno, "empty key");
            lines_.push_back(std::move(parsed));
        }
    }

    [[noreturn]] void fail(int lineno, const std::string& message) const {
        throw ConfigError(origin_ + ":" + std::to_string(lineno) + ": " + message);
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError(origin_ + ": " + message);
    }

    const ConfigLine* find(const std::string& section, const std::string& key) {
        for (auto& line : lines_) {
            if (line.section == section && line.key == key) {
                line.consumed = true;
                return &line;
            }
        }
        return nullptr;
    }

    const ConfigLine& require(const std::string& section, const std::string& key) {
        const ConfigLine* line = find(section, key);
        if (line == nullptr) fail("missing required key '" + key + "' in section [" + section + "]");
        return *line;
    }

    std::string string_or(const std::string& section, const std::string& key,
                          const std::string& fallback) {
        const ConfigLine* line = find(section, key);
        return line == nullptr ? fallback : line->value;
    }

    double number(const ConfigLine& line) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(line.value, &pos);
            if (pos != line.value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail(line.lineno, "key '" + line.key + "': cannot parse '" + line.value + "' as a number");
        }
    }

    std::int64_t integer(const ConfigLine& line) const {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(line.value, &pos);
            if (pos != line.value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail(line.lineno,
                 "key '" + line.key + "': cannot parse '" + line.value + "' as an integer");
        }
    }

    bool boolean(const ConfigLine& line) const {
        if (line.value == "true" || line.value == "yes" || line.value == "1") return true;
        if (line.value == "false" || line.value == "no" || line.value == "0") return false;
        fail(line.lineno, "key '" + line.key + "': expected true/false, got '" + line.value + "'");
    }

    std::vector<double> number_list(const ConfigLine& line) const {
        std::vector<double> out;
        std::stringstream ss(line.value);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (cell.empty()) continue;
            try {
                out.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(line.lineno, "key '" + line.key + "': cannot parse '" + cell + "' as a number");
            }
        }
        if (out.empty()) fail(line.lineno, "key '" + line.key + "': empty list");
        return out;
    }

    void reject_unconsumed() const {
        for (const auto& line : lines_) {
            if (!line.consumed) {
                fail(line.lineno, "unknown key '" + line.key + "' in section [" + line.section + "]");
            }
        }
    }

private:
    std::string origin_;
    std::vector<ConfigLine> lines_;
};

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    for (int prec = 1; prec <= 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        if (std::stod(probe) == v) return probe;
    }
    return "0";
}

const char* regime_name(Regime r) {
    return r == Regime::kInitialOnce ? "initial-once" : "fresh-per-step";
}

const char* mode_name(RunMode m) {
    return m == RunMode::kActual ? "actual" : "exact-expected";
}

const char* ell_source_name(EllSource s) {
    switch (s) {
        case EllSource::kExact: return "exact";
        case EllSource::kMonteCarlo: return "mc";
        case EllSource::kActual: return "actual";
    }
    return "exact";
}

const char* inner_kind_name(InnerScheduleKind k) {
    switch (k) {
        case InnerScheduleKind::kDynamic: return "dynamic";
        case InnerScheduleKind::kSelfConfident: return "self-confident";
        case InnerScheduleKind::kAdaptiveSmin: return "adaptive-smin";
    }
    return "dynamic";
}

ordered_json config_echo(const ExperimentConfig& config) {
    ordered_json pool;
    switch (config.pool.kind) {
        case PoolSpec::Kind::kUniform:
            pool = {{"kind", "uniform"}, {"n", config.pool.n}};
            break;
        case PoolSpec::Kind::kCountable:
            pool = {{"kind", "countable"}, {"cap", config.pool.cap},
                    {"finitized", config.pool.finitized}};
            break;
        case PoolSpec::Kind::kExplicit:
            pool = {{"kind", "explicit"}, {"complexities", config.pool.complexities}};
            break;
    }
    ordered_json schedule = {{"kind", schedule_kind_name(config.schedule.kind)}};
    if (config.schedule.needs_complexity_bound()) schedule["K"] = config.schedule.complexity_bound;
    if (config.schedule.kind == ScheduleKind::kStaticL ||
        config.schedule.kind == ScheduleKind::kStaticKL) {
        schedule["L"] = config.schedule.loss_horizon;
    }
    if (config.schedule.kind == ScheduleKind::kStaticRatio) schedule["ratio"] = config.schedule.ratio;
    if (config.schedule.self_confident()) {
        schedule["ell-source"] = ell_source_name(config.schedule.ell_source);
    }

    ordered_json env = {{"kind", environment_kind_name(config.environment.kind)}};
    if (config.environment.kind == EnvironmentKind::kBernoulli) {
        env["p"] = config.environment.bernoulli_p;
        env["seed"] = config.environment.seed;
        env["share-seed"] = config.environment.share_seed_across_replicas;
    }
    if (config.environment.kind == EnvironmentKind::kLastChoicePunisher) {
        env["n"] = config.environment.dimension;
    }
    if (!config.environment.csv_path.empty()) env["csv"] = config.environment.csv_path.string();

    ordered_json predictor = {{"kind", predictor_kind_name(config.predictor)}};
    if (config.predictor == PredictorKind::kHierarchicalFpl) {
        predictor["hierarchy-inner"] = inner_kind_name(config.hierarchy_inner);
    }

    std::vector<std::string> theorem_names;
    theorem_names.reserve(config.theorems.size());
    for (BoundId id : config.theorems) theorem_names.emplace_back(bound_id_name(id));

    return ordered_json{{"schema", kConfigSchema},
                        {"pool", pool},
                        {"predictor", predictor},
                        {"schedule", schedule},
                        {"environment", env},
                        {"run",
                         {{"horizon", config.horizon},
                          {"replicas", config.replicas},
                          {"seed", config.seed},
                          {"regime", regime_name(config.regime)},
                          {"mode", mode_name(config.mode)},
                          {"ifpl-diagnostic", config.ifpl_diagnostic}}},
                        {"report", {{"theorems", theorem_names}, {"trace", config.write_trace}}}};
}

} // namespace

ExpertPool PoolSpec::build() const {
    switch (kind) {
        case Kind::kUniform: return make_uniform_pool(n);
        case Kind::kCountable: return make_countable_pool(cap, finitized);
        case Kind::kExplicit: return ExpertPool(complexities);
    }
    throw ConfigError("PoolSpec: unknown kind");
}

RunSpec ExperimentConfig::to_run_spec() const {
    RunSpec spec{.pool = pool.build()};
    spec.schedule = schedule;
    spec.predictor = predictor;
    spec.hierarchy_inner = hierarchy_inner;
    spec.regime = regime;
    spec.mode = mode;
    spec.horizon = horizon;
    spec.seed = seed;
    spec.ifpl_diagnostic = ifpl_diagnostic;
    return spec;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin) {
    ParsedConfig cfg(text, origin);

    const ConfigLine* schema = cfg.find("", "schema");
    if (schema == nullptr) {
        cfg.fail("missing 'schema = " + std::string(kConfigSchema) + "' before the first section");
    }
    if (schema->value != kConfigSchema) {
        cfg.fail(schema->lineno, "unsupported schema '" + schema->value + "'; this build reads '" +
                                     std::string(kConfigSchema) + "'");
    }

    ExperimentConfig out;

    // [pool]
    {
        const ConfigLine& kind = cfg.require("pool", "kind");
        if (kind.value == "uniform") {
            out.pool.kind = PoolSpec::Kind::kUniform;
            out.pool.n = static_cast<int>(cfg.integer(cfg.require("pool", "n")));
        } else if (kind.value == "countable") {
            out.pool.kind = PoolSpec::Kind::kCountable;
            out.pool.cap = static_cast<int>(cfg.integer(cfg.require("pool", "cap")));
            if (const ConfigLine* f = cfg.find("pool", "finitized")) {
                out.pool.finitized = cfg.boolean(*f);
            }
        } else if (kind.value == "explicit") {
            out.pool.kind = PoolSpec::Kind::kExplicit;
            out.pool.complexities = cfg.number_list(cfg.require("pool", "complexities"));
        } else {
            cfg.fail(kind.lineno, "unknown pool kind '" + kind.value + "'");
        }
    }

    // [predictor]
    {
        const ConfigLine& kind = cfg.require("predictor", "kind");
        try {
            out.predictor = predictor_kind_from_name(kind.value);
        } catch (const std::invalid_argument& e) {
            cfg.fail(kind.lineno, e.what());
        }
        if (const ConfigLine* inner = cfg.find("predictor", "hierarchy-inner")) {
            if (inner->value == "dynamic") {
                out.hierarchy_inner = InnerScheduleKind::kDynamic;
            } else if (inner->value == "self-confident") {
                out.hierarchy_inner = InnerScheduleKind::kSelfConfident;
            } else if (inner->value == "adaptive-smin") {
                out.hierarchy_inner = InnerScheduleKind::kAdaptiveSmin;
            } else {
                cfg.fail(inner->lineno, "unknown hierarchy-inner '" + inner->value + "'");
            }
        }
    }

    // [schedule]
    {
        const ConfigLine& kind = cfg.require("schedule", "kind");
        try {
            out.schedule.kind = schedule_kind_from_name(kind.value);
        } catch (const std::invalid_argument& e) {
            cfg.fail(kind.lineno, e.what());
        }
        if (const ConfigLine* K = cfg.find("schedule", "K")) {
            out.schedule.complexity_bound = cfg.number(*K);
        }
        if (const ConfigLine* L = cfg.find("schedule", "L")) {
            out.schedule.loss_horizon = cfg.number(*L);
        }
        if (const ConfigLine* ratio = cfg.find("schedule", "ratio")) {
            out.schedule.ratio = cfg.number(*ratio);
        }
        if (const ConfigLine* src = cfg.find("schedule", "ell-source")) {
            if (src->value == "exact") {
                out.schedule.ell_source = EllSource::kExact;
            } else if (src->value == "mc") {
                out.schedule.ell_source = EllSource::kMonteCarlo;
            } else if (src->value == "actual") {
                out.schedule.ell_source = EllSource::kActual;
            } else {
                cfg.fail(src->lineno, "unknown ell-source '" + src->value + "'");
            }
        }
    }

    // [environment]
    {
        const ConfigLine& kind = cfg.require("environment", "kind");
        try {
            out.environment.kind = environment_kind_from_name(kind.value);
        } catch (const std::invalid_argument& e) {
            cfg.fail(kind.lineno, e.what());
        }
        switch (out.environment.kind) {
            case EnvironmentKind::kBernoulli: {
                out.environment.bernoulli_p = cfg.number_list(cfg.require("environment", "p"));
                if (const ConfigLine* s = cfg.find("environment", "seed")) {
                    out.environment.seed = static_cast<std::uint64_t>(cfg.integer(*s));
                }
                if (const ConfigLine* sh = cfg.find("environment", "share-seed")) {
                    out.environment.share_seed_across_replicas = cfg.boolean(*sh);
                }
                break;
            }
            case EnvironmentKind::kFixed: {
                const ConfigLine& csv = cfg.require("environment", "csv");
                out.environment.csv_path = csv.value;
                break;
            }
            case EnvironmentKind::kLastChoicePunisher: {
                out.environment.dimension =
                    static_cast<int>(cfg.integer(cfg.require("environment", "n")));
                break;
            }
            case EnvironmentKind::kFlKiller:
                break;
            case EnvironmentKind::kCustomAdaptive:
                cfg.fail(kind.lineno, "custom-adaptive environments are library-only");
        }
    }

    // [run]
    out.horizon = cfg.integer(cfg.require("run", "horizon"));
    if (const ConfigLine* r = cfg.find("run", "replicas")) {
        out.replicas = static_cast<int>(cfg.integer(*r));
    }
    out.seed = static_cast<std::uint64_t>(cfg.integer(cfg.require("run", "seed")));
    {
        const std::string regime = cfg.string_or("run", "regime", "fresh-per-step");
        if (regime == "fresh-per-step") {
            out.regime = Regime::kFreshPerStep;
        } else if (regime == "initial-once") {
            out.regime = Regime::kInitialOnce;
        } else {
            cfg.fail("unknown regime '" + regime + "'");
        }
        const std::string mode = cfg.string_or("run", "mode", "actual");
        if (mode == "actual") {
            out.mode = RunMode::kActual;
        } else if (mode == "exact-expected") {
            out.mode = RunMode::kExactExpected;
        } else {
            cfg.fail("unknown mode '" + mode + "'");
        }
    }
    if (const ConfigLine* d = cfg.find("run", "ifpl-diagnostic")) {
        out.ifpl_diagnostic = cfg.boolean(*d);
    }
    if (const ConfigLine* th = cfg.find("run", "threads")) {
        out.threads = static_cast<int>(cfg.integer(*th));
    }

    // [report]
    if (const ConfigLine* theorems = cfg.find("report", "theorems")) {
        std::stringstream ss(theorems->value);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (cell.empty()) continue;
            try {
                out.theorems.push_back(bound_id_from_name(cell));
            } catch (const std::invalid_argument& e) {
                cfg.fail(theorems->lineno, e.what());
            }
        }
    }
    if (const ConfigLine* tr = cfg.find("report", "trace")) {
        out.write_trace = cfg.boolean(*tr);
    }

    cfg.reject_unconsumed();

    if (out.horizon < 1) cfg.fail("[run] horizon must be >= 1");
    if (out.replicas < 1) cfg.fail("[run] replicas must be >= 1");
    return out;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str(), path.string());
}

void validate_experiment(const ExperimentConfig& config) {
    const ExpertPool pool = config.pool.build();
    if (config.environment.experts() != 0 && config.environment.experts() != pool.size()) {
        throw ConfigError("environment dimension " + std::to_string(config.environment.experts()) +
                          " does not match pool size " + std::to_string(pool.size()));
    }

    const auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("configuration violates a bound hypothesis: " + what);
    };

    for (BoundId id : config.theorems) {
        const std::string name = bound_id_name(id);
        const ScheduleKind kind = config.schedule.kind;
        switch (id) {
            case BoundId::kStaticL:
                require(kind == ScheduleKind::kStaticL, name + " needs schedule static-L");
                break;
            case BoundId::kStaticKL:
                require(kind == ScheduleKind::kStaticKL, name + " needs schedule static-KL");
                break;
            case BoundId::kStaticRatio:
                require(kind == ScheduleKind::kStaticRatio, name + " needs schedule static-ratio");
                break;
            case BoundId::kDynamicT:
                require(kind == ScheduleKind::kDynamicT, name + " needs schedule dynamic-t");
                break;
            case BoundId::kDynamicKT:
                require(kind == ScheduleKind::kDynamicKT, name + " needs schedule dynamic-Kt");
                break;
            case BoundId::kSelfConfident:
                require(kind == ScheduleKind::kSelfConfident, name + " needs schedule self-confident");
                require(config.mode == RunMode::kExactExpected &&
                            config.schedule.ell_source == EllSource::kExact,
                        name + " needs exact-expected mode with the exact loss feed");
                break;
            case BoundId::kSelfConfidentK:
                require(kind == ScheduleKind::kSelfConfidentK,
                        name + " needs schedule self-confident-K");
                require(config.mode == RunMode::kExactExpected &&
                            config.schedule.ell_source == EllSource::kExact,
                        name + " needs exact-expected mode with the exact loss feed");
                break;
            case BoundId::kAdaptivePenalized:
                require(kind == ScheduleKind::kAdaptiveMinPenalized,
                        name + " needs schedule adaptive-min-penalized");
                break;
            case BoundId::kAdaptiveSminK:
                require(kind == ScheduleKind::kAdaptiveSminK, name + " needs schedule adaptive-smin-K");
                break;
            case BoundId::kHierarchyChain:
                require(config.predictor == PredictorKind::kHierarchicalFpl,
                        name + " needs predictor hierarchical-fpl");
                require(config.hierarchy_inner == InnerScheduleKind::kDynamic,
                        name + " is stated for the dynamic inner rate");
                break;
            case BoundId::kLowerBeh:
                require(pool.uniform_complexities(), name + " needs uniform complexities");
                break;
            case BoundId::kIfplVsBeh:
                require(config.mode == RunMode::kExactExpected &&
                            (config.ifpl_diagnostic || config.predictor == PredictorKind::kIfpl),
                        name + " needs exact-expected mode with the infeasible-rule diagnostic");
                break;
            case BoundId::kFplVsIfplFactor:
                require(config.mode == RunMode::kExactExpected && config.ifpl_diagnostic,
                        name + " needs exact-expected mode with the infeasible-rule diagnostic");
                break;
        }
        if (config.schedule.needs_complexity_bound()) {
            require(config.schedule.complexity_bound >= pool.max_complexity() - 1e-12,
                    "K must dominate every expert complexity");
        }
    }
}

void write_trace_csv(const GameTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path.string());
    const auto now = std::chrono::system_clock::now();
    const std::time_t stamp = std::chrono::system_clock::to_time_t(now);
    char stamp_buf[32];
    std::strftime(stamp_buf, sizeof(stamp_buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&stamp));
    out << "# generated " << stamp_buf << "\n";   // only line that varies between runs
    out << "t,eta,decision,u_t,ell_t,cum_u,cum_best\n";
    double cum_u = 0.0;
    for (std::size_t t = 0; t < trace.rounds.size(); ++t) {
        const RoundRecord& r = trace.rounds[t];
        cum_u += r.actual_loss;
        out << (t + 1) << ',' << format_double(r.eta) << ','
            << (r.decision < 0 ? 0 : r.decision + 1) << ',' << format_double(r.actual_loss) << ','
            << format_double(r.expected_loss) << ',' << format_double(cum_u) << ','
            << format_double(r.cum_best) << '\n';
    }
}

std::string render_report_json(const ExperimentConfig& config,
                               const std::vector<BoundReport>& reports) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t stamp = std::chrono::system_clock::to_time_t(now);
    char stamp_buf[32];
    std::strftime(stamp_buf, sizeof(stamp_buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&stamp));

    bool all_pass = true;
    ordered_json entries = ordered_json::array();
    for (const BoundReport& r : reports) {
        all_pass = all_pass && r.pass;
        ordered_json e = {{"theorem", r.theorem},
                          {"lhs", r.lhs},
                          {"lhs_stderr", r.lhs_stderr},
                          {"rhs", r.rhs},
                          {"slack", r.slack},
                          {"verdict", r.pass ? "pass" : "fail"}};
        if (r.lower_bound) e["direction"] = "lower";
        if (r.diagnostic) e["diagnostic"] = true;
        if (!r.detail.empty()) e["detail"] = r.detail;
        entries.push_back(std::move(e));
    }

    ordered_json doc = {{"generated", stamp_buf},   // isolated timestamp field
                        {"config", config_echo(config)},
                        {"reports", entries},
                        {"pass", all_pass}};
    return doc.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& output_dir) {
    validate_experiment(config);
    std::filesystem::create_directories(output_dir);

    const RunSpec spec = config.to_run_spec();
    ExperimentResult result;

    McResult mc;
    if (config.replicas >= 2) {
        mc = monte_carlo_regret(spec, config.environment, config.replicas, config.threads);
    } else {
        auto env = config.environment.instantiate(0);
        RunSpec single = spec;
        single.seed = rng::derive(spec.seed, rng::kLabelReplica, 0);
        mc.replicas.push_back(run_game(single, *env, false));
        mc.mean_regret = mc.replicas.front().regret();
        mc.mean_actual = mc.replicas.front().actual_total;
    }

    for (BoundId id : config.theorems) {
        BoundReport report;
        if (id == BoundId::kFplVsIfplFactor) {
            auto env = config.environment.instantiate(0);
            RunSpec traced = spec;
            traced.seed = rng::derive(spec.seed, rng::kLabelReplica, 0);
            const GameTrace trace = run_game(traced, *env, true);
            report = evaluate_round_bound(id, trace, spec);
        } else {
            report = evaluate_bound(id, mc, spec);
        }
        if (!report.pass) result.failed.push_back(report.theorem);
        result.reports.push_back(std::move(report));
    }
    result.pass = result.failed.empty();

    result.report_path = output_dir / "report.json";
    {
        std::ofstream out(result.report_path);
        if (!out) throw std::runtime_error("cannot write report: " + result.report_path.string());
        out << render_report_json(config, result.reports);
    }

    if (config.write_trace) {
        auto env = config.environment.instantiate(0);
        RunSpec traced = spec;
        traced.seed = rng::derive(spec.seed, rng::kLabelReplica, 0);
        const GameTrace trace = run_game(traced, *env, true);
        result.trace_path = output_dir / "trace.csv";
        write_trace_csv(trace, result.trace_path);
    }
    return result;
}

} // namespace fpl
