#include "monofollow/run_config.hpp"

#include "monofollow/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace monofollow {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that
// anything left over can be reported.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) {
            throw ConfigError(where_ + ": expected an object");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        if (!has(key)) {
            throw ConfigError(where_ + "." + key + ": required");
        }
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) {
            throw ConfigError(where_ + "." + key + ": expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw ConfigError(where_ + "." + key + ": must be finite");
        }
        return x;
    }

    template <class T>
    void optional_number(const std::string& key, T& out) {
        if (has(key)) {
            out = static_cast<T>(number(key));
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        if (has(key)) {
            out = number(key);
        }
    }

    std::uint64_t count(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(where_ + "." + key + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) {
            throw ConfigError(where_ + "." + key + ": expected a string");
        }
        return v.get<std::string>();
    }

    bool flag(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_boolean()) {
            throw ConfigError(where_ + "." + key + ": expected true or false");
        }
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) {
            throw ConfigError(where_ + "." + key + ": expected a non-empty array of numbers");
        }
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                throw ConfigError(where_ + "." + key + ": expected numbers only");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(where_ + ": unknown key \"" + key + "\"");
            }
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

ModelConfig parse_model(const json& j) {
    Reader r(j, "model");
    ModelConfig m;
    m.type = r.text("type");
    if (m.type == "brownian_with_drift") {
        m.mu = r.number("mu");
        r.optional_number("sigma", m.sigma);
        r.optional_number("c", m.c);
    } else if (m.type == "square_root") {
        m.rho = r.number("rho");
    } else if (m.type == "custom") {
        m.drift = r.numbers("drift");
        m.variance = r.numbers("variance");
        r.optional_number("c", m.c);
        r.optional_number("d", m.d);
    } else {
        throw ConfigError("model.type: expected brownian_with_drift, square_root or custom, got \"" +
                          m.type + "\"");
    }
    r.finish();
    return m;
}

SearchConfig parse_search(const json& j, std::optional<double>& truncation) {
    Reader r(j, "solver");
    SearchConfig s;
    if (r.has("grid_n")) {
        s.grid_n = static_cast<int>(r.count("grid_n"));
    }
    if (r.has("refinements")) {
        s.refinements = static_cast<int>(r.count("refinements"));
    }
    r.optional_number("merge_tol", s.merge_tol);
    r.optional_number("bisect_tol", s.bisect_tol);
    r.optional_number("agreement_tol", s.agreement_tol);
    r.optional_number("truncation", truncation);
    r.finish();
    if (s.grid_n < 2) {
        throw ConfigError("solver.grid_n: must be at least 2");
    }
    return s;
}

SimulationSettings parse_sim(const json& j) {
    Reader r(j, "sim");
    SimulationSettings s;
    r.optional_number("dt", s.sim.dt);
    if (r.has("n_paths")) {
        s.sim.n_paths = r.count("n_paths");
    }
    r.optional_number("horizon", s.sim.horizon);
    if (r.has("seed")) {
        s.sim.master_seed = r.count("seed");
    }
    if (r.has("workers")) {
        s.sim.workers = static_cast<unsigned>(r.count("workers"));
    }
    if (r.has("scheme")) {
        const std::string scheme = r.text("scheme");
        if (scheme == "euler_projection") {
            s.sim.scheme = Scheme::EulerProjection;
        } else if (scheme == "full_truncation") {
            s.sim.scheme = Scheme::FullTruncation;
        } else {
            throw ConfigError("sim.scheme: expected euler_projection or full_truncation");
        }
    }
    if (r.has("antithetic")) {
        s.sim.antithetic = r.flag("antithetic");
    }
    if (r.has("x0")) {
        s.x0 = r.numbers("x0");
    }
    r.optional_number("probe_x0", s.probe_x0);
    r.optional_number("perturbation", s.perturbation);
    if (r.has("hitting")) {
        Reader hit(r.raw("hitting"), "sim.hitting");
        hit.optional_number("l", s.hit_l);
        hit.optional_number("x", s.hit_x);
        hit.optional_number("r", s.hit_r);
        hit.finish();
    }
    r.finish();
    try {
        validate(s.sim);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("sim: ") + e.what());
    }
    return s;
}

json optional_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    Reader r(j, "config");
    RunConfig cfg;
    cfg.model = parse_model(r.raw("model"));
    cfg.alpha = r.number("alpha");
    r.optional_number("h", cfg.h);
    if (r.has("payoff")) {
        const json& p = r.raw("payoff");
        if (p.is_string()) {
            if (p.get<std::string>() != "zero") {
                throw ConfigError("config.payoff: expected \"zero\" or polynomial coefficients");
            }
        } else {
            cfg.payoff = r.numbers("payoff");
        }
    }
    r.optional_number("solvency_floor", cfg.solvency_floor);
    if (r.has("solver")) {
        cfg.search = parse_search(r.raw("solver"), cfg.truncation);
    }
    if (r.has("sim")) {
        cfg.simulation = parse_sim(r.raw("sim"));
    }
    if (r.has("output_dir")) {
        cfg.output_dir = r.text("output_dir");
    }
    r.finish();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
    json model;
    model["type"] = cfg.model.type;
    if (cfg.model.type == "brownian_with_drift") {
        model["mu"] = cfg.model.mu;
        model["sigma"] = cfg.model.sigma;
        model["c"] = cfg.model.c;
    } else if (cfg.model.type == "square_root") {
        model["rho"] = cfg.model.rho;
    } else {
        model["drift"] = cfg.model.drift;
        model["variance"] = cfg.model.variance;
        model["c"] = cfg.model.c;
        model["d"] = optional_json(cfg.model.d);
    }
    const auto& s = cfg.simulation;
    json sim = {{"dt", s.sim.dt},
                {"n_paths", s.sim.n_paths},
                {"horizon", s.sim.horizon},
                {"seed", s.sim.master_seed},
                {"workers", s.sim.workers},
                {"antithetic", s.sim.antithetic},
                {"scheme", s.sim.scheme == Scheme::FullTruncation ? "full_truncation"
                                                                   : "euler_projection"},
                {"x0", s.x0},
                {"probe_x0", optional_json(s.probe_x0)},
                {"perturbation", s.perturbation},
                {"hitting",
                 {{"l", optional_json(s.hit_l)},
                  {"x", optional_json(s.hit_x)},
                  {"r", optional_json(s.hit_r)}}}};
    json solver = {{"grid_n", cfg.search.grid_n},
                   {"refinements", cfg.search.refinements},
                   {"merge_tol", cfg.search.merge_tol},
                   {"bisect_tol", cfg.search.bisect_tol},
                   {"agreement_tol", cfg.search.agreement_tol},
                   {"truncation", optional_json(cfg.truncation)}};
    json out = {{"model", model},
                {"alpha", cfg.alpha},
                {"h", cfg.h},
                {"solvency_floor", optional_json(cfg.solvency_floor)},
                {"solver", solver},
                {"sim", sim}};
    out["payoff"] = cfg.payoff.empty() ? json("zero") : json(cfg.payoff);
    if (cfg.output_dir) {
        out["output_dir"] = *cfg.output_dir;
    }
    return out;
}

ProblemSpec build_problem(const RunConfig& cfg) {
    const ModelConfig& m = cfg.model;
    std::optional<DiffusionSpec> spec;
    try {
        if (m.type == "brownian_with_drift") {
            spec = DiffusionSpec::brownian_with_drift(m.mu, m.sigma, m.c);
        } else if (m.type == "square_root") {
            spec = DiffusionSpec::square_root(m.rho);
        } else {
            const Polynomial drift{m.drift};
            const Polynomial variance{m.variance};
            spec = DiffusionSpec::custom(
                [drift](double x) { return drift(x); },
                [variance](double x) { return std::sqrt(std::max(variance(x), 0.0)); }, m.c,
                m.d.value_or(std::numeric_limits<double>::infinity()),
                [drift](double x) { return drift.derivative(x); },
                [variance](double x) { return variance.derivative(x); });
        }
        if (cfg.truncation) {
            spec = spec->with_truncation(*cfg.truncation);
        }
        Payoff payoff = cfg.payoff.empty() ? Payoff::zero() : Payoff::polynomial(cfg.payoff);
        return ProblemSpec(*spec, cfg.alpha, payoff, cfg.h, cfg.solvency_floor);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace monofollow
