#pragma once

#include "monofollow/barrier_solver.hpp"
#include "monofollow/diffusion_model.hpp"
#include "monofollow/simulation_oracle.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace monofollow {

struct ModelConfig {
    std::string type;  // brownian_with_drift | square_root | custom
    double mu = 0.0;
    double sigma = 1.4142135623730951;
    double rho = 1.0;
    double c = 0.0;
    std::optional<double> d;
    std::vector<double> drift;     // custom: polynomial coefficients of mu
    std::vector<double> variance;  // custom: polynomial coefficients of sigma^2
};

struct SimulationSettings {
    SimConfig sim;
    std::vector<double> x0 = {0.2, 0.4, 0.7};
    /// Starting point of the perturbed-barrier probe.
    std::optional<double> probe_x0;
    double perturbation = 0.25;
    /// Hitting-transform check at (l, x, r); defaults to (c, c + 0.5, c + 1).
    std::optional<double> hit_l;
    std::optional<double> hit_x;
    std::optional<double> hit_r;
};

/// Parsed run configuration. Unknown keys are rejected at every level.
struct RunConfig {
    ModelConfig model;
    double alpha = 0.0;
    double h = 1.0;
    std::vector<double> payoff;  // empty: f = 0
    std::optional<double> solvency_floor;
    std::optional<double> truncation;
    SearchConfig search;
    SimulationSettings simulation;
    std::optional<std::string> output_dir;
};

/// Throws ConfigError with a diagnostic naming the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

ProblemSpec build_problem(const RunConfig& cfg);

}  // namespace monofollow
