#pragma once

#include "monofollow/diffusion_model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace monofollow {

enum class Scheme {
    EulerProjection,
    /// Coefficients evaluated at max(X, c); the square-root default.
    FullTruncation,
};

struct SimConfig {
    double dt = 1e-4;
    std::uint64_t n_paths = 100000;
    /// Paths still alive at the horizon are stopped with zero continuation value.
    double horizon = 200.0;
    std::uint64_t master_seed = 20240917;
    Scheme scheme = Scheme::EulerProjection;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;
    /// Paths 2k and 2k+1 share a seed, the second with negated increments;
    /// samples are then the n_paths / 2 pair averages.
    bool antithetic = false;
};

/// Throws ConfigError for dt <= 0, n_paths = 0, horizon <= 0 or an odd
/// n_paths with antithetic pairing.
void validate(const SimConfig& cfg);

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    double dt = 0.0;
};

/// Mean and sample standard deviation / sqrt(n), summed in index order.
/// n_paths reports `paths_per_sample` paths per entry (2 for antithetic pairs).
SimEstimate summarize(const std::vector<double>& samples, double dt, int paths_per_sample = 1);

/// Per-path difference a_i - b_i. Runs with the same seed share their
/// Gaussian increments path by path, so this is the common-random-numbers
/// comparison of two strategies.
SimEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b, double dt,
                              int paths_per_sample = 1);

/// Sub-seed of path i: splitmix64(master_seed ^ i).
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index);

/// Reflect at b: after each Euler step, pay h (X - b) discounted and set
/// X = b. Absorbed when X <= c; the reward stops there. Starting above b
/// pays the lump h (x0 - b).
std::vector<double> reflected_reward_samples(double x0, double b, const ProblemSpec& problem,
                                             const SimConfig& cfg);
SimEstimate simulate_reflected_reward(double x0, double b, const ProblemSpec& problem,
                                      const SimConfig& cfg);

/// On reaching a >= b, jump to b and collect h (a - b).
std::vector<double> threshold_reward_samples(double x0, double b, double a,
                                             const ProblemSpec& problem, const SimConfig& cfg);
SimEstimate simulate_threshold_reward(double x0, double b, double a, const ProblemSpec& problem,
                                      const SimConfig& cfg);

/// No control at all: the running payoff up to absorption.
SimEstimate simulate_uncontrolled_reward(double x0, const ProblemSpec& problem,
                                         const SimConfig& cfg);

/// E^x int_0^inf e^{-alpha s} f(X_s) ds for the process absorbed at c, with
/// f(c) accruing after absorption (the resolvent g).
SimEstimate simulate_resolvent(double x0, const ProblemSpec& problem, const SimConfig& cfg);

/// (E[e^{-alpha tau_r}; tau_r < tau_l], E[e^{-alpha tau_l}; tau_l < tau_r]).
std::pair<SimEstimate, SimEstimate> hitting_transform_mc(double x, double l, double r,
                                                         const DiffusionSpec& spec, double alpha,
                                                         const SimConfig& cfg);

}  // namespace monofollow
