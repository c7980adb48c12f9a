#include "monofollow/simulation_oracle.hpp"

#include "monofollow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace monofollow {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Drift and volatility with the built-in models inlined; the custom model
// goes through the callbacks.
class Coefficients {
public:
    Coefficients(const DiffusionSpec& spec, Scheme scheme)
        : spec_(&spec), c_(spec.left()), truncate_(scheme == Scheme::FullTruncation) {
        if (const auto* bm = std::get_if<BrownianWithDrift>(&spec.kind())) {
            kind_ = 0;
            mu_ = bm->mu;
            sigma_ = bm->sigma;
        } else if (const auto* sr = std::get_if<SquareRoot>(&spec.kind())) {
            kind_ = 1;
            rho_ = sr->rho;
            truncate_ = true;
        }
    }

    // One Euler step of size dt with standard normal z.
    double step(double x, double dt, double sqrt_dt, double z) const {
        const double y = truncate_ ? std::max(x, c_) : x;
        switch (kind_) {
        case 0:
            return x + mu_ * dt + sigma_ * sqrt_dt * z;
        case 1:
            return x + (1.0 - 2.0 * rho_ * y) * dt + 2.0 * std::sqrt(y) * sqrt_dt * z;
        default:
            return x + spec_->drift(y) * dt + spec_->volatility(y) * sqrt_dt * z;
        }
    }

private:
    const DiffusionSpec* spec_;
    double c_;
    bool truncate_;
    int kind_ = 2;
    double mu_ = 0.0;
    double sigma_ = 0.0;
    double rho_ = 0.0;
};

struct PathRng {
    std::mt19937_64 engine;
    std::normal_distribution<double> normal;
    double sign;

    PathRng(std::uint64_t seed, bool mirrored) : engine(seed), sign(mirrored ? -1.0 : 1.0) {}
    double operator()() { return sign * normal(engine); }
};

int per_sample(const SimConfig& cfg) {
    return cfg.antithetic ? 2 : 1;
}

// Runs `path(rng)` for every sample index into a vector, in parallel over
// contiguous blocks. Results depend only on the index.
template <class Path>
std::vector<double> run_paths(const SimConfig& cfg, Path&& path) {
    validate(cfg);
    const std::uint64_t n = cfg.n_paths / per_sample(cfg);
    std::vector<double> out(n);
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
    const auto block = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            const std::uint64_t seed = path_seed(cfg.master_seed, i);
            if (cfg.antithetic) {
                PathRng up(seed, false);
                PathRng down(seed, true);
                out[i] = 0.5 * (path(up) + path(down));
            } else {
                PathRng rng(seed, false);
                out[i] = path(rng);
            }
        }
    };
    if (workers <= 1) {
        block(0, n);
        return out;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t lo = w * chunk;
        const std::uint64_t hi = std::min(n, lo + chunk);
        if (lo < hi) {
            pool.emplace_back(block, lo, hi);
        }
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

// Control policy: on reaching `trigger` jump to `target`, paying h per unit.
// Reflection is trigger = target = b; no control is trigger = +inf.
struct Policy {
    double target;
    double trigger;
};

std::vector<double> controlled_samples(double x0, Policy policy, const ProblemSpec& problem,
                                       const SimConfig& cfg, bool accrue_after_absorption) {
    const auto& spec = problem.diffusion();
    const double c = spec.left();
    const double h = problem.h();
    const double alpha = problem.alpha();
    const Payoff& f = problem.payoff();
    const bool running = !f.identically_zero();
    const double tail = accrue_after_absorption ? f(c) / alpha : 0.0;
    const Coefficients coeff(spec, cfg.scheme);
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double decay = std::exp(-alpha * dt);
    const auto steps = static_cast<std::uint64_t>(std::ceil(cfg.horizon / dt));

    return run_paths(cfg, [&](PathRng& rng) {
        double x = x0;
        double reward = 0.0;
        if (x >= policy.trigger) {
            reward += h * (x - policy.target);
            x = policy.target;
        }
        if (x <= c) {
            return reward + tail;
        }
        double disc = 1.0;
        for (std::uint64_t k = 0; k < steps; ++k) {
            if (running) {
                reward += disc * f(x) * dt;
            }
            x = coeff.step(x, dt, sqrt_dt, rng());
            disc *= decay;
            if (x <= c) {
                return reward + disc * tail;
            }
            if (x >= policy.trigger) {
                reward += disc * h * (x - policy.target);
                x = policy.target;
            }
        }
        return reward;
    });
}

void check_state(const DiffusionSpec& spec, double x, const char* what) {
    if (x < spec.left() || x >= spec.right()) {
        throw DomainError(std::string(what) + " = " + std::to_string(x) + " outside [c, d)");
    }
}

}  // namespace

void validate(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) {
        throw ConfigError("simulation: dt must be positive");
    }
    if (cfg.n_paths == 0) {
        throw ConfigError("simulation: n_paths must be positive");
    }
    if (!(cfg.horizon > 0.0)) {
        throw ConfigError("simulation: horizon must be positive");
    }
    if (cfg.antithetic && cfg.n_paths % 2 != 0) {
        throw ConfigError("simulation: antithetic pairing needs an even n_paths");
    }
}

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ index);
}

SimEstimate summarize(const std::vector<double>& samples, double dt, int paths_per_sample) {
    SimEstimate est;
    est.n_paths = samples.size() * static_cast<std::uint64_t>(paths_per_sample);
    est.dt = dt;
    if (samples.empty()) {
        return est;
    }
    double sum = 0.0;
    for (double v : samples) {
        sum += v;
    }
    const double n = static_cast<double>(samples.size());
    est.mean = sum / n;
    double ss = 0.0;
    for (double v : samples) {
        ss += (v - est.mean) * (v - est.mean);
    }
    est.std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return est;
}

SimEstimate paired_difference(const std::vector<double>& a, const std::vector<double>& b, double dt,
                              int paths_per_sample) {
    if (a.size() != b.size()) {
        throw DomainError("paired_difference: sample sizes differ");
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
    }
    return summarize(d, dt, paths_per_sample);
}

std::vector<double> reflected_reward_samples(double x0, double b, const ProblemSpec& problem,
                                             const SimConfig& cfg) {
    check_state(problem.diffusion(), x0, "x0");
    check_state(problem.diffusion(), b, "b");
    return controlled_samples(x0, {b, b}, problem, cfg, false);
}

SimEstimate simulate_reflected_reward(double x0, double b, const ProblemSpec& problem,
                                      const SimConfig& cfg) {
    return summarize(reflected_reward_samples(x0, b, problem, cfg), cfg.dt, per_sample(cfg));
}

std::vector<double> threshold_reward_samples(double x0, double b, double a,
                                             const ProblemSpec& problem, const SimConfig& cfg) {
    check_state(problem.diffusion(), x0, "x0");
    check_state(problem.diffusion(), b, "b");
    if (!(a >= b) || !(a < problem.diffusion().right())) {
        throw DomainError("threshold strategy: need b <= a < d");
    }
    return controlled_samples(x0, {b, a}, problem, cfg, false);
}

SimEstimate simulate_threshold_reward(double x0, double b, double a, const ProblemSpec& problem,
                                      const SimConfig& cfg) {
    return summarize(threshold_reward_samples(x0, b, a, problem, cfg), cfg.dt, per_sample(cfg));
}

SimEstimate simulate_uncontrolled_reward(double x0, const ProblemSpec& problem,
                                         const SimConfig& cfg) {
    check_state(problem.diffusion(), x0, "x0");
    const double never = std::numeric_limits<double>::infinity();
    return summarize(controlled_samples(x0, {never, never}, problem, cfg, false), cfg.dt,
                     per_sample(cfg));
}

SimEstimate simulate_resolvent(double x0, const ProblemSpec& problem, const SimConfig& cfg) {
    check_state(problem.diffusion(), x0, "x0");
    const double never = std::numeric_limits<double>::infinity();
    return summarize(controlled_samples(x0, {never, never}, problem, cfg, true), cfg.dt,
                     per_sample(cfg));
}

std::pair<SimEstimate, SimEstimate> hitting_transform_mc(double x, double l, double r,
                                                         const DiffusionSpec& spec, double alpha,
                                                         const SimConfig& cfg) {
    if (!(l < r) || x < l || x > r) {
        throw DomainError("hitting_transform_mc: need l <= x <= r with l < r");
    }
    if (!(alpha > 0.0)) {
        throw DomainError("hitting_transform_mc: alpha must be positive");
    }
    const Coefficients coeff(spec, cfg.scheme);
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double decay = std::exp(-alpha * dt);
    const auto steps = static_cast<std::uint64_t>(std::ceil(cfg.horizon / dt));

    // Encode the exit side in the sign: +disc at r, -disc at l. Antithetic
    // pairing would mix the two sides, so it is not used here.
    SimConfig plain = cfg;
    plain.antithetic = false;
    const std::vector<double> signed_hits = run_paths(plain, [&](PathRng& rng) {
        if (x >= r) return 1.0;
        if (x <= l) return -1.0;
        double y = x;
        double disc = 1.0;
        for (std::uint64_t k = 0; k < steps; ++k) {
            y = coeff.step(y, dt, sqrt_dt, rng());
            disc *= decay;
            if (y >= r) return disc;
            if (y <= l) return -disc;
        }
        return 0.0;
    });
    std::vector<double> right(signed_hits.size());
    std::vector<double> left(signed_hits.size());
    for (std::size_t i = 0; i < signed_hits.size(); ++i) {
        right[i] = std::max(signed_hits[i], 0.0);
        left[i] = std::max(-signed_hits[i], 0.0);
    }
    return {summarize(right, dt), summarize(left, dt)};
}

}  // namespace monofollow
