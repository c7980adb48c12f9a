#include "monofollow/commands.hpp"

#include "monofollow/errors.hpp"
#include "monofollow/value_function.hpp"

#include <cmath>
#include <fstream>

namespace monofollow {

namespace {

using nlohmann::json;

struct Solved {
    TransformContext ctx;
    BarrierSolution solution;
    ValueFunction vf;
};

Solved solve_all(const RunConfig& cfg) {
    TransformContext ctx = make_context(build_problem(cfg));
    BarrierSolution solution = solve_barrier(ctx, cfg.search);
    ValueFunction vf = make_value_function(ctx, solution);
    return {std::move(ctx), std::move(solution), vf};
}

json assumption_json(const AssumptionReport& a) {
    return {{"R_differentiable", a.R_differentiable},
            {"shape_ok", a.shape_ok},
            {"unique_root", a.unique_root},
            {"sufficiency_ok", a.sufficiency_ok},
            {"concavity_ok", a.concavity_ok},
            {"concavity_route", a.concavity_route},
            {"drift_payoff_ok", a.drift_payoff_ok},
            {"sigma_bounded", a.sigma_bounded},
            {"sigma_max", a.sigma_max},
            {"j_point", a.j_point},
            {"notes", a.notes},
            {"all_ok", a.all_ok()}};
}

json estimate_json(const SimEstimate& e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_paths", e.n_paths}, {"dt", e.dt}};
}

json failure(const RunConfig& cfg, const std::string& kind, const std::string& what) {
    return {{"status", "solver_failure"}, {"error", {{"kind", kind}, {"message", what}}},
            {"config", to_json(cfg)}};
}

}  // namespace

json solve_report(const RunConfig& cfg) {
    try {
        const Solved s = solve_all(cfg);
        const auto& sol = s.solution;
        const SmoothFitReport fit = smooth_fit_report(s.ctx, s.vf);
        const HjbReport hjb = hjb_inequality_report(s.ctx, s.vf, 200);
        const DominanceReport dom = dominance_check(s.ctx, sol.b_star);
        const ShapeReport shape = shape_report(s.ctx, s.vf, 400, export_upper(s.ctx, s.vf));

        const bool certified = sol.assumption_report.all_ok() && dom.ok;
        json out;
        out["status"] = certified ? "ok" : "hypothesis_failure";
        out["model"] = s.ctx.problem().diffusion().kind_name();
        out["b_star"] = sol.b_star;
        out["beta_star"] = sol.beta_star;
        out["residual"] = sol.residual_at_b_star;
        out["residual_scale"] = sol.residual_scale;
        out["sufficiency"] = sol.sufficiency_value;
        out["bracket"] = {sol.bracket_lo, sol.bracket_hi};
        out["argmax_beta"] = sol.argmax_beta;
        out["roots"] = sol.roots;
        out["l_c"] = s.ctx.l_c();
        out["F_c"] = s.ctx.F_c();
        out["d_trunc"] = s.ctx.truncation();
        out["v_at_b_star"] = s.vf.v_at_b_star;
        out["smooth_fit"] = {{"err1", fit.err1},
                             {"err2", fit.err2},
                             {"err2_scale", fit.scale2},
                             {"err2_scaled", fit.err2_scaled()}};
        out["hjb"] = {{"equality_residual", hjb.equality_residual},
                      {"equality_at", hjb.equality_at},
                      {"inequality_excess", hjb.inequality_excess},
                      {"inequality_at", hjb.inequality_at},
                      {"right_limit_at_b_star", hjb.right_limit_at_b_star},
                      {"action_grid_hi", hjb.action_hi}};
        out["dominance"] = {{"ok", dom.ok},
                            {"worst_gap", dom.worst_gap},
                            {"worst_y", dom.worst_y},
                            {"worst_b", dom.worst_b},
                            {"grid", {dom.n_y, dom.n_b}}};
        out["shape"] = {{"max_v2", shape.max_v2},
                        {"min_v1_minus_h", shape.min_v1_minus_h},
                        {"continuity_gap", shape.continuity_gap}};
        out["assumption_report"] = assumption_json(sol.assumption_report);
        out["constrained_b"] = sol.constrained_b ? json(*sol.constrained_b) : json(nullptr);
        out["config"] = to_json(cfg);
        return out;
    } catch (const UniquenessViolatedError& e) {
        json out = failure(cfg, "uniqueness_violated", e.what());
        out["error"]["roots"] = e.roots();
        return out;
    } catch (const NoInteriorBarrierError& e) {
        return failure(cfg, "no_interior_barrier", e.what());
    } catch (const InternalConsistencyError& e) {
        return failure(cfg, "internal_consistency", e.what());
    } catch (const IntegrabilityError& e) {
        return failure(cfg, "integrability", e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        return failure(cfg, "numerical", e.what());
    }
}

int exit_code_of(const json& report) {
    const std::string status = report.value("status", "solver_failure");
    if (status == "ok") return exit_code::ok;
    if (status == "hypothesis_failure") return exit_code::hypothesis_failure;
    return exit_code::solver_failure;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("error while writing " + path.string());
    }
}

int cmd_solve(const RunConfig& cfg, const std::filesystem::path& out) {
    const json report = solve_report(cfg);
    write_json(out / "solution.json", report);
    return exit_code_of(report);
}

int cmd_curves(const RunConfig& cfg, const std::filesystem::path& out) {
    Solved s = [&] {
        try {
            return solve_all(cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            write_json(out / "solution.json", solve_report(cfg));
            throw;
        }
    }();
    export_curves(s.ctx, s.vf, out);
    return s.solution.assumption_report.all_ok() ? exit_code::ok : exit_code::hypothesis_failure;
}

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
    json report;
    Solved s = [&] {
        try {
            return solve_all(cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            write_json(out / "sim_report.json", {{"status", "solver_failure"}, {"error", e.what()}});
            throw;
        }
    }();
    const ProblemSpec& problem = s.ctx.problem();
    const SimulationSettings& set = cfg.simulation;
    const SimConfig& sim = set.sim;
    const double c = s.ctx.c();
    const double b_star = s.solution.b_star;
    const double bias = 2.0 * std::sqrt(sim.dt);
    const int pps = sim.antithetic ? 2 : 1;
    bool all_pass = true;

    json agreement = json::array();
    for (double x0 : set.x0) {
        if (!(x0 > c && x0 < s.ctx.truncation())) {
            throw ConfigError("sim.x0: " + std::to_string(x0) + " outside (c, d_trunc)");
        }
        const SimEstimate est = simulate_reflected_reward(x0, b_star, problem, sim);
        const double v = value_at(s.ctx, s.vf, x0).v;
        const double delta = est.mean - v;
        const double allowance = 3.0 * est.std_error + bias;
        const bool pass = std::abs(delta) <= allowance;
        all_pass = all_pass && pass;
        agreement.push_back({{"x0", x0},
                             {"analytic", v},
                             {"estimate", estimate_json(est)},
                             {"delta", delta},
                             {"z", est.std_error > 0.0 ? delta / est.std_error : 0.0},
                             {"allowance", allowance},
                             {"pass", pass}});
    }
    report["value_agreement"] = agreement;

    const double probe = set.probe_x0.value_or(set.x0[set.x0.size() / 2]);
    const std::vector<double> at_best = reflected_reward_samples(probe, b_star, problem, sim);
    const SimEstimate best = summarize(at_best, sim.dt, pps);
    json perturbed = json::array();
    bool dominated = true;
    for (double sign : {-1.0, 1.0}) {
        const double b = b_star + sign * set.perturbation;
        if (!(b > c && b < s.ctx.truncation())) {
            continue;
        }
        const std::vector<double> other = reflected_reward_samples(probe, b, problem, sim);
        const SimEstimate est = summarize(other, sim.dt, pps);
        const SimEstimate diff = paired_difference(at_best, other, sim.dt, pps);
        const double joint = std::hypot(best.std_error, est.std_error);
        const bool lower = diff.mean > 2.0 * diff.std_error;
        dominated = dominated && lower;
        perturbed.push_back({{"b", b},
                             {"estimate", estimate_json(est)},
                             {"paired_difference", estimate_json(diff)},
                             {"independent_joint_std_error", joint},
                             {"dominated", lower}});
    }
    const double a = b_star + 0.3;
    json threshold = nullptr;
    if (a < s.ctx.truncation()) {
        const std::vector<double> impulse = threshold_reward_samples(probe, b_star, a, problem, sim);
        const SimEstimate diff = paired_difference(at_best, impulse, sim.dt, pps);
        const bool ok = diff.mean > -2.0 * diff.std_error;
        dominated = dominated && ok;
        threshold = {{"a", a},
                     {"estimate", estimate_json(summarize(impulse, sim.dt, pps))},
                     {"paired_difference", estimate_json(diff)},
                     {"not_better", ok}};
    }
    all_pass = all_pass && dominated;
    report["suboptimality_probe"] = {{"x0", probe},
                                     {"b_star_estimate", estimate_json(best)},
                                     {"perturbed", perturbed},
                                     {"threshold", threshold},
                                     {"suboptimal barriers dominated", dominated}};

    const double l = set.hit_l.value_or(c);
    const double x = set.hit_x.value_or(c + 0.5);
    const double r = set.hit_r.value_or(c + 1.0);
    const auto [right, left] = hitting_transform_mc(x, l, r, problem.diffusion(), problem.alpha(), sim);
    const HittingTransforms exact = two_sided_hitting_transform(s.ctx.pair(), l, x, r);
    const double allow_r = 3.0 * right.std_error + std::sqrt(sim.dt);
    const double allow_l = 3.0 * left.std_error + std::sqrt(sim.dt);
    const bool hit_pass = std::abs(right.mean - exact.right) <= allow_r &&
                          std::abs(left.mean - exact.left) <= allow_l;
    all_pass = all_pass && hit_pass;
    report["hitting_transform"] = {{"l", l},
                                   {"x", x},
                                   {"r", r},
                                   {"right", {{"analytic", exact.right}, {"estimate", estimate_json(right)}}},
                                   {"left", {{"analytic", exact.left}, {"estimate", estimate_json(left)}}},
                                   {"pass", hit_pass}};

    report["b_star"] = b_star;
    report["bias_allowance"] = bias;
    report["status"] = all_pass ? "pass" : "fail";
    report["config"] = to_json(cfg);
    write_json(out / "sim_report.json", report);
    return all_pass ? exit_code::ok : exit_code::hypothesis_failure;
}

int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out) {
    const auto path = out / "solution.json";
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string() + "; run solve first");
    }
    json stored;
    try {
        in >> stored;
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    const json fresh = solve_report(cfg);
    json mismatches = json::array();
    for (const auto& [key, value] : fresh.items()) {
        if (!stored.contains(key) || stored.at(key) != value) {
            mismatches.push_back(key);
        }
    }
    for (const auto& [key, value] : stored.items()) {
        if (!fresh.contains(key)) {
            mismatches.push_back(key);
        }
    }
    const bool identical = mismatches.empty();
    write_json(out / "verify_report.json",
               {{"identical", identical}, {"mismatches", mismatches}, {"status", fresh["status"]}});
    if (!identical) {
        return exit_code::solver_failure;
    }
    return exit_code_of(fresh);
}

}  // namespace monofollow
