#pragma once

#include "monofollow/reward_transform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace monofollow {

/// Grid certification of the hypotheses behind the barrier solution. Every
/// flag is reported; nothing is silently skipped.
struct AssumptionReport {
    bool R_differentiable = false;
    bool shape_ok = false;
    bool unique_root = false;
    bool sufficiency_ok = false;
    bool concavity_ok = false;
    bool drift_payoff_ok = false;
    bool sigma_bounded = false;

    /// "vacuous (k' = 0), v'' <= 0 checked directly", "decreasing ratio, D2 > 0"
    /// or "increasing ratio, D2 < 0" (D2 = psi'' - F(c) phi''), or "none".
    std::string concavity_route = "none";
    /// Root of (A - alpha) K(., b*) beyond b*: H is concave past F(j).
    double j_point = 0.0;
    double sigma_max = 0.0;
    std::vector<std::string> notes;

    bool all_ok() const noexcept {
        return R_differentiable && shape_ok && unique_root && sufficiency_ok && concavity_ok &&
               drift_payoff_ok && sigma_bounded;
    }
};

struct BarrierSolution {
    double b_star = 0.0;
    double beta_star = 0.0;
    double residual_at_b_star = 0.0;
    /// (|k| + |k'|) (|psi'| + |psi''| + |F(c)| (|phi'| + |phi''|)), for relative checks.
    double residual_scale = 0.0;
    double sufficiency_value = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    /// Golden-section maximizer of beta, kept for the agreement check.
    double argmax_beta = 0.0;
    std::vector<double> roots;
    std::optional<double> constrained_b;
    AssumptionReport assumption_report;
};

struct SearchConfig {
    int grid_n = 64;
    int refinements = 2;
    double merge_tol = 1e-8;
    double bisect_tol = 1e-13;
    double agreement_tol = 1e-6;
};

/// k'(b) psi'(b) - k(b) psi''(b) + F(c) (k(b) phi''(b) - k'(b) phi'(b)).
/// Equals beta'(b) (psi'(b) - F(c) phi'(b))^2.
double optimality_residual(const TransformContext& ctx, double b);
double optimality_residual_scale(const TransformContext& ctx, double b);

/// k'' psi' - k psi''' + F(c) (k phi''' - k'' phi'), all at b. The derivative
/// of the residual where it vanishes; negative at a strict maximum of beta.
double sufficiency_value(const TransformContext& ctx, double b);

/// Roots of the residual on (lo, hi): sign changes on an n-point geometric
/// grid (offsets from lo), each refined by bisection.
std::vector<double> residual_sign_changes(const TransformContext& ctx, double lo, double hi, int n,
                                          double bisect_tol = 1e-13);

/// Locates b*, checks it against a golden-section maximization of beta,
/// and certifies the hypotheses. Throws NoInteriorBarrierError,
/// UniquenessViolatedError or InternalConsistencyError.
BarrierSolution solve_barrier(const TransformContext& ctx, const SearchConfig& search = {});

/// b* if b* <= floor, the floor otherwise.
double solve_constrained(const BarrierSolution& solution, double floor);
double solve_constrained(const TransformContext& ctx, const BarrierSolution& solution);

AssumptionReport verify_proposition_hypotheses(const TransformContext& ctx,
                                               const BarrierSolution& solution);

struct DominanceReport {
    bool ok = true;
    /// Most negative W^{b*}(y) - W^b(y) found, scaled by the magnitudes.
    double worst_gap = 0.0;
    double worst_y = 0.0;
    double worst_b = 0.0;
    int n_y = 0;
    int n_b = 0;
};

/// W^{b*}(y) >= W^b(y) on n_y transformed points and n_b barriers in
/// (c, c + 3 (b* - c)], with relative slack 1e-12.
DominanceReport dominance_check(const TransformContext& ctx, double b_star, int n_y = 200,
                                int n_b = 50);

}  // namespace monofollow
