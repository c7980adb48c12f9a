#pragma once

#include "monofollow/barrier_solver.hpp"
#include "monofollow/reward_transform.hpp"

#include <filesystem>
#include <limits>
#include <string>

namespace monofollow {

enum class Region { Continuation, Action };

const char* region_name(Region r);

/// v(x) = phi(x) (beta* (F(x) - F(c)) + l_c) + g(x) on [c, b*], continued
/// linearly with slope h above b*.
struct ValueFunction {
    double b_star = 0.0;
    double beta_star = 0.0;
    double l_c = 0.0;
    double F_c = 0.0;
    /// v0(b*), the continuation branch at the barrier.
    double v_at_b_star = 0.0;
};

/// Builds v for an arbitrary barrier b (slope beta(b)); with b = b* this is
/// the value function.
ValueFunction make_value_function(const TransformContext& ctx, double b);
ValueFunction make_value_function(const TransformContext& ctx, const BarrierSolution& solution);

struct ValuePoint {
    double v;
    double v1;
    double v2;
    Region region;
};

/// Two-branch evaluation on [c, d_trunc].
ValuePoint value_at(const TransformContext& ctx, const ValueFunction& vf, double x);

/// The continuation branch v0 and its derivatives at x, on either side of b*.
Jet continuation_branch(const TransformContext& ctx, const ValueFunction& vf, double x);

struct SmoothFitReport {
    double err1;  // |v0'(b) - h|
    double err2;  // |v0''(b)|
    /// max |v0''| over 200 points of (c, b]: the curvature scale of v.
    double scale2;
    double err2_scaled() const { return scale2 > 0.0 ? err2 / scale2 : err2; }
};
SmoothFitReport smooth_fit_report(const TransformContext& ctx, const ValueFunction& vf);

struct HjbReport {
    /// max |(A - alpha) v + f| over the continuation grid (c, b*].
    double equality_residual = 0.0;
    double equality_at = 0.0;
    /// max ((A - alpha) v + f)_+ over the action grid [b*, x_hi].
    double inequality_excess = 0.0;
    double inequality_at = 0.0;
    /// (A - alpha) v + f at b* from the right.
    double right_limit_at_b_star = 0.0;
    double action_hi = 0.0;
};
/// The action grid runs to min(d_trunc, max(3, b* + 10 (b* - c))).
HjbReport hjb_inequality_report(const TransformContext& ctx, const ValueFunction& vf, int grid_n);

struct ShapeReport {
    double max_v2 = -std::numeric_limits<double>::infinity();
    double min_v1_minus_h = std::numeric_limits<double>::infinity();
    double continuity_gap = 0.0;
};
/// v'' and v' - h over a uniform grid on (c, x_hi], plus |v(b*-) - v(b*+)|.
ShapeReport shape_report(const TransformContext& ctx, const ValueFunction& vf, int grid_n,
                         double x_hi);

/// Default right end of plotting grids: min(d_trunc, b* + 2 (b* - c)).
double export_upper(const TransformContext& ctx, const ValueFunction& vf);

/// Writes beta_curve.csv, value_curve.csv and transform_curve.csv into dir.
/// Throws IoError naming the path that could not be written.
void export_curves(const TransformContext& ctx, const ValueFunction& vf,
                   const std::filesystem::path& dir, int n = 400);

}  // namespace monofollow
