#include "monofollow/value_function.hpp"

#include "monofollow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace monofollow {

namespace {

// a * b with 0 * inf read as 0: zero coefficients of infinite derivatives at
// a singular left end contribute nothing.
double times(double a, double b) {
    return a == 0.0 ? 0.0 : a * b;
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_csv(const std::filesystem::path& path, const char* header) {
    File f(std::fopen(path.c_str(), "w"));
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    std::fprintf(f.get(), "%s\n", header);
    return f;
}

void finish(File& f, const std::filesystem::path& path) {
    if (std::ferror(f.get()) || std::fclose(f.release()) != 0) {
        throw IoError("error while writing " + path.string());
    }
}

}  // namespace

const char* region_name(Region r) {
    return r == Region::Continuation ? "continuation" : "action";
}

ValueFunction make_value_function(const TransformContext& ctx, double b) {
    ValueFunction vf;
    vf.b_star = b;
    vf.beta_star = slope_beta(ctx, b);
    vf.l_c = ctx.l_c();
    vf.F_c = ctx.F_c();
    vf.v_at_b_star = continuation_branch(ctx, vf, b).value;
    return vf;
}

ValueFunction make_value_function(const TransformContext& ctx, const BarrierSolution& solution) {
    return make_value_function(ctx, solution.b_star);
}

Jet continuation_branch(const TransformContext& ctx, const ValueFunction& vf, double x) {
    const Jet p = ctx.pair().psi(x);
    const Jet q = ctx.pair().phi(x);
    const Jet g = ctx.resolvent()(x);
    const double beta = vf.beta_star;
    const double Fc = vf.F_c;
    const double l = vf.l_c;
    Jet v;
    v.value = beta * (p.value - Fc * q.value) + l * q.value + g.value;
    if (x == ctx.c()) {
        // psi - F(c) phi and l_c phi + g both vanish at c by construction.
        v.value = 0.0;
    }
    v.d1 = beta * (p.d1 - times(Fc, q.d1)) + times(l, q.d1) + g.d1;
    v.d2 = beta * (p.d2 - times(Fc, q.d2)) + times(l, q.d2) + g.d2;
    v.d3 = beta * (p.d3 - times(Fc, q.d3)) + times(l, q.d3) + g.d3;
    return v;
}

ValuePoint value_at(const TransformContext& ctx, const ValueFunction& vf, double x) {
    if (x < ctx.c() || x > ctx.truncation()) {
        throw DomainError("value_at: x = " + std::to_string(x) + " outside [c, d_trunc]");
    }
    if (x < vf.b_star) {
        const Jet v = continuation_branch(ctx, vf, x);
        return {v.value, v.d1, v.d2, Region::Continuation};
    }
    return {ctx.h() * (x - vf.b_star) + vf.v_at_b_star, ctx.h(), 0.0, Region::Action};
}

SmoothFitReport smooth_fit_report(const TransformContext& ctx, const ValueFunction& vf) {
    const double b = vf.b_star;
    const Jet v = continuation_branch(ctx, vf, b);
    SmoothFitReport rep;
    rep.err1 = std::abs(v.d1 - ctx.h());
    rep.err2 = std::abs(v.d2);
    rep.scale2 = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double x = ctx.c() + (b - ctx.c()) * i / 200.0;
        rep.scale2 = std::max(rep.scale2, std::abs(continuation_branch(ctx, vf, x).d2));
    }
    return rep;
}

HjbReport hjb_inequality_report(const TransformContext& ctx, const ValueFunction& vf, int grid_n) {
    if (grid_n < 2) {
        throw DomainError("hjb_inequality_report: grid_n must be at least 2");
    }
    const auto& spec = ctx.problem().diffusion();
    const auto& f = ctx.problem().payoff();
    const double alpha = ctx.problem().alpha();
    const double c = ctx.c();
    const double b = vf.b_star;

    HjbReport rep;
    for (int i = 1; i <= grid_n; ++i) {
        const double x = c + (b - c) * i / grid_n;
        const Jet v = continuation_branch(ctx, vf, x);
        const double r = std::abs(generator_apply(spec, alpha, v.value, v.d1, v.d2, x) + f(x));
        if (r > rep.equality_residual || !std::isfinite(r)) {
            rep.equality_residual = r;
            rep.equality_at = x;
        }
    }

    rep.action_hi = std::min(ctx.truncation(), std::max(3.0, b + 10.0 * (b - c)));
    rep.inequality_at = b;
    for (int i = 0; i < grid_n; ++i) {
        const double x = b + (rep.action_hi - b) * i / (grid_n - 1);
        const double v = ctx.h() * (x - b) + vf.v_at_b_star;
        const double r = generator_apply(spec, alpha, v, ctx.h(), 0.0, x) + f(x);
        if (i == 0) {
            rep.right_limit_at_b_star = r;
        }
        if (r > rep.inequality_excess || !std::isfinite(r)) {
            rep.inequality_excess = r;
            rep.inequality_at = x;
        }
    }
    return rep;
}

ShapeReport shape_report(const TransformContext& ctx, const ValueFunction& vf, int grid_n,
                         double x_hi) {
    const double c = ctx.c();
    ShapeReport rep;
    for (int i = 1; i <= grid_n; ++i) {
        const double x = c + (x_hi - c) * i / grid_n;
        const ValuePoint v = value_at(ctx, vf, x);
        rep.max_v2 = std::max(rep.max_v2, v.v2);
        rep.min_v1_minus_h = std::min(rep.min_v1_minus_h, v.v1 - ctx.h());
    }
    rep.continuity_gap =
        std::abs(continuation_branch(ctx, vf, vf.b_star).value - value_at(ctx, vf, vf.b_star).v);
    return rep;
}

double export_upper(const TransformContext& ctx, const ValueFunction& vf) {
    return std::min(ctx.truncation(), vf.b_star + 2.0 * (vf.b_star - ctx.c()));
}

void export_curves(const TransformContext& ctx, const ValueFunction& vf,
                   const std::filesystem::path& dir, int n) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    const double c = ctx.c();
    const double hi = export_upper(ctx, vf);

    const auto beta_path = dir / "beta_curve.csv";
    File beta = open_csv(beta_path, "b,beta");
    for (int i = 1; i <= n; ++i) {
        const double b = c + (hi - c) * i / n;
        std::fprintf(beta.get(), "%.17g,%.17g\n", b, slope_beta(ctx, b));
    }
    finish(beta, beta_path);

    const auto value_path = dir / "value_curve.csv";
    File value = open_csv(value_path, "x,v,v1,v2,region");
    const auto transform_path = dir / "transform_curve.csv";
    File transform = open_csv(transform_path, "y,W_bstar,obstacle");
    const SlopeData s = slope_data(ctx, vf.b_star);
    for (int i = 0; i < n; ++i) {
        const double x = c + (hi - c) * i / (n - 1);
        const ValuePoint v = value_at(ctx, vf, x);
        std::fprintf(value.get(), "%.17g,%.17g,%.17g,%.17g,%s\n", x, v.v, v.v1, v.v2,
                     region_name(v.region));

        const double y = ctx.pair().F(x);
        const double phi = ctx.pair().phi(x).value;
        const double obstacle = (K_func(ctx, x, vf.b_star) + s.phi_b * s.level) / phi;
        const double w = x <= vf.b_star ? s.beta * (y - ctx.F_c()) + ctx.l_c() : obstacle;
        std::fprintf(transform.get(), "%.17g,%.17g,%.17g\n", y, w, obstacle);
    }
    finish(value, value_path);
    finish(transform, transform_path);
}

}  // namespace monofollow
