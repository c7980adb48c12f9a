#include "monofollow/reward_transform.hpp"

#include "monofollow/errors.hpp"
#include "monofollow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monofollow {

namespace {

constexpr int kPanels = 128;
constexpr double kRelTol = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Resolvent::Resolvent(const FundamentalPair& pair, const ProblemSpec& problem)
    : pair_(pair), problem_(problem) {
    c_ = problem.diffusion().left();
    top_ = problem.truncation();
    const Payoff& f = problem.payoff();
    trivial_ = f.identically_zero();
    if (trivial_) {
        return;
    }
    phi_c_ = pair.phi(c_).value;
    F_c_ = pair.psi(c_).value / phi_c_;
    accrual_ = f(c_) / problem.alpha();

    // Panels are uniform in s = sqrt(x - c), which removes the inverse square
    // root of phi / (a W) at a singular left end.
    const double s_top = std::sqrt(top_ - c_);
    nodes_.resize(kPanels + 1);
    for (int i = 0; i <= kPanels; ++i) {
        nodes_[i] = s_top * i / kPanels;
    }
    std::vector<double> crude[2];
    for (int which = 0; which < 2; ++which) {
        crude[which].resize(kPanels);
        double biggest = 0.0;
        for (int i = 0; i < kPanels; ++i) {
            crude[which][i] = quad::gauss_legendre(
                [&](double s) {
                    const auto v = integrands(s);
                    return which == 0 ? v.killed : v.decay;
                },
                nodes_[i], nodes_[i + 1]);
            biggest = std::max(biggest, std::abs(crude[which][i]));
        }
        abs_tol_[which] = 1e-15 * biggest;
    }

    std::vector<double> killed(kPanels);
    std::vector<double> decay(kPanels);
    for (int i = 0; i < kPanels; ++i) {
        killed[i] = partial(0, nodes_[i], nodes_[i + 1]);
        decay[i] = partial(1, nodes_[i], nodes_[i + 1]);
    }
    below_.assign(kPanels + 1, 0.0);
    above_.assign(kPanels + 1, 0.0);
    for (int i = 0; i < kPanels; ++i) {
        below_[i + 1] = below_[i] + killed[i];
    }
    above_[kPanels] = upper_tail();
    for (int i = kPanels; i-- > 0;) {
        above_[i] = above_[i + 1] + decay[i];
    }
}

// int_{d_trunc}^{d} phi f / (a W) dx. Past d_trunc the integrand is close to
// an exponential; its decay rate is -(log phi f / (a W))' with W' = -(mu / a) W.
double Resolvent::upper_tail() const {
    const auto& spec = problem_.diffusion();
    const double x = top_;
    const double f = problem_.payoff()(x);
    if (f == 0.0 || !(x < spec.right())) {
        return 0.0;
    }
    const Jet p = pair_.psi(x);
    const Jet q = pair_.phi(x);
    const double a = 0.5 * spec.variance(x);
    const double integrand = q.value * f / (a * (p.d1 * q.value - p.value * q.d1));
    const double rate = -q.d1 / q.value - problem_.payoff().derivative(x) / f +
                        0.5 * spec.variance_derivative(x) / a - spec.drift(x) / a;
    if (!(rate > 0.0)) {
        throw IntegrabilityError("resolvent: f phi / W does not decay beyond d_trunc = " +
                                 std::to_string(x));
    }
    const double span = spec.right() - x;
    return integrand / rate * (std::isfinite(span) ? -std::expm1(-rate * span) : 1.0);
}

Resolvent::Integrands Resolvent::integrands(double s) const {
    const double x = c_ + s * s;
    const Jet p = pair_.psi(x);
    const Jet q = pair_.phi(x);
    const double a = 0.5 * problem_.diffusion().variance(x);
    const double w = p.d1 * q.value - p.value * q.d1;
    const double weight = problem_.payoff()(x) / (a * w) * 2.0 * s;
    return {(p.value - F_c_ * q.value) * weight, q.value * weight};
}

double Resolvent::partial(int which, double s_lo, double s_hi) const {
    if (s_lo == s_hi) {
        return 0.0;
    }
    const auto r = quad::adaptive_gauss_legendre(
        [&](double s) {
            const auto v = integrands(s);
            return which == 0 ? v.killed : v.decay;
        },
        s_lo, s_hi, kRelTol, abs_tol_[which], 30);
    if (!r.converged || !std::isfinite(r.value)) {
        throw IntegrabilityError("resolvent: quadrature of f against the fundamental pair did not "
                                 "converge on [" + std::to_string(c_ + s_lo * s_lo) + ", " +
                                 std::to_string(c_ + s_hi * s_hi) +
                                 "]; is E int e^{-alpha s} |f(X_s)| ds finite?");
    }
    return r.value;
}

Jet Resolvent::operator()(double x) const {
    if (trivial_) {
        return {};
    }
    if (x < c_ || x > top_) {
        throw DomainError("resolvent: x = " + std::to_string(x) + " outside [c, d_trunc]");
    }
    const double s = std::sqrt(x - c_);
    const double width = nodes_[1];
    const int i = std::clamp(static_cast<int>(s / width), 0, kPanels - 1);
    const double I1 = below_[i] + partial(0, nodes_[i], s);
    const double I2 = above_[i + 1] + partial(1, s, nodes_[i + 1]);

    const Jet p = pair_.psi(x);
    const Jet q = pair_.phi(x);
    const double u1 = p.value - F_c_ * q.value;
    const double u1p = p.d1 - F_c_ * q.d1;
    Jet g;
    g.value = q.value * I1 + u1 * I2 + accrual_ * q.value / phi_c_;
    g.d1 = q.d1 * I1 + u1p * I2 + accrual_ * q.d1 / phi_c_;

    const auto& spec = problem_.diffusion();
    const double alpha = problem_.alpha();
    const double a = 0.5 * spec.variance(x);
    const double mu = spec.drift(x);
    const double f = problem_.payoff()(x);
    if (a == 0.0) {
        g.d2 = g.d3 = kNaN;
        return g;
    }
    g.d2 = (alpha * g.value - mu * g.d1 - f) / a;
    g.d3 = (-problem_.payoff().derivative(x) - (0.5 * spec.variance_derivative(x) + mu) * g.d2 -
            (spec.drift_derivative(x) - alpha) * g.d1) /
           a;
    return g;
}

TransformContext::TransformContext(FundamentalPair pair, ProblemSpec problem)
    : pair_(std::move(pair)), problem_(std::move(problem)) {
    const double c = problem_.diffusion().left();
    phi_c_ = pair_.phi(c).value;
    F_c_ = pair_.psi(c).value / phi_c_;
    resolvent_ = std::make_shared<const Resolvent>(pair_, problem_);
    l_c_ = resolvent_->trivial() ? 0.0 : -(*resolvent_)(c).value / phi_c_;
}

TransformContext make_context(const ProblemSpec& problem) {
    return TransformContext(make_fundamental_pair(problem), problem);
}

Jet resolvent_g(const TransformContext& ctx, double x) {
    return ctx.resolvent()(x);
}

Jet k_func(const TransformContext& ctx, double x) {
    const Jet g = ctx.resolvent()(x);
    const Jet q = ctx.pair().phi(x);
    const double l = ctx.l_c();
    return {ctx.h() - g.d1 - l * q.d1, -g.d2 - l * q.d2, -g.d3 - l * q.d3, kNaN};
}

double K_func(const TransformContext& ctx, double x, double y) {
    const Resolvent& g = ctx.resolvent();
    if (g.trivial()) {
        return ctx.h() * (x - y);
    }
    return ctx.h() * (x - y) - g(x).value + g(y).value;
}

double inverse_F(const TransformContext& ctx, double y) {
    const auto& pair = ctx.pair();
    const double c = ctx.c();
    const double top = ctx.truncation();
    const double F_top = pair.F(top);
    if (!(y >= ctx.F_c() * (1.0 - 1e-14)) || !(y <= F_top * (1.0 + 1e-14))) {
        throw DomainError("inverse_F: y = " + std::to_string(y) + " outside [F(c), F(d_trunc)]");
    }
    if (y <= ctx.F_c()) {
        return c;
    }
    if (y >= F_top) {
        return top;
    }
    const double log_y = std::log(y);
    double lo = c;
    double hi = top;
    double x = std::clamp(pair.normalization_point(), c, top);
    for (int iter = 0; iter < 200; ++iter) {
        const Jet p = pair.psi(x);
        const Jet q = pair.phi(x);
        const double G = std::log(p.value) - std::log(q.value) - log_y;
        if (G == 0.0) {
            return x;
        }
        if (G < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        const double slope = p.d1 / p.value - q.d1 / q.value;
        double next = x - G / slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
        if (std::abs(next - x) <= tol || hi - lo <= tol) {
            return next;
        }
        x = next;
    }
    return x;
}

double R_func(const TransformContext& ctx, double y, double b) {
    const double F_b = ctx.pair().F(b);
    if (y < F_b * (1.0 - 1e-12)) {
        throw DomainError("R_func: y below F(b)");
    }
    const double x = inverse_F(ctx, y);
    return K_func(ctx, x, b) / ctx.pair().phi(x).value;
}

double m_func(const TransformContext& ctx, double x, double b) {
    const Jet q = ctx.pair().phi(x);
    const Jet g = ctx.resolvent()(x);
    const double K = K_func(ctx, x, b);
    const double K1 = ctx.h() - g.d1;
    return (K1 * q.value - K * q.d1) / ctx.pair().wronskian(x);
}

double generator_of_K(const TransformContext& ctx, double x, double b) {
    const Jet g = ctx.resolvent()(x);
    const double K = K_func(ctx, x, b);
    return generator_apply(ctx.problem().diffusion(), ctx.problem().alpha(), K, ctx.h() - g.d1,
                           -g.d2, x);
}

int convexity_classifier(const TransformContext& ctx, double x, double b) {
    const double v = generator_of_K(ctx, x, b);
    return (v > 0.0) - (v < 0.0);
}

double slope_beta(const TransformContext& ctx, double b) {
    const double den = ctx.pair().psi(b).d1 - ctx.F_c() * ctx.pair().phi(b).d1;
    if (den == 0.0 || !std::isfinite(den)) {
        throw SingularityError("slope_beta: psi'(b) - F(c) phi'(b) vanishes at b = " +
                               std::to_string(b));
    }
    return k_func(ctx, b).value / den;
}

SlopeData slope_data(const TransformContext& ctx, double b) {
    SlopeData s;
    s.b = b;
    s.beta = slope_beta(ctx, b);
    s.F_b = ctx.pair().F(b);
    s.phi_b = ctx.pair().phi(b).value;
    s.level = s.beta * (s.F_b - ctx.F_c()) + ctx.l_c();
    return s;
}

double W_b_at(const TransformContext& ctx, const SlopeData& s, double y, double x) {
    if (y <= s.F_b) {
        return s.beta * (y - ctx.F_c()) + ctx.l_c();
    }
    return (K_func(ctx, x, s.b) + s.phi_b * s.level) / ctx.pair().phi(x).value;
}

double W_b(const TransformContext& ctx, double y, double b) {
    const SlopeData s = slope_data(ctx, b);
    if (y <= s.F_b) {
        if (y < ctx.F_c() * (1.0 - 1e-14)) {
            throw DomainError("W_b: y below F(c)");
        }
        return s.beta * (y - ctx.F_c()) + ctx.l_c();
    }
    return W_b_at(ctx, s, y, inverse_F(ctx, y));
}

double H_func(const TransformContext& ctx, double y, double b) {
    const SlopeData s = slope_data(ctx, b);
    const double x = inverse_F(ctx, y);
    return (K_func(ctx, x, b) + s.phi_b * s.level) / ctx.pair().phi(x).value;
}

double u_b(const TransformContext& ctx, double x, double b) {
    const SlopeData s = slope_data(ctx, b);
    if (x <= b) {
        const double F_x = ctx.pair().F(x);
        return ctx.pair().phi(x).value * (s.beta * (F_x - ctx.F_c()) + ctx.l_c());
    }
    return K_func(ctx, x, b) + s.phi_b * s.level;
}

std::vector<double> transformed_grid(const TransformContext& ctx, int n) {
    const double c = ctx.c();
    const double top = ctx.truncation();
    const double y_lo = ctx.pair().F(c + 1e-6 * (top - c));
    const double y_hi = ctx.pair().F(top);
    const double lo = std::log(y_lo);
    const double hi = std::log(y_hi);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * i / (n - 1));
    }
    // exp(log(y)) drifts by a few ulps; keep the ends exact
    grid.front() = y_lo;
    grid.back() = y_hi;
    return grid;
}

}  // namespace monofollow
