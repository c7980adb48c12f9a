#pragma once

#include "monofollow/diffusion_model.hpp"
#include "monofollow/fundamental_solutions.hpp"

#include <memory>
#include <vector>

namespace monofollow {

class Resolvent;

/// Everything the transform layer needs, built once per problem. Immutable
/// after construction and safe to share across threads.
class TransformContext {
public:
    TransformContext(FundamentalPair pair, ProblemSpec problem);

    const FundamentalPair& pair() const noexcept { return pair_; }
    const ProblemSpec& problem() const noexcept { return problem_; }

    double c() const noexcept { return problem_.diffusion().left(); }
    double truncation() const noexcept { return problem_.truncation(); }

    /// l_c = -g(c) / phi(c).
    double l_c() const noexcept { return l_c_; }
    double F_c() const noexcept { return F_c_; }
    double phi_c() const noexcept { return phi_c_; }
    double h() const noexcept { return problem_.h(); }

    const Resolvent& resolvent() const noexcept { return *resolvent_; }

private:
    FundamentalPair pair_;
    ProblemSpec problem_;
    std::shared_ptr<const Resolvent> resolvent_;
    double F_c_;
    double phi_c_;
    double l_c_;
};

TransformContext make_context(const ProblemSpec& problem);

/// g(x) = E^x int_0^inf e^{-alpha s} f(X_s) ds for the uncontrolled process
/// absorbed at c (f(c) keeps accruing after absorption). Solves
/// (A - alpha) g = -f. Built by variation of parameters against
/// u1 = psi - F(c) phi and phi, with panel integrals tabulated once.
class Resolvent {
public:
    Resolvent(const FundamentalPair& pair, const ProblemSpec& problem);

    /// (g, g', g'', g''') at x in [c, d_trunc]. Zero payoff short-circuits.
    /// g'' and g''' are NaN where the variance vanishes.
    Jet operator()(double x) const;
    bool trivial() const noexcept { return trivial_; }

private:
    struct Integrands {
        double killed;  // u1 f / (a W)
        double decay;   // phi f / (a W)
    };
    Integrands integrands(double s) const;
    double partial(int which, double s_lo, double s_hi) const;
    double upper_tail() const;

    FundamentalPair pair_;
    ProblemSpec problem_;
    bool trivial_ = true;
    double c_ = 0.0;
    double top_ = 0.0;
    double F_c_ = 0.0;
    double phi_c_ = 1.0;
    double accrual_ = 0.0;
    std::vector<double> nodes_;       // in s = sqrt(x - c)
    std::vector<double> below_;       // int_c^{node} killed
    std::vector<double> above_;       // int_{node}^{d} decay, tail beyond top estimated
    double abs_tol_[2] = {0.0, 0.0};
};

Jet resolvent_g(const TransformContext& ctx, double x);

/// k = h - g' - l_c phi', with k' and k''.
Jet k_func(const TransformContext& ctx, double x);

/// K(x, y) = h (x - y) - g(x) + g(y).
double K_func(const TransformContext& ctx, double x, double y);

/// x with F(x) = y, by bracketing and safeguarded Newton on log F.
double inverse_F(const TransformContext& ctx, double y);

/// R(y; b) = K(F^{-1}(y), b) / phi(F^{-1}(y)) for y >= F(b).
double R_func(const TransformContext& ctx, double y, double b);

/// m(x; b) = (K(., b) / phi)'(x) / F'(x).
double m_func(const TransformContext& ctx, double x, double b);

/// (A - alpha) K(., b) at x, computed from (K, K', K'').
double generator_of_K(const TransformContext& ctx, double x, double b);

/// Sign (-1, 0, +1) of (A - alpha) K(., b) at x; matches the sign of R''.
int convexity_classifier(const TransformContext& ctx, double x, double b);

/// beta(b) = k(b) / (psi'(b) - F(c) phi'(b)).
double slope_beta(const TransformContext& ctx, double b);

/// Quantities of W^b that do not depend on the evaluation point.
struct SlopeData {
    double b;
    double beta;
    double F_b;
    double phi_b;
    /// W^b(F(b)) = beta (F(b) - F(c)) + l_c.
    double level;
};
SlopeData slope_data(const TransformContext& ctx, double b);

/// W^b at the transformed coordinate y: linear below F(b), H(y, b) above.
double W_b(const TransformContext& ctx, double y, double b);
/// Same, with x = F^{-1}(y) already known.
double W_b_at(const TransformContext& ctx, const SlopeData& s, double y, double x);

/// H(y, b) = R(y; b) + phi(b) / phi(F^{-1}(y)) * W^b(F(b)).
double H_func(const TransformContext& ctx, double y, double b);

/// u^b(x) = phi(x) W^b(F(x)): reward of reflecting at b, net of g.
double u_b(const TransformContext& ctx, double x, double b);

/// Log-spaced grid in the transformed coordinate between F(c + delta) and
/// F(d_trunc), delta = 1e-6 (d_trunc - c).
std::vector<double> transformed_grid(const TransformContext& ctx, int n);

}  // namespace monofollow
