#pragma once

#include "monofollow/diffusion_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace monofollow {

/// The increasing (psi) and decreasing (phi) positive solutions of
/// (A - alpha) w = 0, each returned with derivatives up to third order.
/// Immutable; evaluators are pure and may be shared across threads.
class FundamentalPair {
public:
    using Evaluator = std::function<Jet(double)>;

    FundamentalPair(Evaluator psi, Evaluator phi, double normalization_point, double left,
                    std::string label);

    Jet psi(double x) const { return psi_(x); }
    Jet phi(double x) const { return phi_(x); }

    /// F = psi / phi, increasing.
    double F(double x) const;
    /// F' = W / phi^2 with W the Wronskian below.
    double F_prime(double x) const;
    /// psi' phi - psi phi' (positive).
    double wronskian(double x) const;

    double normalization_point() const noexcept { return anchor_; }
    double left() const noexcept { return left_; }
    const std::string& label() const noexcept { return label_; }

private:
    Evaluator psi_;
    Evaluator phi_;
    double anchor_;
    double left_;
    std::string label_;
};

/// Exponents of e^{r x} solving (sigma^2/2) r^2 + mu r - alpha = 0. With
/// sigma = sqrt(2): up = -mu/2 + delta, down = -mu/2 - delta,
/// delta = sqrt((mu/2)^2 + alpha).
struct BrownianExponents {
    double up;
    double down;
    double delta;
};
BrownianExponents brownian_exponents(double mu, double alpha, double sigma = std::numbers::sqrt2);

/// psi = e^{up x}, phi = e^{down x}; F(0) = 1.
FundamentalPair brownian_pair(double mu, double alpha, double sigma = std::numbers::sqrt2,
                              double left = 0.0);

/// Positive constant multiplying H_nu(-sqrt(rho x)) - H_nu(sqrt(rho x)) in psi
/// for the square-root model (nu = -alpha / rho):
///   Gamma((1 + alpha/rho) / 2) / (2 sqrt(pi)) * (2 rho)^(1/4) * 2^(alpha / (2 rho)).
double squareroot_psi_scale(double rho, double alpha);

/// psi(x) = C (H_nu(-z) - H_nu(z)), phi(x) = H_nu(z), z = sqrt(rho x),
/// nu = -alpha/rho, C = squareroot_psi_scale. First derivatives come from
/// H'_nu = 2 nu H_{nu-1}; second and third from the ODE recurrences.
FundamentalPair squareroot_pair(double rho, double alpha);

/// Second and third derivatives of a solution of (A - alpha) w = 0 from its
/// value and first derivative:
///   w''  = 2 (alpha w - mu w') / sigma^2
///   w''' = ((alpha - mu') w' - ((sigma^2)'/2 + mu) w'') / (sigma^2 / 2)
/// Throws SingularityError where sigma vanishes.
std::pair<double, double> derivative_recurrences(const DiffusionSpec& spec, double alpha, double x,
                                                 double w, double w1);

struct CustomPairOptions {
    /// Defaults to c + 1 (or a quarter of the way to the truncation point on short intervals).
    std::optional<double> anchor;
    /// Defaults to truncation_point(spec, alpha).
    std::optional<double> truncation;
    double rel_tol = 1e-12;
    int monotonicity_grid = 200;
};

/// Numerical pair for a generic model. psi is integrated forward from the
/// left end (seeded with the local increasing exponential at a regular end,
/// or with the vanishing Frobenius branch at a singular end) and phi backward
/// from the truncation point (seeded with the local decreasing exponential).
/// Both are normalized to 1 at the anchor. Throws ConstructionError
/// "fundamental-solution branch separation failed" if the result is not
/// monotone on a grid.
FundamentalPair custom_pair_numeric(const DiffusionSpec& spec, double alpha,
                                    const CustomPairOptions& options = {});

/// Closed form for the built-in models, numeric otherwise.
FundamentalPair make_fundamental_pair(const ProblemSpec& problem);

/// E^x[e^{-alpha tau_r}; tau_r < tau_l] and E^x[e^{-alpha tau_l}; tau_l < tau_r].
struct HittingTransforms {
    double right;
    double left;
};
HittingTransforms two_sided_hitting_transform(const FundamentalPair& pair, double l, double x,
                                              double r);

}  // namespace monofollow
