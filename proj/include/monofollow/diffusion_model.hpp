#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace monofollow {

using ScalarFn = std::function<double(double)>;

/// Value and first three derivatives of a scalar function at one point.
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

struct BrownianWithDrift {
    double mu;
    double sigma;
};

struct SquareRoot {
    double rho;
};

struct CustomModel {};

using ModelKind = std::variant<BrownianWithDrift, SquareRoot, CustomModel>;

/// Uncontrolled diffusion dX = mu(X) dt + sigma(X) dW on [c, d), with c
/// absorbing and d natural (d may be +infinity).
class DiffusionSpec {
public:
    static DiffusionSpec brownian_with_drift(double mu, double sigma = std::numbers::sqrt2,
                                             double c = 0.0);

    /// dX = (1 - 2 rho X) dt + 2 sqrt(X) dW on [0, inf).
    static DiffusionSpec square_root(double rho);

    /// Callbacks must be regular enough for the SDE to make sense; only sigma > 0
    /// is checked (on a sample grid). Missing derivative callbacks fall back to
    /// central differences.
    static DiffusionSpec custom(ScalarFn mu, ScalarFn sigma, double c, double d,
                                ScalarFn mu_prime = {}, ScalarFn variance_prime = {});

    double drift(double x) const { return mu_(x); }
    double volatility(double x) const { return sigma_(x); }
    double variance(double x) const {
        const double s = sigma_(x);
        return s * s;
    }
    double drift_derivative(double x) const;
    double variance_derivative(double x) const;

    double left() const noexcept { return c_; }
    double right() const noexcept { return d_; }
    bool in_open_interval(double x) const noexcept { return x > c_ && x < d_; }

    const ModelKind& kind() const noexcept { return kind_; }
    std::string kind_name() const;

    /// Explicit truncation point for grids on an infinite right end.
    std::optional<double> truncation_override() const noexcept { return truncation_; }
    DiffusionSpec with_truncation(double d_trunc) const;

private:
    DiffusionSpec(ModelKind kind, ScalarFn mu, ScalarFn sigma, double c, double d,
                  ScalarFn mu_prime, ScalarFn variance_prime);

    ModelKind kind_;
    ScalarFn mu_;
    ScalarFn sigma_;
    ScalarFn mu_prime_;
    ScalarFn variance_prime_;
    double c_;
    double d_;
    std::optional<double> truncation_;
};

/// Polynomial with coefficients in increasing degree.
struct Polynomial {
    std::vector<double> coefficients;

    double operator()(double x) const;
    double derivative(double x) const;
    bool is_zero() const;
};

/// Running payoff f together with its derivative.
class Payoff {
public:
    static Payoff zero();
    static Payoff polynomial(std::vector<double> coefficients);
    static Payoff function(ScalarFn f, ScalarFn f_prime);

    double operator()(double x) const { return f_(x); }
    double derivative(double x) const { return f_prime_(x); }
    bool identically_zero() const noexcept { return zero_; }
    const std::optional<Polynomial>& polynomial_form() const noexcept { return poly_; }

private:
    Payoff(ScalarFn f, ScalarFn f_prime, bool zero, std::optional<Polynomial> poly);

    ScalarFn f_;
    ScalarFn f_prime_;
    bool zero_;
    std::optional<Polynomial> poly_;
};

/// The control problem: maximize h * (discounted control) + discounted running payoff.
class ProblemSpec {
public:
    ProblemSpec(DiffusionSpec diffusion, double alpha, Payoff payoff, double h,
                std::optional<double> solvency_floor = std::nullopt);

    const DiffusionSpec& diffusion() const noexcept { return diffusion_; }
    double alpha() const noexcept { return alpha_; }
    const Payoff& payoff() const noexcept { return payoff_; }
    double h() const noexcept { return h_; }
    const std::optional<double>& solvency_floor() const noexcept { return floor_; }

    /// Right end used by every finite grid.
    double truncation() const noexcept { return truncation_; }

private:
    DiffusionSpec diffusion_;
    double alpha_;
    Payoff payoff_;
    double h_;
    std::optional<double> floor_;
    double truncation_;
};

/// Roots r_down < 0 < r_up of (sigma^2/2) r^2 + mu r - alpha = 0 at x; the
/// local exponential rates of the decreasing and increasing solutions.
struct LocalRates {
    double up;
    double down;
};
LocalRates local_rates(const DiffusionSpec& spec, double alpha, double x);

/// Default truncation of an infinite (or far) right end: the first point of
/// c + 2^k beyond which, on the local exponential rates integrated from c + 1,
/// the decreasing solution has lost ten orders of magnitude or the increasing
/// one has gained ten.
double truncation_point(const DiffusionSpec& spec, double alpha);

/// (A - alpha) w at x for the triple (w, w', w'').
double generator_apply(const DiffusionSpec& spec, double alpha, double w, double w1, double w2,
                       double x);

struct DriftPayoffReport {
    bool drift_max_at_b = true;
    bool payoff_max_at_b = true;
    std::optional<double> drift_offender;
    std::optional<double> payoff_offender;
    bool ok() const noexcept { return drift_max_at_b && payoff_max_at_b; }
};

/// Checks on a geometric grid over [b, min(d, b + span)) that mu and f are
/// maximized at b. span defaults to 10 (b - c).
DriftPayoffReport drift_payoff_monotone_report(const ProblemSpec& problem, double b, int grid_n,
                                               std::optional<double> span = std::nullopt);

}  // namespace monofollow
