#include "monofollow/diffusion_model.hpp"

#include "monofollow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monofollow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double central_difference(const ScalarFn& fn, double x, double c) {
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    // Stay inside the state space near the absorbing end.
    if (x - h <= c) {
        const double step = std::max((x - c) * 0.5, 1e-12);
        return (fn(x + step) - fn(x)) / step;
    }
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

double sample_upper(double c, double d) {
    return std::isfinite(d) ? d : c + 100.0;
}

}  // namespace

DiffusionSpec::DiffusionSpec(ModelKind kind, ScalarFn mu, ScalarFn sigma, double c, double d,
                             ScalarFn mu_prime, ScalarFn variance_prime)
    : kind_(kind),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      mu_prime_(std::move(mu_prime)),
      variance_prime_(std::move(variance_prime)),
      c_(c),
      d_(d) {
    if (!(c_ < d_)) {
        throw DomainError("diffusion: left end must be below right end");
    }
    if (!mu_ || !sigma_) {
        throw ConstructionError("diffusion: drift and volatility callbacks are required");
    }
    const double top = sample_upper(c_, d_);
    constexpr int kSamples = 257;
    for (int i = 1; i < kSamples; ++i) {
        const double x = c_ + (top - c_) * i / kSamples;
        const double s = sigma_(x);
        if (!(s > 0.0)) {
            throw DomainError("diffusion: volatility must be positive on (c, d); sigma(" +
                              std::to_string(x) + ") = " + std::to_string(s));
        }
    }
}

DiffusionSpec DiffusionSpec::brownian_with_drift(double mu, double sigma, double c) {
    if (!(sigma > 0.0)) {
        throw DomainError("brownian_with_drift: sigma must be positive");
    }
    return DiffusionSpec(
        BrownianWithDrift{mu, sigma}, [mu](double) { return mu; },
        [sigma](double) { return sigma; }, c, kInf, [](double) { return 0.0; },
        [](double) { return 0.0; });
}

DiffusionSpec DiffusionSpec::square_root(double rho) {
    if (!(rho > 0.0)) {
        throw DomainError("square_root: rho must be positive");
    }
    return DiffusionSpec(
        SquareRoot{rho}, [rho](double x) { return 1.0 - 2.0 * rho * x; },
        [](double x) { return 2.0 * std::sqrt(std::max(x, 0.0)); }, 0.0, kInf,
        [rho](double) { return -2.0 * rho; }, [](double) { return 4.0; });
}

DiffusionSpec DiffusionSpec::custom(ScalarFn mu, ScalarFn sigma, double c, double d,
                                    ScalarFn mu_prime, ScalarFn variance_prime) {
    return DiffusionSpec(CustomModel{}, std::move(mu), std::move(sigma), c, d, std::move(mu_prime),
                         std::move(variance_prime));
}

double DiffusionSpec::drift_derivative(double x) const {
    if (mu_prime_) {
        return mu_prime_(x);
    }
    return central_difference(mu_, x, c_);
}

double DiffusionSpec::variance_derivative(double x) const {
    if (variance_prime_) {
        return variance_prime_(x);
    }
    return central_difference([this](double y) { return variance(y); }, x, c_);
}

std::string DiffusionSpec::kind_name() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, BrownianWithDrift>) {
                return "brownian_with_drift";
            } else if constexpr (std::is_same_v<T, SquareRoot>) {
                return "square_root";
            } else {
                return "custom";
            }
        },
        kind_);
}

DiffusionSpec DiffusionSpec::with_truncation(double d_trunc) const {
    if (!(d_trunc > c_ && d_trunc <= d_)) {
        throw DomainError("diffusion: truncation point must lie in (c, d]");
    }
    DiffusionSpec copy = *this;
    copy.truncation_ = d_trunc;
    return copy;
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

double Polynomial::derivative(double x) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 1;) {
        acc = acc * x + static_cast<double>(k) * coefficients[k];
    }
    return acc;
}

bool Polynomial::is_zero() const {
    return std::all_of(coefficients.begin(), coefficients.end(), [](double a) { return a == 0.0; });
}

Payoff::Payoff(ScalarFn f, ScalarFn f_prime, bool zero, std::optional<Polynomial> poly)
    : f_(std::move(f)), f_prime_(std::move(f_prime)), zero_(zero), poly_(std::move(poly)) {}

Payoff Payoff::zero() {
    return Payoff([](double) { return 0.0; }, [](double) { return 0.0; }, true, Polynomial{});
}

Payoff Payoff::polynomial(std::vector<double> coefficients) {
    Polynomial p{std::move(coefficients)};
    if (p.is_zero()) {
        return zero();
    }
    return Payoff([p](double x) { return p(x); }, [p](double x) { return p.derivative(x); }, false,
                  p);
}

Payoff Payoff::function(ScalarFn f, ScalarFn f_prime) {
    if (!f || !f_prime) {
        throw ConstructionError("payoff: value and derivative callbacks are required");
    }
    return Payoff(std::move(f), std::move(f_prime), false, std::nullopt);
}

ProblemSpec::ProblemSpec(DiffusionSpec diffusion, double alpha, Payoff payoff, double h,
                         std::optional<double> solvency_floor)
    : diffusion_(std::move(diffusion)),
      alpha_(alpha),
      payoff_(std::move(payoff)),
      h_(h),
      floor_(solvency_floor),
      truncation_(0.0) {
    if (!(alpha_ > 0.0)) {
        throw DomainError("problem: discount rate alpha must be positive");
    }
    if (!(h_ >= 0.0)) {
        throw DomainError("problem: marginal reward h must be non-negative");
    }
    if (floor_ && !diffusion_.in_open_interval(*floor_)) {
        throw DomainError("problem: solvency floor must lie in (c, d)");
    }
    truncation_ = truncation_point(diffusion_, alpha_);
}

LocalRates local_rates(const DiffusionSpec& spec, double alpha, double x) {
    const double a = 0.5 * spec.variance(x);
    const double mu = spec.drift(x);
    const double disc = std::sqrt(mu * mu + 4.0 * a * alpha);
    if (mu >= 0.0) {
        return {2.0 * alpha / (mu + disc), -(mu + disc) / (2.0 * a)};
    }
    return {(disc - mu) / (2.0 * a), -2.0 * alpha / (disc - mu)};
}

double truncation_point(const DiffusionSpec& spec, double alpha) {
    if (auto t = spec.truncation_override()) {
        return *t;
    }
    const double c = spec.left();
    const double d = spec.right();
    const double cap = std::isfinite(d) ? d - 1e-6 * (d - c) : kInf;
    const double start = std::isfinite(d) ? std::min(c + 1.0, c + 0.5 * (d - c)) : c + 1.0;
    const double log_ten_orders = std::log(1e10);

    double up = 0.0;
    double down = 0.0;
    double lo = start;
    for (int k = 1; k <= 40; ++k) {
        const double hi = std::min(c + std::ldexp(1.0, k), cap);
        if (hi > lo) {
            // Simpson on 64 panels.
            constexpr int n = 64;
            const double step = (hi - lo) / n;
            double su = 0.0;
            double sd = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                const auto r = local_rates(spec, alpha, lo + i * step);
                su += w * r.up;
                sd += w * r.down;
            }
            up += su * step / 3.0;
            down += sd * step / 3.0;
            lo = hi;
        }
        if (up >= log_ten_orders || -down >= log_ten_orders || hi >= cap) {
            return hi;
        }
    }
    return lo;
}

double generator_apply(const DiffusionSpec& spec, double alpha, double w, double w1, double w2,
                       double x) {
    if (!spec.in_open_interval(x)) {
        throw DomainError("generator_apply: x = " + std::to_string(x) + " outside (c, d)");
    }
    return spec.drift(x) * w1 + 0.5 * spec.variance(x) * w2 - alpha * w;
}

DriftPayoffReport drift_payoff_monotone_report(const ProblemSpec& problem, double b, int grid_n,
                                               std::optional<double> span) {
    const auto& spec = problem.diffusion();
    if (!spec.in_open_interval(b)) {
        throw DomainError("drift_payoff_monotone_report: b outside (c, d)");
    }
    if (grid_n < 2) {
        throw DomainError("drift_payoff_monotone_report: grid_n must be at least 2");
    }
    const double width = span.value_or(10.0 * (b - spec.left()));
    double top = b + width;
    if (top >= spec.right()) {
        top = spec.right() - 1e-9 * (spec.right() - spec.left());
    }

    std::vector<double> grid{b};
    const double first = 1e-6 * (top - b);
    for (int i = 1; i < grid_n; ++i) {
        const double frac = static_cast<double>(i - 1) / std::max(grid_n - 2, 1);
        grid.push_back(b + first * std::pow((top - b) / first, frac));
    }

    DriftPayoffReport report;
    const double mu_b = spec.drift(b);
    const double f_b = problem.payoff()(b);
    double worst_mu = 0.0;
    double worst_f = 0.0;
    for (double x : grid) {
        const double mu_excess = spec.drift(x) - mu_b - 1e-12 * (1.0 + std::abs(mu_b));
        if (mu_excess > worst_mu) {
            worst_mu = mu_excess;
            report.drift_max_at_b = false;
            report.drift_offender = x;
        }
        const double f_excess = problem.payoff()(x) - f_b - 1e-12 * (1.0 + std::abs(f_b));
        if (f_excess > worst_f) {
            worst_f = f_excess;
            report.payoff_max_at_b = false;
            report.payoff_offender = x;
        }
    }
    return report;
}

}  // namespace monofollow
