#include "monofollow/fundamental_solutions.hpp"

#include "monofollow/errors.hpp"
#include "monofollow/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace monofollow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

FundamentalPair::FundamentalPair(Evaluator psi, Evaluator phi, double normalization_point,
                                 double left, std::string label)
    : psi_(std::move(psi)),
      phi_(std::move(phi)),
      anchor_(normalization_point),
      left_(left),
      label_(std::move(label)) {}

double FundamentalPair::F(double x) const {
    return psi_(x).value / phi_(x).value;
}

double FundamentalPair::wronskian(double x) const {
    const Jet p = psi_(x);
    const Jet q = phi_(x);
    return p.d1 * q.value - p.value * q.d1;
}

double FundamentalPair::F_prime(double x) const {
    const Jet p = psi_(x);
    const Jet q = phi_(x);
    return (p.d1 * q.value - p.value * q.d1) / (q.value * q.value);
}

BrownianExponents brownian_exponents(double mu, double alpha, double sigma) {
    const double a = 0.5 * sigma * sigma;
    const double delta = std::sqrt(mu * mu + 4.0 * a * alpha) / (2.0 * a);
    const double shift = -mu / (2.0 * a);
    return {shift + delta, shift - delta, delta};
}

FundamentalPair brownian_pair(double mu, double alpha, double sigma, double left) {
    if (!(alpha > 0.0)) {
        throw DomainError("brownian_pair: alpha must be positive");
    }
    const auto e = brownian_exponents(mu, alpha, sigma);
    const auto exponential = [](double r) {
        return [r](double x) {
            const double v = std::exp(r * x);
            return Jet{v, r * v, r * r * v, r * r * r * v};
        };
    };
    return FundamentalPair(exponential(e.up), exponential(e.down), 0.0, left,
                           "brownian_with_drift");
}

double squareroot_psi_scale(double rho, double alpha) {
    const double ratio = alpha / rho;
    return lanczos_gamma(0.5 * (1.0 + ratio)) / (2.0 * std::sqrt(std::numbers::pi)) *
           std::pow(2.0 * rho, 0.25) * std::pow(2.0, 0.5 * ratio);
}

std::pair<double, double> derivative_recurrences(const DiffusionSpec& spec, double alpha, double x,
                                                 double w, double w1) {
    const double var = spec.variance(x);
    if (!(var > 0.0)) {
        throw SingularityError("derivative_recurrences: sigma vanishes at x = " + std::to_string(x));
    }
    const double a = 0.5 * var;
    const double mu = spec.drift(x);
    const double w2 = (alpha * w - mu * w1) / a;
    const double w3 =
        ((alpha - spec.drift_derivative(x)) * w1 - (0.5 * spec.variance_derivative(x) + mu) * w2) / a;
    return {w2, w3};
}

FundamentalPair squareroot_pair(double rho, double alpha) {
    if (!(rho > 0.0) || !(alpha > 0.0)) {
        throw DomainError("squareroot_pair: rho and alpha must be positive");
    }
    const double nu = -alpha / rho;
    const double scale = squareroot_psi_scale(rho, alpha);
    const DiffusionSpec spec = DiffusionSpec::square_root(rho);

    auto psi = [=](double x) {
        if (x < 0.0) {
            throw DomainError("squareroot_pair: x = " + std::to_string(x) + " below 0");
        }
        if (x == 0.0) {
            return Jet{0.0, kInf, -kInf, kInf};
        }
        const double z = std::sqrt(rho * x);
        const double value = 2.0 * scale * hermite_odd_part(nu, z);
        // d/dx [H(-z) - H(z)] = -2 nu (H_{nu-1}(-z) + H_{nu-1}(z)) * rho / (2 z)
        const double d1 = -2.0 * nu * rho * scale * hermite_even_part(nu - 1.0, z) / z;
        const auto [d2, d3] = derivative_recurrences(spec, alpha, x, value, d1);
        return Jet{value, d1, d2, d3};
    };
    auto phi = [=](double x) {
        if (x < 0.0) {
            throw DomainError("squareroot_pair: x = " + std::to_string(x) + " below 0");
        }
        if (x == 0.0) {
            return Jet{hermite_negative_order(nu, 0.0), -kInf, kInf, -kInf};
        }
        const double z = std::sqrt(rho * x);
        const double value = hermite_negative_order(nu, z);
        const double d1 = nu * rho * hermite_negative_order(nu - 1.0, z) / z;
        const auto [d2, d3] = derivative_recurrences(spec, alpha, x, value, d1);
        return Jet{value, d1, d2, d3};
    };
    return FundamentalPair(psi, phi, 0.5 / rho, 0.0, "square_root");
}

FundamentalPair make_fundamental_pair(const ProblemSpec& problem) {
    const auto& spec = problem.diffusion();
    if (const auto* bm = std::get_if<BrownianWithDrift>(&spec.kind())) {
        return brownian_pair(bm->mu, problem.alpha(), bm->sigma, spec.left());
    }
    if (const auto* sr = std::get_if<SquareRoot>(&spec.kind())) {
        return squareroot_pair(sr->rho, problem.alpha());
    }
    CustomPairOptions options;
    options.truncation = problem.truncation();
    return custom_pair_numeric(spec, problem.alpha(), options);
}

HittingTransforms two_sided_hitting_transform(const FundamentalPair& pair, double l, double x,
                                              double r) {
    if (!(l < r) || x < l || x > r) {
        throw DomainError("two_sided_hitting_transform: need l <= x <= r with l < r");
    }
    const double psi_l = pair.psi(l).value;
    const double phi_l = pair.phi(l).value;
    const double psi_r = pair.psi(r).value;
    const double phi_r = pair.phi(r).value;
    const double psi_x = pair.psi(x).value;
    const double phi_x = pair.phi(x).value;
    const double den = psi_l * phi_r - psi_r * phi_l;
    return {(psi_l * phi_x - psi_x * phi_l) / den, (psi_x * phi_r - psi_r * phi_x) / den};
}

}  // namespace monofollow
