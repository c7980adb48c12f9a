#include "monofollow/special_functions.hpp"

#include "monofollow/errors.hpp"
#include "monofollow/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace monofollow {

namespace quad {

const GaussLegendreRule& gauss_legendre_rule() {
    static const GaussLegendreRule rule = [] {
        GaussLegendreRule r{};
        constexpr std::size_t n = kGaussOrder;
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            // Chebyshev-like starting guess, then Newton on P_n.
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::abs(step) < 1e-16) {
                    break;
                }
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.nodes[i] = -x;
            r.weights[i] = w;
            r.nodes[n - 1 - i] = x;
            r.weights[n - 1 - i] = w;
        }
        return r;
    }();
    return rule;
}

}  // namespace quad

double lanczos_gamma(double x) {
    static constexpr std::array<double, 9> kCoef = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        const double s = std::sin(std::numbers::pi * x);
        if (s == 0.0) {
            throw DomainError("gamma: pole at non-positive integer " + std::to_string(x));
        }
        return std::numbers::pi / (s * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double a = kCoef[0];
    const double t = x + 7.5;
    for (std::size_t i = 1; i < kCoef.size(); ++i) {
        a += kCoef[i] / (x + static_cast<double>(i));
    }
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

namespace {

constexpr double kRelTol = 1e-13;

// e^{-t^2} times the kernel, written so that no intermediate overflows
// before the (bounded) product.
double kernel_weight(double t, double z, HermiteKernel kernel) {
    switch (kernel) {
        case HermiteKernel::Plain:
            return std::exp(-t * t - 2.0 * t * z);
        case HermiteKernel::Odd: {
            const double az = std::abs(z);
            const double v = 0.5 * std::exp(-t * t + 2.0 * t * az) * -std::expm1(-4.0 * t * az);
            return z < 0.0 ? -v : v;
        }
        case HermiteKernel::Even: {
            const double az = std::abs(z);
            return 0.5 * std::exp(-t * t + 2.0 * t * az) * (1.0 + std::exp(-4.0 * t * az));
        }
    }
    return 0.0;
}

// int_0^inf e^{-t^2} t^{s-1} K(t) dt for s > 0.
double hermite_integral(double s, double z, HermiteKernel kernel) {
    if (z * z > 700.0) {
        throw DomainError("hermite: |z| = " + std::to_string(std::abs(z)) + " overflows double range");
    }
    const double peak = kernel == HermiteKernel::Plain ? std::max(0.0, -z) : std::abs(z);
    const double upper = std::max(1.0, peak + 10.0 + s);

    // Near zero: t = u^m with m*s an integer >= 5*s, so t^{s-1} dt becomes a
    // polynomial in u and the exponentials are at least C^5 in u.
    const double ms = std::ceil(5.0 * s);
    const double m = ms / s;
    const auto near_zero = [&](double u) {
        if (u <= 0.0) {
            return ms == 1.0 ? m * kernel_weight(0.0, z, kernel) : 0.0;
        }
        const double t = std::pow(u, m);
        return m * std::pow(u, ms - 1.0) * kernel_weight(t, z, kernel);
    };
    const auto body = [&](double t) { return std::pow(t, s - 1.0) * kernel_weight(t, z, kernel); };

    const int panels = static_cast<int>(std::ceil(upper - 1.0));
    const double width = panels > 0 ? (upper - 1.0) / panels : 0.0;

    double rough = quad::gauss_legendre(near_zero, 0.0, 1.0);
    for (int i = 0; i < panels; ++i) {
        rough += quad::gauss_legendre(body, 1.0 + i * width, 1.0 + (i + 1) * width);
    }
    const double abs_tol = kRelTol * std::abs(rough) / (panels + 1) + 1e-300;

    auto res = quad::adaptive_gauss_legendre(near_zero, 0.0, 1.0, kRelTol, abs_tol);
    bool ok = res.converged;
    double total = res.value;
    for (int i = 0; i < panels; ++i) {
        auto piece = quad::adaptive_gauss_legendre(body, 1.0 + i * width, 1.0 + (i + 1) * width,
                                                   kRelTol, abs_tol);
        ok = ok && piece.converged;
        total += piece.value;
    }
    if (!ok || !std::isfinite(total)) {
        throw IntegrabilityError("hermite: quadrature did not converge for order " +
                                 std::to_string(-s) + " at z = " + std::to_string(z));
    }
    return total;
}

}  // namespace

double hermite_negative_order(double nu, double z, HermiteKernel kernel) {
    if (!(nu < 0.0)) {
        throw DomainError("hermite: integral representation requires nu < 0, got " +
                          std::to_string(nu));
    }
    const double s = -nu;
    return hermite_integral(s, z, kernel) / lanczos_gamma(s);
}

double hermite_odd_part(double nu, double z) {
    return hermite_negative_order(nu, z, HermiteKernel::Odd);
}

double hermite_even_part(double nu, double z) {
    return hermite_negative_order(nu, z, HermiteKernel::Even);
}

HermiteEval::HermiteEval(double nu) : nu_(nu) {
    if (!(nu < 0.0)) {
        throw DomainError("HermiteEval: order must be negative, got " + std::to_string(nu));
    }
}

HermiteEval::Value HermiteEval::operator()(double z) const {
    return {hermite_negative_order(nu_, z), 2.0 * nu_ * hermite_negative_order(nu_ - 1.0, z)};
}

}  // namespace monofollow
