#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace monofollow::quad {

inline constexpr std::size_t kGaussOrder = 20;

/// Nodes and weights of the 20-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::array<double, kGaussOrder> nodes;
    std::array<double, kGaussOrder> weights;
};

const GaussLegendreRule& gauss_legendre_rule();

template <class F>
double gauss_legendre(F&& f, double a, double b) {
    const auto& rule = gauss_legendre_rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaussOrder; ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
};

namespace detail {

template <class F>
void adaptive_step(F& f, double a, double b, double whole, double tol, int depth, Result& acc) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_legendre(f, a, mid);
    const double right = gauss_legendre(f, mid, b);
    const double refined = left + right;
    const double err = std::abs(refined - whole);
    if (err <= tol || depth <= 0 || !std::isfinite(refined)) {
        acc.value += refined;
        acc.abs_error += err;
        if (err > tol || !std::isfinite(refined)) {
            acc.converged = false;
        }
        return;
    }
    adaptive_step(f, a, mid, left, 0.5 * tol, depth - 1, acc);
    adaptive_step(f, mid, b, right, 0.5 * tol, depth - 1, acc);
}

}  // namespace detail

/// Adaptive bisection with the 20-point Gauss-Legendre rule. A panel is
/// accepted when its two halves agree with the whole to the local tolerance.
template <class F>
Result adaptive_gauss_legendre(F&& f, double a, double b, double rel_tol, double abs_tol,
                               int max_depth = 48) {
    Result acc;
    if (a == b) {
        return acc;
    }
    const double whole = gauss_legendre(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    detail::adaptive_step(f, a, b, whole, tol, max_depth, acc);
    return acc;
}

}  // namespace monofollow::quad
