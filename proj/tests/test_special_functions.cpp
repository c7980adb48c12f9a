#include "doctest.h"

#include "monofollow/errors.hpp"
#include "monofollow/special_functions.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace monofollow;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Independent route to H_nu(z): tanh-sinh on the untransformed integral.
double hermite_tanh_sinh(double nu, double z) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const auto integrand = [&](double t) {
        return std::exp(-t * t - 2.0 * t * z) * std::pow(t, -nu - 1.0);
    };
    const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
    return value / std::tgamma(-nu);
}

}  // namespace

TEST_CASE("lanczos gamma agrees with std::tgamma") {
    for (double x : {0.05, 0.2, 0.5, 0.6, 1.0, 1.2, 2.5, 3.7, 6.0, 9.75}) {
        CHECK(rel_err(lanczos_gamma(x), std::tgamma(x)) < 1e-13);
    }
    // reflection branch
    for (double x : {-0.2, -1.2, -2.5}) {
        CHECK(rel_err(lanczos_gamma(x), std::tgamma(x)) < 1e-12);
    }
}

TEST_CASE("Hermite values against high-precision references") {
    // 50-digit references, rounded to double
    struct Ref {
        double nu, z, value;
    };
    const Ref refs[] = {
        {-0.2, 1.0, 0.837952976802686},
        {-1.0, 0.0, 0.886226925452758},
        {-1.2, 0.5, 0.465883185141230},
        {-0.2, -3.0, 1362.848614526611},
        {-1.2, -3.0, 19391.89716200768},
    };
    for (const auto& r : refs) {
        CAPTURE(r.nu);
        CAPTURE(r.z);
        CHECK(rel_err(hermite_negative_order(r.nu, r.z), r.value) < 1e-10);
    }
    // H_nu(0) = 2^nu sqrt(pi) / Gamma((1 - nu) / 2)
    const double at_zero = std::pow(2.0, -0.2) * std::sqrt(std::numbers::pi) / std::tgamma(0.6);
    CHECK(rel_err(hermite_negative_order(-0.2, 0.0), at_zero) < 1e-12);
    CHECK(rel_err(at_zero, 1.036139356454661) < 1e-14);
}

TEST_CASE("Hermite quadrature agrees with tanh-sinh") {
    for (double nu : {-0.2, -0.7, -1.2, -2.0}) {
        for (double z : {-2.0, -0.5, 0.0, 0.3, 1.5, 4.0}) {
            CAPTURE(nu);
            CAPTURE(z);
            CHECK(rel_err(hermite_negative_order(nu, z), hermite_tanh_sinh(nu, z)) < 1e-9);
        }
    }
}

TEST_CASE("odd and even parts") {
    const double nu = -0.2;
    const double z = std::sqrt(0.3);
    const double plus = hermite_negative_order(nu, z);
    const double minus = hermite_negative_order(nu, -z);
    CHECK(rel_err(hermite_odd_part(nu, z), 0.5 * (minus - plus)) < 1e-11);
    CHECK(rel_err(hermite_even_part(nu, z), 0.5 * (minus + plus)) < 1e-11);
    // unscaled square-root psi and phi at x = 0.3
    CHECK(rel_err(2.0 * hermite_odd_part(nu, z), 0.402402041173933) < 1e-10);
    CHECK(rel_err(plus, 0.904559998377132) < 1e-10);
    // tiny z: the odd part must not cancel to garbage
    const double tiny = 1e-9;
    // (H(-z) - H(z)) / 2 ~ -H'(0) z = -2 nu H_{nu-1}(0) z
    const double slope = -2.0 * nu * hermite_negative_order(nu - 1.0, 0.0);
    CHECK(rel_err(hermite_odd_part(nu, tiny), slope * tiny) < 1e-6);
}

TEST_CASE("derivative recurrence matches central differences") {
    for (double nu : {-0.2, -1.2}) {
        const HermiteEval H(nu);
        for (int i = 0; i < 20; ++i) {
            const double z = -2.0 + 0.25 * i;
            const double step = 1e-5;
            const double fd = (H(z + step).value - H(z - step).value) / (2.0 * step);
            CAPTURE(nu);
            CAPTURE(z);
            CHECK(std::abs(H(z).derivative - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("non-negative order is rejected") {
    CHECK_THROWS_AS(hermite_negative_order(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(hermite_negative_order(0.5, 1.0), DomainError);
    CHECK_THROWS_AS(HermiteEval(0.1), DomainError);
}
