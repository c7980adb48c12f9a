#include "doctest.h"

#include "monofollow/diffusion_model.hpp"
#include "monofollow/errors.hpp"
#include "monofollow/fundamental_solutions.hpp"

#include <cmath>
#include <limits>

using namespace monofollow;

TEST_CASE("built-in factories") {
    const auto bm = DiffusionSpec::brownian_with_drift(0.15);
    CHECK(bm.drift(3.0) == 0.15);
    CHECK(bm.variance(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(bm.left() == 0.0);
    CHECK(std::isinf(bm.right()));
    CHECK(bm.kind_name() == "brownian_with_drift");

    const auto sr = DiffusionSpec::square_root(1.0);
    CHECK(sr.drift(0.25) == doctest::Approx(0.5));
    CHECK(sr.variance(0.25) == doctest::Approx(1.0));
    CHECK(sr.drift_derivative(0.7) == doctest::Approx(-2.0));
    CHECK(sr.variance_derivative(0.7) == doctest::Approx(4.0));
    CHECK(sr.in_open_interval(1.0));
    CHECK_FALSE(sr.in_open_interval(0.0));
}

TEST_CASE("invalid models are rejected") {
    CHECK_THROWS_AS(DiffusionSpec::brownian_with_drift(0.1, 0.0), DomainError);
    CHECK_THROWS_AS(DiffusionSpec::square_root(-1.0), DomainError);
    CHECK_THROWS_AS(DiffusionSpec::custom([](double) { return 0.0; },
                                          [](double x) { return x - 1.0; }, 0.0, 2.0),
                    DomainError);
    CHECK_THROWS_AS(DiffusionSpec::custom([](double) { return 0.0; }, [](double) { return 1.0; },
                                          1.0, 1.0),
                    DomainError);
    const auto bm = DiffusionSpec::brownian_with_drift(0.15);
    CHECK_THROWS_AS(ProblemSpec(bm, 0.0, Payoff::zero(), 1.0), DomainError);
    CHECK_THROWS_AS(ProblemSpec(bm, 0.2, Payoff::zero(), -1.0), DomainError);
    CHECK_THROWS_AS(ProblemSpec(bm, 0.2, Payoff::zero(), 1.0, -0.5), DomainError);
    CHECK_THROWS_AS(bm.with_truncation(-1.0), DomainError);
}

TEST_CASE("custom derivatives fall back to central differences") {
    const auto spec = DiffusionSpec::custom([](double x) { return 1.0 - x * x; },
                                            [](double x) { return std::sqrt(1.0 + x); }, 0.0, 5.0);
    CHECK(spec.drift_derivative(1.5) == doctest::Approx(-3.0).epsilon(1e-7));
    CHECK(spec.variance_derivative(1.5) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(spec.kind_name() == "custom");
}

TEST_CASE("polynomials and payoffs") {
    const Polynomial p{{1.0, -2.0, 3.0}};
    CHECK(p(2.0) == doctest::Approx(9.0));
    CHECK(p.derivative(2.0) == doctest::Approx(10.0));
    CHECK_FALSE(p.is_zero());
    CHECK(Polynomial{{0.0, 0.0}}.is_zero());

    CHECK(Payoff::zero().identically_zero());
    CHECK(Payoff::polynomial({0.0, 0.0}).identically_zero());
    const auto f = Payoff::polynomial({0.5, 1.0});
    CHECK_FALSE(f.identically_zero());
    CHECK(f(2.0) == doctest::Approx(2.5));
    CHECK(f.derivative(2.0) == doctest::Approx(1.0));
    REQUIRE(f.polynomial_form());
}

TEST_CASE("default truncation keeps ten orders of magnitude") {
    for (double mu : {0.15, 0.5, 1.0}) {
        const auto bm = DiffusionSpec::brownian_with_drift(mu);
        const double top = truncation_point(bm, 0.2);
        const auto e = brownian_exponents(mu, 0.2);
        CAPTURE(mu);
        CHECK(std::exp(e.down * top) < 1e-10);
    }
    const ProblemSpec sr(DiffusionSpec::square_root(1.0), 0.2, Payoff::zero(), 1.0);
    const auto pair = make_fundamental_pair(sr);
    const double top = sr.truncation();
    CHECK((pair.phi(top).value / pair.phi(1e-12).value < 1e-10 ||
           pair.psi(top).value / pair.psi(1.0).value > 1e10));

    const ProblemSpec explicit_top(DiffusionSpec::brownian_with_drift(0.15).with_truncation(7.0), 0.2,
                                   Payoff::zero(), 1.0);
    CHECK(explicit_top.truncation() == 7.0);

    const ProblemSpec finite(DiffusionSpec::custom([](double) { return 0.1; },
                                                   [](double) { return 1.0; }, 0.0, 4.0),
                             0.2, Payoff::zero(), 1.0);
    CHECK(finite.truncation() <= 4.0);
}

TEST_CASE("generator of an exponential") {
    const auto bm = DiffusionSpec::brownian_with_drift(0.15);
    const auto e = brownian_exponents(0.15, 0.2);
    const double x = 0.8;
    const double w = std::exp(e.up * x);
    CHECK(std::abs(generator_apply(bm, 0.2, w, e.up * w, e.up * e.up * w, x)) < 1e-15);
    CHECK_THROWS_AS(generator_apply(bm, 0.2, 1.0, 0.0, 0.0, -1.0), DomainError);
    // constants pick out -alpha w, linear functions pick out the drift
    CHECK(generator_apply(DiffusionSpec::square_root(1.0), 0.2, 1.0, 0.0, 0.0, 0.3) ==
          doctest::Approx(-0.2));
    CHECK(generator_apply(bm, 0.2, 0.0, 1.0, 0.0, 2.7) == doctest::Approx(0.15));
}

TEST_CASE("local rates reproduce the Brownian exponents") {
    const auto bm = DiffusionSpec::brownian_with_drift(0.15);
    const auto rates = local_rates(bm, 0.2, 1.0);
    const auto e = brownian_exponents(0.15, 0.2);
    CHECK(rates.up == doctest::Approx(e.up).epsilon(1e-14));
    CHECK(rates.down == doctest::Approx(e.down).epsilon(1e-14));
}

TEST_CASE("drift/payoff maximum report") {
    const auto bm = DiffusionSpec::brownian_with_drift(0.15);
    const ProblemSpec flat(bm, 0.2, Payoff::zero(), 1.0);
    CHECK(drift_payoff_monotone_report(flat, 0.7, 50).ok());

    const auto rising = DiffusionSpec::custom([](double x) { return x; },
                                              [](double) { return std::sqrt(2.0); }, 0.0,
                                              std::numeric_limits<double>::infinity());
    const ProblemSpec bad(rising, 0.2, Payoff::zero(), 1.0);
    const auto report = drift_payoff_monotone_report(bad, 0.5, 50);
    CHECK_FALSE(report.drift_max_at_b);
    CHECK(report.payoff_max_at_b);
    REQUIRE(report.drift_offender);
    CHECK(*report.drift_offender > 0.5);

    const ProblemSpec rising_payoff(bm, 0.2, Payoff::polynomial({0.0, 1.0}), 1.0);
    CHECK_FALSE(drift_payoff_monotone_report(rising_payoff, 0.5, 50).payoff_max_at_b);
    CHECK_THROWS_AS(drift_payoff_monotone_report(flat, -1.0, 50), DomainError);
}
