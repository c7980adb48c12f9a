#include "doctest.h"

#include "monofollow/errors.hpp"
#include "monofollow/fundamental_solutions.hpp"
#include "monofollow/simulation_oracle.hpp"
#include "monofollow/special_functions.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace monofollow;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> uniform(double lo, double hi, int n) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
        xs.push_back(lo + (hi - lo) * (i + 0.5) / n);
    }
    return xs;
}

void check_ode_and_shape(const DiffusionSpec& spec, double alpha, const FundamentalPair& pair,
                         double lo, double hi) {
    for (double x : uniform(lo, hi, 100)) {
        CAPTURE(x);
        for (const Jet& w : {pair.psi(x), pair.phi(x)}) {
            const double res = generator_apply(spec, alpha, w.value, w.d1, w.d2, x);
            CHECK(std::abs(res) <= 1e-8 * (1.0 + std::abs(w.value)));
        }
        CHECK(pair.psi(x).d1 > 0.0);
        CHECK(pair.phi(x).d1 < 0.0);
        CHECK(pair.F_prime(x) > 0.0);
        CHECK(pair.wronskian(x) > 0.0);
    }
}

DiffusionSpec bm_clone(double mu) {
    return DiffusionSpec::custom([mu](double) { return mu; },
                                 [](double) { return std::sqrt(2.0); }, 0.0, kInf,
                                 [](double) { return 0.0; }, [](double) { return 0.0; });
}

DiffusionSpec sr_clone(double rho) {
    return DiffusionSpec::custom([rho](double x) { return 1.0 - 2.0 * rho * x; },
                                 [](double x) { return 2.0 * std::sqrt(std::max(x, 0.0)); }, 0.0,
                                 kInf, [rho](double) { return -2.0 * rho; },
                                 [](double) { return 4.0; });
}

}  // namespace

TEST_CASE("Brownian pair solves the ODE") {
    const auto spec = DiffusionSpec::brownian_with_drift(0.15);
    const auto pair = brownian_pair(0.15, 0.2);
    check_ode_and_shape(spec, 0.2, pair, 0.0, 5.0);
    CHECK(pair.F(0.0) == doctest::Approx(1.0));

    const auto e = brownian_exponents(0.15, 0.2);
    CHECK(e.delta == doctest::Approx(std::sqrt(0.075 * 0.075 + 0.2)));
    CHECK(e.up == doctest::Approx(-0.075 + e.delta));
    CHECK(e.down == doctest::Approx(-0.075 - e.delta));
}

TEST_CASE("square-root pair solves the ODE and matches Hermite values") {
    const auto spec = DiffusionSpec::square_root(1.0);
    const auto pair = squareroot_pair(1.0, 0.2);
    check_ode_and_shape(spec, 0.2, pair, 0.0, 4.0);

    const double scale = squareroot_psi_scale(1.0, 0.2);
    CHECK(pair.phi(0.3).value == doctest::Approx(0.904559998377132).epsilon(1e-10));
    CHECK(pair.psi(0.3).value == doctest::Approx(scale * 0.402402041173933).epsilon(1e-10));
    CHECK(pair.phi(0.0).value == doctest::Approx(1.036139356454661).epsilon(1e-10));
    CHECK(pair.psi(0.0).value == 0.0);
    // psi'' -> -infinity at 0
    CHECK(pair.psi(1e-10).d2 < pair.psi(1e-4).d2);
    CHECK(pair.psi(1e-4).d2 < -10.0);
}

TEST_CASE("square-root psi scale") {
    const double a = 0.2;
    const double want = lanczos_gamma(0.5 * (1.0 + a)) / (2.0 * std::sqrt(M_PI)) *
                        std::pow(2.0, 0.25) * std::pow(2.0, a / 2.0);
    CHECK(squareroot_psi_scale(1.0, a) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("third derivative from the differentiated ODE") {
    const auto spec = DiffusionSpec::square_root(1.0);
    const auto pair = squareroot_pair(1.0, 0.2);
    for (double x : {0.2, 0.9, 2.0}) {
        const double step = 1e-5;
        const double fd = (pair.phi(x + step).d2 - pair.phi(x - step).d2) / (2.0 * step);
        CHECK(pair.phi(x).d3 == doctest::Approx(fd).epsilon(1e-6));
        const double fd_psi = (pair.psi(x + step).d2 - pair.psi(x - step).d2) / (2.0 * step);
        CHECK(pair.psi(x).d3 == doctest::Approx(fd_psi).epsilon(1e-6));
    }
    CHECK_THROWS_AS(derivative_recurrences(spec, 0.2, 0.0, 1.0, 1.0), SingularityError);
}

TEST_CASE("custom clone of the Brownian model matches the closed form") {
    const double mu = 0.15;
    const double alpha = 0.2;
    const auto spec = bm_clone(mu);
    const ProblemSpec problem(spec, alpha, Payoff::zero(), 1.0);
    CustomPairOptions opts;
    opts.anchor = 1.0;
    const auto pair = custom_pair_numeric(spec, alpha, opts);
    CHECK(pair.psi(1.0).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pair.phi(1.0).value == doctest::Approx(1.0).epsilon(1e-14));

    const auto e = brownian_exponents(mu, alpha);
    for (double x : uniform(0.0, 3.0, 60)) {
        CAPTURE(x);
        CHECK(pair.psi(x).value == doctest::Approx(std::exp(e.up * (x - 1.0))).epsilon(1e-6));
        CHECK(pair.phi(x).value == doctest::Approx(std::exp(e.down * (x - 1.0))).epsilon(1e-6));
    }
    check_ode_and_shape(spec, alpha, pair, 0.0, 5.0);
}

TEST_CASE("custom clone of the square-root model has increasing F") {
    const auto spec = sr_clone(1.0);
    const auto pair = custom_pair_numeric(spec, 0.2);
    CHECK(pair.psi(pair.normalization_point()).value == doctest::Approx(1.0));
    CHECK(pair.phi(pair.normalization_point()).value == doctest::Approx(1.0));
    double last = -1.0;
    for (double x : uniform(0.0, 4.0, 200)) {
        const double F = pair.F(x);
        CHECK(F > last);
        last = F;
    }
    // the increasing solution vanishes at the entrance end like the built-in one
    const auto exact = squareroot_pair(1.0, 0.2);
    const double ratio = exact.psi(1.0).value;
    for (double x : {0.05, 0.3, 0.8, 2.0}) {
        CAPTURE(x);
        CHECK(pair.psi(x).value * ratio == doctest::Approx(exact.psi(x).value).epsilon(1e-5));
    }
    check_ode_and_shape(spec, 0.2, pair, 0.01, 4.0);
}

TEST_CASE("built-in pairs are normalized at their closed forms") {
    const ProblemSpec bm(DiffusionSpec::brownian_with_drift(0.15), 0.2, Payoff::zero(), 1.0);
    CHECK(make_fundamental_pair(bm).label().find("brownian") != std::string::npos);
    CHECK(make_fundamental_pair(bm).psi(0.0).value == 1.0);
    const ProblemSpec sr(DiffusionSpec::square_root(1.0), 0.2, Payoff::zero(), 1.0);
    CHECK(make_fundamental_pair(sr).phi(0.3).value ==
          doctest::Approx(squareroot_pair(1.0, 0.2).phi(0.3).value));
}

TEST_CASE("two-sided hitting transforms") {
    const auto pair = brownian_pair(0.15, 0.2);
    const auto at_r = two_sided_hitting_transform(pair, 0.0, 1.0, 1.0);
    CHECK(at_r.right == doctest::Approx(1.0));
    CHECK(at_r.left == doctest::Approx(0.0).epsilon(1e-15));
    const auto at_l = two_sided_hitting_transform(pair, 0.0, 0.0, 1.0);
    CHECK(at_l.right == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(at_l.left == doctest::Approx(1.0));
    const auto mid = two_sided_hitting_transform(pair, 0.0, 0.5, 1.0);
    CHECK(mid.right == doctest::Approx(0.506043289415316).epsilon(1e-12));
    CHECK(mid.left == doctest::Approx(0.469478365555334).epsilon(1e-12));
    CHECK_THROWS_AS(two_sided_hitting_transform(pair, 1.0, 0.5, 0.0), DomainError);
}

TEST_CASE("upward hitting transform equals psi(x)/psi(y) (desk-scale MC)") {
    const auto spec = DiffusionSpec::brownian_with_drift(0.15);
    const auto pair = brownian_pair(0.15, 0.2);
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_paths = 20000;
    cfg.horizon = 60.0;
    const double x = 0.3;
    const double y = 0.8;
    // the lower level is far enough away to be irrelevant
    const auto [up, down] = hitting_transform_mc(x, -40.0, y, spec, 0.2, cfg);
    const double want = pair.psi(x).value / pair.psi(y).value;
    CHECK(std::abs(up.mean - want) <= 3.0 * up.std_error + std::sqrt(cfg.dt));
    CHECK(down.mean < 1e-6);
}

TEST_CASE("square-root identities at and near the mean-reversion level") {
    const double rho = 1.0;
    const double alpha = 0.2;
    const auto spec = DiffusionSpec::square_root(rho);
    const auto pair = squareroot_pair(rho, alpha);
    const double m = 1.0 / (2.0 * rho);
    CHECK(pair.psi(m).d2 / pair.phi(m).d2 == doctest::Approx(pair.F(m)).epsilon(1e-10));

    // the drift vanishes at 1/(2 rho): w'' = alpha w / (2x)
    const auto [w2, w3] = derivative_recurrences(spec, alpha, m, 0.7, -0.3);
    CHECK(w2 == doctest::Approx(alpha * 0.7 / (2.0 * m)).epsilon(1e-15));
    CHECK(std::isfinite(w3));

    // (2 rho + alpha) w' - (3 - 2 rho x) w'' = 2 x w'''
    const double x = 0.4;
    for (const Jet& w : {pair.psi(x), pair.phi(x)}) {
        const double lhs = (2.0 * rho + alpha) * w.d1 - (3.0 - 2.0 * rho * x) * w.d2;
        CHECK(std::abs(lhs - 2.0 * x * w.d3) < 1e-8);
    }
}
