#include "doctest.h"

#include "monofollow/barrier_solver.hpp"
#include "monofollow/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace monofollow;

namespace {

TransformContext bm_context(double mu = 0.15, double alpha = 0.2, double h = 1.0,
                            std::optional<double> floor = std::nullopt) {
    return make_context(
        ProblemSpec(DiffusionSpec::brownian_with_drift(mu), alpha, Payoff::zero(), h, floor));
}

TransformContext sr_context() {
    return make_context(ProblemSpec(DiffusionSpec::square_root(1.0), 0.2, Payoff::zero(), 1.0));
}

double closed_form_b_star(double mu, double alpha) {
    const double delta = std::sqrt(0.25 * mu * mu + alpha);
    return std::log((delta + 0.5 * mu) / (delta - 0.5 * mu)) / delta;
}

}  // namespace

TEST_CASE("Brownian example barrier") {
    const auto ctx = bm_context();
    const auto sol = solve_barrier(ctx);
    CHECK(sol.b_star == doctest::Approx(0.736246464538310).epsilon(1e-12));
    CHECK(sol.beta_star == doctest::Approx(1.16523).epsilon(1e-5));
    CHECK(std::abs(sol.argmax_beta - sol.b_star) < 1e-6);
    CHECK(std::abs(sol.residual_at_b_star) < 1e-10 * sol.residual_scale);
    CHECK(sol.sufficiency_value < 0.0);
    CHECK(sol.roots.size() == 1);
    CHECK(sol.bracket_lo < sol.b_star);
    CHECK(sol.b_star < sol.bracket_hi);
    CHECK_FALSE(sol.constrained_b);

    const auto& rep = sol.assumption_report;
    CHECK(rep.all_ok());
    CHECK(rep.notes.empty());
    // with f = 0 and mu constant, (A - alpha) K(., b*) = mu - alpha (x - b*)
    CHECK(rep.j_point == doctest::Approx(sol.b_star + 0.15 / 0.2).epsilon(1e-10));
    CHECK(rep.sigma_max == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Brownian concavity runs through psi'' - F(0) phi'' < 0") {
    const auto ctx = bm_context();
    const auto sol = solve_barrier(ctx);
    for (int i = 1; i < 100; ++i) {
        const double x = sol.b_star * i / 100.0;
        CHECK(ctx.pair().psi(x).d2 - ctx.F_c() * ctx.pair().phi(x).d2 < 0.0);
    }
    CHECK(sol.assumption_report.concavity_route.find("vacuous") == 0);
    CHECK(sol.assumption_report.concavity_ok);
}

TEST_CASE("square-root example barrier") {
    const auto ctx = sr_context();
    const auto sol = solve_barrier(ctx);
    CHECK(sol.b_star == doctest::Approx(0.4370).epsilon(2e-3 / 0.437));
    CHECK(sol.beta_star == doctest::Approx(2.2826).epsilon(5e-3));
    CHECK(sol.b_star > 0.0);
    CHECK(sol.b_star < 0.5);
    CHECK(std::abs(sol.argmax_beta - sol.b_star) < 1e-6);
    CHECK(sol.assumption_report.all_ok());

    const auto inside = residual_sign_changes(ctx, 0.0, 0.5, 200);
    REQUIRE(inside.size() == 1);
    CHECK(inside.front() == doctest::Approx(sol.b_star).epsilon(1e-10));
    CHECK(residual_sign_changes(ctx, 0.5, 3.0, 400).empty());
}

TEST_CASE("closed-form barrier for random parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mu_dist(0.05, 1.0);
    std::uniform_real_distribution<double> alpha_dist(0.05, 1.0);
    for (int i = 0; i < 10; ++i) {
        const double mu = mu_dist(rng);
        const double alpha = alpha_dist(rng);
        CAPTURE(mu);
        CAPTURE(alpha);
        const auto sol = solve_barrier(bm_context(mu, alpha));
        CHECK(std::abs(sol.b_star - closed_form_b_star(mu, alpha)) < 1e-10);
    }
    // fast discounting pushes the barrier toward c
    const auto sol = solve_barrier(bm_context(0.15, 5.0));
    CHECK(std::abs(sol.b_star - closed_form_b_star(0.15, 5.0)) < 1e-10);
}

TEST_CASE("beta is maximized at b*") {
    for (const auto& ctx : {bm_context(), sr_context()}) {
        const auto sol = solve_barrier(ctx);
        const double hi = std::min(ctx.truncation(), 4.0 * sol.b_star);
        for (int i = 1; i <= 200; ++i) {
            const double b = hi * i / 200.0;
            const double beta = slope_beta(ctx, b);
            CAPTURE(b);
            if (std::abs(b - sol.b_star) > 1e-8) {
                CHECK(beta < sol.beta_star);
            } else {
                CHECK(beta <= sol.beta_star * (1.0 + 1e-15));
            }
        }
    }
}

TEST_CASE("residual is beta' times the squared denominator") {
    const auto ctx = sr_context();
    for (double b : {0.1, 0.3, 0.8}) {
        const double step = 1e-5;
        const double dbeta = (slope_beta(ctx, b + step) - slope_beta(ctx, b - step)) / (2 * step);
        const double D = ctx.pair().psi(b).d1 - ctx.F_c() * ctx.pair().phi(b).d1;
        CAPTURE(b);
        CHECK(optimality_residual(ctx, b) == doctest::Approx(dbeta * D * D).epsilon(1e-6));
    }
}

TEST_CASE("sufficiency is the derivative of the residual at the root") {
    for (const auto& ctx : {bm_context(), sr_context()}) {
        const auto sol = solve_barrier(ctx);
        const double b = sol.b_star;
        const double step = 1e-5;
        const double fd =
            (optimality_residual(ctx, b + step) - optimality_residual(ctx, b - step)) / (2 * step);
        CHECK(sol.sufficiency_value == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("dominance of W^{b*}") {
    for (const auto& ctx : {bm_context(), sr_context()}) {
        const auto sol = solve_barrier(ctx);
        const auto rep = dominance_check(ctx, sol.b_star, 200, 50);
        CHECK(rep.ok);
        CHECK(rep.n_y == 200);
        CHECK(rep.n_b == 50);
        // a wrong barrier is dominated somewhere
        CHECK_FALSE(dominance_check(ctx, 0.5 * sol.b_star, 200, 50).ok);
    }
}

TEST_CASE("constrained barrier") {
    const auto free = solve_barrier(bm_context());
    CHECK(solve_constrained(free, 0.5) == 0.5);
    CHECK(solve_constrained(free, 1.0) == free.b_star);
    CHECK(solve_constrained(free, free.b_star) == free.b_star);

    const auto below = bm_context(0.15, 0.2, 1.0, 0.5);
    const auto sol = solve_barrier(below);
    REQUIRE(sol.constrained_b);
    CHECK(*sol.constrained_b == 0.5);
    CHECK(slope_beta(below, *sol.constrained_b) <= sol.beta_star);
    CHECK(solve_constrained(below, sol) == 0.5);

    const auto above = solve_barrier(bm_context(0.15, 0.2, 1.0, 1.0));
    REQUIRE(above.constrained_b);
    CHECK(*above.constrained_b == above.b_star);

    CHECK_THROWS_AS(solve_constrained(bm_context(), free), DomainError);
}

TEST_CASE("zero marginal reward: no interior barrier and vanishing sufficiency") {
    const auto ctx = bm_context(0.15, 0.2, 0.0);
    CHECK(sufficiency_value(ctx, 0.7) == 0.0);
    CHECK(optimality_residual(ctx, 0.7) == 0.0);
    CHECK_THROWS_AS(solve_barrier(ctx), NoInteriorBarrierError);
}

TEST_CASE("increasing drift violates the drift condition") {
    const auto rising = DiffusionSpec::custom([](double x) { return x; },
                                              [](double) { return std::sqrt(2.0); }, 0.0,
                                              std::numeric_limits<double>::infinity(),
                                              [](double) { return 1.0; }, [](double) { return 0.0; });
    const auto ctx = make_context(ProblemSpec(rising, 0.2, Payoff::zero(), 1.0));
    BarrierSolution candidate;
    candidate.b_star = 0.5;
    candidate.beta_star = slope_beta(ctx, 0.5);
    candidate.roots = {0.5};
    candidate.sufficiency_value = sufficiency_value(ctx, 0.5);
    const auto rep = verify_proposition_hypotheses(ctx, candidate);
    CHECK_FALSE(rep.drift_payoff_ok);
    CHECK_FALSE(rep.all_ok());
}

TEST_CASE("uniqueness error carries the roots") {
    const UniquenessViolatedError e({0.2, 0.9});
    CHECK(e.roots().size() == 2);
    CHECK(std::string(e.what()).find("0.2") != std::string::npos);
}

TEST_CASE("residual scan arguments") {
    CHECK_THROWS_AS(residual_sign_changes(bm_context(), 1.0, 0.5, 10), DomainError);
    CHECK_THROWS_AS(residual_sign_changes(bm_context(), 0.0, 1.0, 1), DomainError);
}
