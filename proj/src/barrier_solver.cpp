#include "monofollow/barrier_solver.hpp"

#include "monofollow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace monofollow {

namespace {

struct Terms {
    Jet k;
    Jet psi;
    Jet phi;
};

Terms terms_at(const TransformContext& ctx, double b) {
    return {k_func(ctx, b), ctx.pair().psi(b), ctx.pair().phi(b)};
}

struct Scan {
    std::vector<double> roots;
    std::vector<std::pair<double, double>> cells;
    std::vector<int> directions;  // +1 when the residual goes from + to -
};

double bisect(const TransformContext& ctx, double lo, double hi, double r_lo, double tol) {
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double r_mid = optimality_residual(ctx, mid);
        if (r_mid == 0.0) {
            return mid;
        }
        if ((r_mid > 0.0) == (r_lo > 0.0)) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Geometric grid of offsets from `base`, first offset 1e-6 of the span.
Scan scan_residual(const TransformContext& ctx, double base, double hi, int n, double tol,
                   double merge_tol) {
    const double first = 1e-6 * (hi - base);
    std::vector<double> xs(n);
    std::vector<double> rs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = i == n - 1 ? hi : base + first * std::pow((hi - base) / first, double(i) / (n - 1));
        rs[i] = optimality_residual(ctx, xs[i]);
    }
    Scan scan;
    for (int i = 0; i + 1 < n; ++i) {
        double root = 0.0;
        int dir = 0;
        if (rs[i] == 0.0) {
            // a grid point landing on the root; flat zeros are not sign changes
            if (i == 0 || !(rs[i - 1] * rs[i + 1] < 0.0)) {
                continue;
            }
            root = xs[i];
            dir = rs[i - 1] > 0.0 ? 1 : -1;
        } else if (rs[i] * rs[i + 1] < 0.0) {
            root = bisect(ctx, xs[i], xs[i + 1], rs[i], tol);
            dir = rs[i] > 0.0 ? 1 : -1;
        } else {
            continue;
        }
        if (!scan.roots.empty() && std::abs(root - scan.roots.back()) < merge_tol) {
            continue;
        }
        scan.roots.push_back(root);
        scan.cells.emplace_back(xs[std::max(i - 1, 0)], xs[std::min(i + 2, n - 1)]);
        scan.directions.push_back(dir);
    }
    return scan;
}

double golden_argmax(const TransformContext& ctx, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = slope_beta(ctx, x1);
    double f2 = slope_beta(ctx, x2);
    for (int iter = 0; iter < 200 && b - a > 1e-10 * (1.0 + std::abs(a)); ++iter) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = slope_beta(ctx, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = slope_beta(ctx, x1);
        }
    }
    return 0.5 * (a + b);
}

// H(y, b*) sampled above F(b*), together with the state points.
struct ObstacleSamples {
    std::vector<double> y;
    std::vector<double> x;
    std::vector<double> H;
};

ObstacleSamples sample_obstacle(const TransformContext& ctx, double b_star) {
    const SlopeData s = slope_data(ctx, b_star);
    ObstacleSamples out;
    for (double y : transformed_grid(ctx, 200)) {
        if (y <= s.F_b) {
            continue;
        }
        const double x = inverse_F(ctx, y);
        out.y.push_back(y);
        out.x.push_back(x);
        out.H.push_back(W_b_at(ctx, s, y, x));
    }
    return out;
}

}  // namespace

double optimality_residual(const TransformContext& ctx, double b) {
    const Terms t = terms_at(ctx, b);
    const double Fc = ctx.F_c();
    return t.k.d1 * t.psi.d1 - t.k.value * t.psi.d2 +
           Fc * (t.k.value * t.phi.d2 - t.k.d1 * t.phi.d1);
}

double optimality_residual_scale(const TransformContext& ctx, double b) {
    const Terms t = terms_at(ctx, b);
    const double Fc = std::abs(ctx.F_c());
    return (std::abs(t.k.value) + std::abs(t.k.d1)) *
           (std::abs(t.psi.d1) + std::abs(t.psi.d2) +
            Fc * (std::abs(t.phi.d1) + std::abs(t.phi.d2)));
}

double sufficiency_value(const TransformContext& ctx, double b) {
    const Terms t = terms_at(ctx, b);
    const double Fc = ctx.F_c();
    return t.k.d2 * t.psi.d1 - t.k.value * t.psi.d3 +
           Fc * (t.k.value * t.phi.d3 - t.k.d2 * t.phi.d1);
}

std::vector<double> residual_sign_changes(const TransformContext& ctx, double lo, double hi, int n,
                                          double bisect_tol) {
    if (!(hi > lo) || n < 2) {
        throw DomainError("residual_sign_changes: need lo < hi and n >= 2");
    }
    return scan_residual(ctx, lo, hi, n, bisect_tol, 1e-8).roots;
}

BarrierSolution solve_barrier(const TransformContext& ctx, const SearchConfig& search) {
    const double c = ctx.c();
    const double top = ctx.truncation();

    Scan scan;
    int n = search.grid_n;
    for (int round = 0; round <= search.refinements; ++round) {
        scan = scan_residual(ctx, c, top, n, search.bisect_tol, search.merge_tol);
        if (!scan.roots.empty()) {
            break;
        }
        n = 2 * n - 1;
    }
    if (scan.roots.empty()) {
        std::ostringstream msg;
        msg << "no interior barrier: the optimality residual has no sign change on (" << c << ", "
            << top << ") after " << search.refinements << " grid refinements";
        throw NoInteriorBarrierError(msg.str());
    }
    if (scan.roots.size() > 1) {
        throw UniquenessViolatedError(scan.roots);
    }

    BarrierSolution sol;
    sol.roots = scan.roots;
    sol.b_star = scan.roots.front();
    sol.bracket_lo = scan.cells.front().first;
    sol.bracket_hi = scan.cells.front().second;
    sol.beta_star = slope_beta(ctx, sol.b_star);
    sol.residual_at_b_star = optimality_residual(ctx, sol.b_star);
    sol.residual_scale = optimality_residual_scale(ctx, sol.b_star);
    sol.sufficiency_value = sufficiency_value(ctx, sol.b_star);

    if (scan.directions.front() > 0) {
        sol.argmax_beta = golden_argmax(ctx, sol.bracket_lo, sol.bracket_hi);
        if (std::abs(sol.argmax_beta - sol.b_star) > search.agreement_tol) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "root of the optimality residual (" << sol.b_star
                << ") and the maximizer of beta (" << sol.argmax_beta << ") disagree";
            throw InternalConsistencyError(msg.str());
        }
    } else {
        // The stationary point is a minimum of beta; reported through the
        // sufficiency flag rather than thrown.
        sol.argmax_beta = std::numeric_limits<double>::quiet_NaN();
    }

    if (const auto& floor = ctx.problem().solvency_floor()) {
        sol.constrained_b = solve_constrained(sol, *floor);
    }
    sol.assumption_report = verify_proposition_hypotheses(ctx, sol);
    return sol;
}

double solve_constrained(const BarrierSolution& solution, double floor) {
    return solution.b_star <= floor ? solution.b_star : floor;
}

double solve_constrained(const TransformContext& ctx, const BarrierSolution& solution) {
    const auto& floor = ctx.problem().solvency_floor();
    if (!floor) {
        throw DomainError("solve_constrained: problem has no solvency floor");
    }
    return solve_constrained(solution, *floor);
}

AssumptionReport verify_proposition_hypotheses(const TransformContext& ctx,
                                               const BarrierSolution& solution) {
    AssumptionReport rep;
    const double c = ctx.c();
    const double top = ctx.truncation();
    const double b_star = solution.b_star;
    const auto& spec = ctx.problem().diffusion();

    rep.unique_root = solution.roots.size() == 1;
    rep.sufficiency_ok = solution.sufficiency_value < 0.0;
    if (solution.sufficiency_value == 0.0) {
        rep.notes.push_back("sufficiency expression vanishes at b*: inconclusive");
    }

    const ObstacleSamples obs = sample_obstacle(ctx, b_star);
    const std::size_t m = obs.y.size();

    // Differentiability of R: central differences against the analytic m.
    rep.R_differentiable = m > 2;
    for (std::size_t i = 0; i < m; i += 5) {
        const double y = obs.y[i];
        const double hy = 1e-5 * (y - ctx.F_c());
        const double F_top = ctx.pair().F(top);
        if (y + hy > F_top || y - hy <= ctx.pair().F(b_star)) {
            continue;
        }
        const double fd = (R_func(ctx, y + hy, b_star) - R_func(ctx, y - hy, b_star)) / (2.0 * hy);
        const double exact = m_func(ctx, obs.x[i], b_star);
        if (!std::isfinite(fd) || !std::isfinite(exact) ||
            std::abs(fd - exact) > 1e-4 * (std::abs(exact) + std::abs(fd)) + 1e-300) {
            rep.R_differentiable = false;
            std::ostringstream msg;
            msg << "R'(y) by differences (" << fd << ") differs from m (" << exact << ") at y = " << y;
            rep.notes.push_back(msg.str());
            break;
        }
    }

    // Shape of H(., b*) above F(b*): increasing, concave past F(j), divergent.
    // j: last sign change of (A - alpha) K(., b*) past b*, located on a
    // uniform grid then bisected.
    rep.j_point = b_star;
    {
        const double x_hi = std::min(top, b_star + 10.0 * (b_star - c));
        constexpr int kScan = 400;
        double last_pos = std::numeric_limits<double>::quiet_NaN();
        double next = x_hi;
        for (int i = 1; i <= kScan; ++i) {
            const double x = b_star + (x_hi - b_star) * i / kScan;
            if (generator_of_K(ctx, x, b_star) > 0.0) {
                last_pos = x;
                next = std::min(x_hi, b_star + (x_hi - b_star) * (i + 1) / kScan);
            }
        }
        if (std::isfinite(last_pos)) {
            double lo = last_pos;
            double hi = next;
            for (int iter = 0; iter < 100 && hi - lo > 1e-12 * (1.0 + hi); ++iter) {
                const double mid = 0.5 * (lo + hi);
                (generator_of_K(ctx, mid, b_star) > 0.0 ? lo : hi) = mid;
            }
            rep.j_point = hi;
        }
    }
    std::size_t j_index = 0;
    while (j_index < m && obs.x[j_index] < rep.j_point) {
        ++j_index;
    }
    bool increasing = m > 2;
    bool concave = true;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (obs.H[i + 1] < obs.H[i] - 1e-12 * std::abs(obs.H[i])) {
            increasing = false;
        }
    }
    for (std::size_t i = j_index; i + 2 < m; ++i) {
        const double s0 = (obs.H[i + 1] - obs.H[i]) / (obs.y[i + 1] - obs.y[i]);
        const double s1 = (obs.H[i + 2] - obs.H[i + 1]) / (obs.y[i + 2] - obs.y[i + 1]);
        if (s1 > s0 + 1e-8 * std::abs(s0)) {
            concave = false;
        }
    }
    const bool divergent = m > 2 && obs.H.back() > 10.0 * std::max(1.0, std::abs(obs.H.front()));
    rep.shape_ok = increasing && concave && divergent;
    if (!increasing) rep.notes.push_back("H(., b*) is not increasing above F(b*)");
    if (!concave) rep.notes.push_back("H(., b*) is not concave beyond F(j)");
    if (!divergent) rep.notes.push_back("H(., b*) does not grow toward d_trunc");

    // Concavity of v on (c, b*).
    constexpr int kConcavityGrid = 200;
    std::vector<double> k1(kConcavityGrid);
    std::vector<double> d2(kConcavityGrid);
    bool k1_zero = true;
    for (int i = 0; i < kConcavityGrid; ++i) {
        const double x = c + (b_star - c) * (i + 1) / (kConcavityGrid + 1.0);
        const Jet k = k_func(ctx, x);
        k1[i] = k.d1;
        d2[i] = ctx.pair().psi(x).d2 - ctx.F_c() * ctx.pair().phi(x).d2;
        if (std::abs(k.d1) > 1e-12 * (1.0 + std::abs(k.value))) {
            k1_zero = false;
        }
    }
    if (k1_zero) {
        rep.concavity_route = "vacuous (k' = 0), v'' <= 0 checked directly";
        rep.concavity_ok = true;
        for (int i = 0; i < kConcavityGrid; ++i) {
            if (solution.beta_star * d2[i] - k1[i] > 1e-10) {
                rep.concavity_ok = false;
            }
        }
    } else {
        const bool all_pos = std::all_of(d2.begin(), d2.end(), [](double v) { return v > 0.0; });
        const bool all_neg = std::all_of(d2.begin(), d2.end(), [](double v) { return v < 0.0; });
        bool dec = true;
        bool inc = true;
        for (int i = 0; i + 1 < kConcavityGrid; ++i) {
            const double r0 = k1[i] / d2[i];
            const double r1 = k1[i + 1] / d2[i + 1];
            const double slack = 1e-10 * (std::abs(r0) + std::abs(r1));
            dec = dec && r1 <= r0 + slack;
            inc = inc && r1 >= r0 - slack;
        }
        if (all_pos && dec) {
            rep.concavity_route = "decreasing ratio, D2 > 0";
            rep.concavity_ok = true;
        } else if (all_neg && inc) {
            rep.concavity_route = "increasing ratio, D2 < 0";
            rep.concavity_ok = true;
        } else {
            rep.notes.push_back("neither concavity condition on k'/(psi'' - F(c) phi'') holds");
        }
    }

    rep.drift_payoff_ok = drift_payoff_monotone_report(ctx.problem(), b_star, 200).ok();
    if (!rep.drift_payoff_ok) {
        rep.notes.push_back("drift or payoff is not maximized at b* on [b*, d)");
    }

    rep.sigma_bounded = true;
    for (int i = 0; i <= 200; ++i) {
        const double s = spec.volatility(c + (top - c) * i / 200.0);
        if (!std::isfinite(s)) {
            rep.sigma_bounded = false;
        } else {
            rep.sigma_max = std::max(rep.sigma_max, std::abs(s));
        }
    }
    return rep;
}

DominanceReport dominance_check(const TransformContext& ctx, double b_star, int n_y, int n_b) {
    const double c = ctx.c();
    const double top = ctx.truncation();
    const Resolvent& g = ctx.resolvent();

    const std::vector<double> ys = transformed_grid(ctx, n_y);
    std::vector<double> xs(n_y);
    std::vector<double> phis(n_y);
    std::vector<double> gs(n_y, 0.0);
    for (int j = 0; j < n_y; ++j) {
        xs[j] = inverse_F(ctx, ys[j]);
        phis[j] = ctx.pair().phi(xs[j]).value;
        if (!g.trivial()) {
            gs[j] = g(xs[j]).value;
        }
    }
    const auto W = [&](const SlopeData& s, double g_b, int j) {
        if (ys[j] <= s.F_b) {
            return s.beta * (ys[j] - ctx.F_c()) + ctx.l_c();
        }
        return (ctx.h() * (xs[j] - s.b) - gs[j] + g_b + s.phi_b * s.level) / phis[j];
    };

    const SlopeData best = slope_data(ctx, b_star);
    const double g_best = g.trivial() ? 0.0 : g(b_star).value;
    std::vector<double> w_best(n_y);
    for (int j = 0; j < n_y; ++j) {
        w_best[j] = W(best, g_best, j);
    }

    DominanceReport rep;
    rep.n_y = n_y;
    rep.n_b = n_b;
    const double b_hi = std::min(c + 3.0 * (b_star - c), top);
    for (int k = 1; k <= n_b; ++k) {
        const double b = c + (b_hi - c) * k / n_b;
        const SlopeData s = slope_data(ctx, b);
        const double g_b = g.trivial() ? 0.0 : g(b).value;
        for (int j = 0; j < n_y; ++j) {
            const double other = W(s, g_b, j);
            const double mag = std::abs(w_best[j]) + std::abs(other);
            const double gap = (w_best[j] - other) / (mag > 0.0 ? mag : 1.0);
            if (gap < rep.worst_gap) {
                rep.worst_gap = gap;
                rep.worst_y = ys[j];
                rep.worst_b = b;
            }
        }
    }
    rep.ok = rep.worst_gap >= -1e-12;
    return rep;
}

}  // namespace monofollow
