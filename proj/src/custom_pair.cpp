#include "monofollow/errors.hpp"
#include "monofollow/fundamental_solutions.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace monofollow {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

struct Homogeneous {
    const DiffusionSpec* spec;
    double alpha;

    void operator()(const State& w, State& dw, double x) const {
        const double a = 0.5 * spec->variance(x);
        dw[0] = w[1];
        dw[1] = (alpha * w[0] - spec->drift(x) * w[1]) / a;
    }
};

// Behaviour of the solutions on (c, c + eps] at a singular left end where
// sigma^2 vanishes linearly: psi ~ A t^e (1 + a1 t), phi ~ A0 + B t^e.
struct SingularEnd {
    double eps;
    double exponent;
    double a1;
    double psi_amplitude;
    double phi_constant;
    double phi_branch;
};

// Stored dense trajectory; evaluation steps from the nearest stored node.
class Trajectory {
public:
    Trajectory(std::shared_ptr<const DiffusionSpec> spec, double alpha, double rel_tol)
        : spec_(std::move(spec)), alpha_(alpha), rel_tol_(rel_tol) {}

    void integrate(State start, double from, double to) {
        xs_.clear();
        states_.clear();
        auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-300, rel_tol_);
        const double dx0 = (to - from) * 1e-4;
        odeint::integrate_adaptive(stepper, Homogeneous{spec_.get(), alpha_}, start, from, to, dx0,
                                   [this](const State& s, double x) {
                                       xs_.push_back(x);
                                       states_.push_back(s);
                                   });
        if (xs_.front() > xs_.back()) {
            std::reverse(xs_.begin(), xs_.end());
            std::reverse(states_.begin(), states_.end());
        }
    }

    void rescale(double factor) {
        for (auto& s : states_) {
            s[0] *= factor;
            s[1] *= factor;
        }
    }

    double lo() const { return xs_.front(); }
    double hi() const { return xs_.back(); }

    State at(double x) const {
        auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
        std::size_t idx = static_cast<std::size_t>(it - xs_.begin());
        if (idx == xs_.size()) {
            idx = xs_.size() - 1;
        } else if (idx > 0 && std::abs(xs_[idx - 1] - x) < std::abs(xs_[idx] - x)) {
            idx -= 1;
        }
        State s = states_[idx];
        const double from = xs_[idx];
        if (from == x) {
            return s;
        }
        auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-300, rel_tol_);
        odeint::integrate_adaptive(stepper, Homogeneous{spec_.get(), alpha_}, s, from, x,
                                   (x - from) * 0.25);
        return s;
    }

private:
    std::shared_ptr<const DiffusionSpec> spec_;
    double alpha_;
    double rel_tol_;
    std::vector<double> xs_;
    std::vector<State> states_;
};

std::optional<SingularEnd> probe_left_end(const DiffusionSpec& spec, double alpha, double anchor) {
    const double c = spec.left();
    const double scale = anchor - c;
    if (spec.variance(c) > 1e-14 * (1.0 + spec.variance(anchor))) {
        return std::nullopt;
    }
    const double h = 1e-3 * scale;
    const double v1 = spec.variance(c + h);
    const double v2 = spec.variance(c + 2.0 * h);
    // a = sigma^2 / 2 ~ q1 t + q2 t^2
    const double q1 = 0.5 * (4.0 * v1 - v2) / (2.0 * h);
    const double q2 = 0.25 * (v2 - 2.0 * v1) / (h * h);
    const double mu0 = spec.drift(c);
    const double mu1 = spec.drift_derivative(c + 1e-9 * scale);
    if (!(q1 > 0.0)) {
        throw ConstructionError("custom pair: volatility vanishes faster than linearly at the left end");
    }
    const double e = 1.0 - mu0 / q1;
    if (!(e > 0.0)) {
        throw ConstructionError("custom pair: left end is not attainable (indicial exponent " +
                                std::to_string(e) + "), cannot be absorbing");
    }
    const double a1 = (alpha - mu1 * e - q2 * e * (e - 1.0)) / ((e + 1.0) * q1);
    return SingularEnd{1e-6 * scale, e, a1, 1.0, 0.0, 0.0};
}

}  // namespace

FundamentalPair custom_pair_numeric(const DiffusionSpec& spec_in, double alpha,
                                    const CustomPairOptions& options) {
    if (!(alpha > 0.0)) {
        throw DomainError("custom_pair_numeric: alpha must be positive");
    }
    auto spec = std::make_shared<const DiffusionSpec>(spec_in);
    const double c = spec->left();
    const double top = options.truncation.value_or(truncation_point(*spec, alpha));
    const double anchor = options.anchor.value_or(top - c > 4.0 ? c + 1.0 : c + 0.25 * (top - c));
    if (!(anchor > c && anchor < top)) {
        throw DomainError("custom_pair_numeric: anchor must lie strictly inside (c, d_trunc)");
    }

    std::optional<SingularEnd> singular = probe_left_end(*spec, alpha, anchor);
    const double start = singular ? c + singular->eps : c;

    auto psi_path = std::make_shared<Trajectory>(spec, alpha, options.rel_tol);
    if (singular) {
        const double t = singular->eps;
        const double e = singular->exponent;
        const double a1 = singular->a1;
        psi_path->integrate({std::pow(t, e) * (1.0 + a1 * t),
                             e * std::pow(t, e - 1.0) + a1 * (e + 1.0) * std::pow(t, e)},
                            start, top);
    } else {
        psi_path->integrate({1.0, local_rates(*spec, alpha, c).up}, start, top);
    }

    auto phi_path = std::make_shared<Trajectory>(spec, alpha, options.rel_tol);
    phi_path->integrate({1.0, local_rates(*spec, alpha, top).down}, top, start);

    const double psi_norm = 1.0 / psi_path->at(anchor)[0];
    const double phi_norm = 1.0 / phi_path->at(anchor)[0];
    psi_path->rescale(psi_norm);
    phi_path->rescale(phi_norm);

    if (singular) {
        singular->psi_amplitude = psi_norm;
        // Match A0 + B t^e to (phi, phi') at the seed point.
        const State s = phi_path->at(start);
        const double t = singular->eps;
        const double e = singular->exponent;
        singular->phi_branch = s[1] * std::pow(t, 1.0 - e) / e;
        singular->phi_constant = s[0] - singular->phi_branch * std::pow(t, e);
    }

    const auto jet = [spec, alpha](double x, double w, double w1) {
        const auto [w2, w3] = derivative_recurrences(*spec, alpha, x, w, w1);
        return Jet{w, w1, w2, w3};
    };
    const auto check_range = [c, top](double x) {
        if (x < c || x > top) {
            throw DomainError("custom pair: x = " + std::to_string(x) + " outside [c, d_trunc]");
        }
    };

    auto psi = [=](double x) {
        check_range(x);
        if (singular && x < start) {
            if (x == c) {
                return Jet{0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
            }
            const double t = x - c;
            const double e = singular->exponent;
            const double a1 = singular->a1;
            const double amp = singular->psi_amplitude;
            return jet(x, amp * std::pow(t, e) * (1.0 + a1 * t),
                       amp * (e * std::pow(t, e - 1.0) + a1 * (e + 1.0) * std::pow(t, e)));
        }
        const State s = psi_path->at(x);
        return jet(x, s[0], s[1]);
    };
    auto phi = [=](double x) {
        check_range(x);
        if (singular && x < start) {
            const double e = singular->exponent;
            if (x == c) {
                return Jet{singular->phi_constant, -std::numeric_limits<double>::infinity(), 0.0, 0.0};
            }
            const double t = x - c;
            return jet(x, singular->phi_constant + singular->phi_branch * std::pow(t, e),
                       singular->phi_branch * e * std::pow(t, e - 1.0));
        }
        const State s = phi_path->at(x);
        return jet(x, s[0], s[1]);
    };

    FundamentalPair pair(psi, phi, anchor, c, "custom");

    const int n = options.monotonicity_grid;
    for (int i = 1; i <= n; ++i) {
        const double x = c + (top - c) * i / (n + 1.0);
        const Jet p = pair.psi(x);
        const Jet q = pair.phi(x);
        if (!(p.value > 0.0 && p.d1 > 0.0 && q.value > 0.0 && q.d1 < 0.0)) {
            throw ConstructionError("fundamental-solution branch separation failed at x = " +
                                    std::to_string(x));
        }
    }
    return pair;
}

}  // namespace monofollow
