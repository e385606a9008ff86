#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aic/controller.hpp"
#include "aic/errors.hpp"
#include "aic/network.hpp"

namespace aic {

/// dx/dt = f(x) on R^d with an analytic Jacobian.
struct OdeSystem {
    std::size_t dimension = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rhs;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

/// Continuum rate equations x' = sum_k zeta_k lambda_k(x). Homodimers use c x^2
/// rather than the stochastic c x (x - 1).
inline OdeSystem deterministic_rhs(const ReactionNetwork& net) {
    struct Term {
        int order; // -1 for Hill
        double rate;
        double Kn;
        int n;
        Eigen::Index i, j;
        Eigen::VectorXd zeta;
    };
    std::vector<Term> terms;
    const auto d = static_cast<Eigen::Index>(net.num_species());
    for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        const auto& r = net.reaction(k);
        Term t{0, 0.0, 1.0, 1, 0, 0, Eigen::VectorXd::Zero(d)};
        const auto zeta = net.stoichiometry(k);
        for (Eigen::Index s = 0; s < d; ++s)
            t.zeta(s) = zeta[static_cast<std::size_t>(s)];
        if (const auto* h = std::get_if<RepressingHill>(&r.kind)) {
            t.order = -1;
            t.rate = h->alpha;
            t.Kn = std::pow(h->K, h->n);
            t.n = h->n;
            t.i = static_cast<Eigen::Index>(h->input);
        } else {
            t.rate = std::get<MassAction>(r.kind).rate;
            t.order = static_cast<int>(r.order());
            if (t.order >= 1)
                t.i = static_cast<Eigen::Index>(r.reactants[0]);
            if (t.order == 2)
                t.j = static_cast<Eigen::Index>(r.reactants[1]);
        }
        terms.push_back(std::move(t));
    }

    OdeSystem sys;
    sys.dimension = net.num_species();
    sys.rhs = [terms, d](const Eigen::VectorXd& x) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(d);
        for (const auto& t : terms) {
            double rate;
            switch (t.order) {
            case 0:
                rate = t.rate;
                break;
            case 1:
                rate = t.rate * x(t.i);
                break;
            case 2:
                rate = t.rate * x(t.i) * x(t.j);
                break;
            default:
                rate = t.rate * t.Kn / (t.Kn + std::pow(x(t.i), t.n));
            }
            f += rate * t.zeta;
        }
        return f;
    };
    sys.jacobian = [terms, d](const Eigen::VectorXd& x) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
        for (const auto& t : terms) {
            switch (t.order) {
            case 0:
                break;
            case 1:
                J.col(t.i) += t.rate * t.zeta;
                break;
            case 2:
                J.col(t.i) += t.rate * x(t.j) * t.zeta;
                J.col(t.j) += t.rate * x(t.i) * t.zeta;
                break;
            default: {
                // d/dx [a Kn / (Kn + x^n)] = -a Kn n x^(n-1) / (Kn + x^n)^2
                const double xn = std::pow(x(t.i), t.n);
                const double dx = t.n == 1 ? 1.0 : t.n * std::pow(x(t.i), t.n - 1);
                J.col(t.i) += -t.rate * t.Kn * dx / ((t.Kn + xn) * (t.Kn + xn)) * t.zeta;
            }
            }
        }
        return J;
    };
    return sys;
}

inline OdeSystem deterministic_rhs(const ClosedLoopNetwork& closed) { return deterministic_rhs(closed.net); }

struct IntegrationOptions {
    double tol = 1e-8;      // mixed absolute/relative error per step
    double grid_dt = 0.1;   // output spacing
    double tol_neg = 1e-6;  // a component below -tol_neg aborts
    double h_min = 1e-12;   // relative to max(1, |t|)
    std::size_t max_steps = 50'000'000;
};

/// Solution sampled on the uniform output grid.
struct DenseTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;

    std::vector<double> component(std::size_t i) const {
        std::vector<double> out;
        out.reserve(states.size());
        for (const auto& s : states)
            out.push_back(s(static_cast<Eigen::Index>(i)));
        return out;
    }
};

/// Dormand-Prince 5(4) with step rejection; steps are shortened to land on
/// every output grid point.
inline DenseTrajectory integrate(const OdeSystem& sys, const Eigen::VectorXd& x0, double t_end,
                                 const IntegrationOptions& opts = {}) {
    if (!(opts.tol > 0.0))
        throw std::invalid_argument("integration tolerance must be positive");
    if (!(t_end > 0.0) || !(opts.grid_dt > 0.0))
        throw std::invalid_argument("t_end and grid_dt must be positive");
    if (static_cast<std::size_t>(x0.size()) != sys.dimension)
        throw std::invalid_argument("initial state dimension mismatch");

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;

    DenseTrajectory out;
    const auto n_out = static_cast<std::size_t>(std::floor(t_end / opts.grid_dt + 1e-9));
    out.times.reserve(n_out + 2);
    out.states.reserve(n_out + 2);
    out.times.push_back(0.0);
    out.states.push_back(x0);

    Eigen::VectorXd x = x0;
    Eigen::VectorXd k1 = sys.rhs(x);
    double t = 0.0;
    double h = std::min(opts.grid_dt, 1e-3 * std::max(1.0, t_end));
    std::size_t next = 1;
    std::size_t steps = 0;
    auto grid_time = [&](std::size_t i) { return i > n_out ? t_end : static_cast<double>(i) * opts.grid_dt; };
    const bool extra = grid_time(n_out) < t_end - 1e-9 * t_end;
    const std::size_t last = extra ? n_out + 1 : n_out;

    while (next <= last) {
        const double target = grid_time(next);
        if (target - t <= 1e-13 * std::max(1.0, std::abs(t))) {
            out.times.push_back(target);
            out.states.push_back(x);
            t = target;
            ++next;
            continue;
        }
        double step = std::min(h, target - t);
        const bool hits = step >= target - t;
        if (++steps > opts.max_steps)
            throw IntegrationError(t, "step limit exceeded");
        if (step < opts.h_min * std::max(1.0, std::abs(t)))
            throw IntegrationError(t, "step size underflow (stiff system? reduce the eta range)");

        const Eigen::VectorXd k2 = sys.rhs(x + step * (a21 * k1));
        const Eigen::VectorXd k3 = sys.rhs(x + step * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = sys.rhs(x + step * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 = sys.rhs(x + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 = sys.rhs(x + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd xn = x + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::VectorXd k7 = sys.rhs(xn);
        const Eigen::VectorXd err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Eigen::ArrayXd scale = opts.tol * (1.0 + x.array().abs().max(xn.array().abs()));
        const double norm = (err.array() / scale).abs().maxCoeff();

        if (!(norm <= 1.0)) {
            h = step * std::max(0.1, 0.9 * std::pow(norm, -0.2));
            continue;
        }
        t = hits ? target : t + step;
        x = xn;
        k1 = k7;
        if (x.minCoeff() < -opts.tol_neg)
            throw IntegrationError(t, "negative component; reduce the tolerance or step size");
        const double grow = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
        if (!hits || step >= h)
            h = step * grow;
        if (hits) {
            out.times.push_back(t);
            out.states.push_back(x);
            ++next;
        }
    }
    return out;
}

/// Long-horizon relaxation to a stable equilibrium; throws if the state is
/// still moving at the end.
inline Eigen::VectorXd deterministic_fixed_point(const OdeSystem& sys, const Eigen::VectorXd& x0, double horizon = 2000.0,
                                                 double tol = 1e-10) {
    IntegrationOptions opts;
    opts.tol = tol;
    opts.grid_dt = horizon / 100.0;
    const auto traj = integrate(sys, x0, horizon, opts);
    const Eigen::VectorXd& x = traj.states.back();
    const double drift = sys.rhs(x).cwiseAbs().maxCoeff();
    if (drift > 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff()))
        throw IntegrationError(horizon, "deterministic trajectory did not settle to a fixed point");
    return x;
}

} // namespace aic
