#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "aic/controller.hpp"
#include "aic/ensemble.hpp"
#include "aic/linear_analysis.hpp"
#include "aic/ode.hpp"

namespace aic {

struct FixedPoint {
    Eigen::VectorXd value;
};
struct LimitCycle {
    double amplitude = 0.0;
    double period = 0.0;
};
struct Undecided {};

struct AttractorVerdict {
    std::variant<FixedPoint, LimitCycle, Undecided> kind = Undecided{};
    double tail_window = 0.0;
    double amplitude = 0.0; // max - min of the classified component over the tail
    double threshold = 0.0;

    bool is_fixed_point() const { return std::holds_alternative<FixedPoint>(kind); }
    bool is_limit_cycle() const { return std::holds_alternative<LimitCycle>(kind); }
    bool is_undecided() const { return std::holds_alternative<Undecided>(kind); }
    const char* name() const { return is_fixed_point() ? "fixed_point" : is_limit_cycle() ? "limit_cycle" : "undecided"; }
};

struct AttractorOptions {
    double tail_fraction = 0.25;
    double amp_rel_threshold = 0.01;
    double undecided_band = 0.2; // amplitudes within +-20% of the threshold are undecided
    /// Magnitude the threshold is relative to; defaults to |mean over the tail|.
    std::optional<double> reference;
};

namespace detail {

/// Mean spacing of upward zero crossings of the linearly detrended series.
inline std::optional<double> crossing_period(const std::vector<double>& t, const std::vector<double>& y) {
    const auto n = y.size();
    if (n < 4)
        return std::nullopt;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double denom = nn * stt - st * st;
    const double slope = denom != 0.0 ? (nn * sty - st * sy) / denom : 0.0;
    const double icept = (sy - slope * st) / nn;
    std::vector<double> crossings;
    double prev = y[0] - (icept + slope * t[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = y[i] - (icept + slope * t[i]);
        if (prev < 0.0 && cur >= 0.0)
            crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-prev) / (cur - prev));
        prev = cur;
    }
    if (crossings.size() < 2)
        return std::nullopt;
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

} // namespace detail

/// Fixed point vs limit cycle from the tail of a deterministic trajectory.
inline AttractorVerdict classify_attractor(const DenseTrajectory& traj, std::size_t component,
                                           const AttractorOptions& opts = {}) {
    if (traj.times.size() < 8)
        throw std::invalid_argument("trajectory too short to classify");
    if (!(opts.tail_fraction > 0.0) || opts.tail_fraction > 1.0)
        throw std::invalid_argument("tail fraction must lie in (0, 1]");
    const double t_end = traj.times.back();
    const double t_tail = t_end - opts.tail_fraction * (t_end - traj.times.front());
    std::vector<double> t, y;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= t_tail) {
            t.push_back(traj.times[i]);
            y.push_back(traj.states[i](static_cast<Eigen::Index>(component)));
        }
    AttractorVerdict v;
    v.tail_window = t_end - t_tail;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    v.amplitude = *hi - *lo;
    double mean = 0.0;
    for (double yi : y)
        mean += yi;
    mean /= static_cast<double>(y.size());
    v.threshold = opts.amp_rel_threshold * std::abs(opts.reference.value_or(mean));

    if (v.amplitude > (1.0 + opts.undecided_band) * v.threshold) {
        if (auto period = detail::crossing_period(t, y))
            v.kind = LimitCycle{v.amplitude, *period};
    } else if (v.amplitude < (1.0 - opts.undecided_band) * v.threshold) {
        v.kind = FixedPoint{traj.states.back()};
    }
    return v;
}

struct SpectrumPoint {
    double freq = 0.0;
    double power = 0.0;
};

/// One-sided power spectrum of the mean-removed series; powers sum to the
/// series variance, so a unit sinusoid puts 0.5 in its bin.
inline std::vector<SpectrumPoint> periodogram(const std::vector<double>& times, const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 64)
        throw std::invalid_argument("periodogram needs at least 64 samples");
    if (times.size() != n)
        throw std::invalid_argument("times and values differ in length");
    const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
    if (!(dt > 0.0))
        throw std::invalid_argument("non-uniform sampling grid");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-6 * dt)
            throw std::invalid_argument("non-uniform sampling grid");

    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i)
        centered[i] = values[i] - mean;

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, centered);
    const double nn = static_cast<double>(n);
    std::vector<SpectrumPoint> out;
    for (std::size_t j = 0; j <= n / 2; ++j) {
        double p = std::norm(spec[j]) / (nn * nn);
        if (j != 0 && !(n % 2 == 0 && j == n / 2))
            p *= 2.0;
        out.push_back({static_cast<double>(j) / (nn * dt), p});
    }
    return out;
}

/// Cov(Z1, Z2)(t) with its standard error.
inline Series covariance_gap(const EnsembleStats& stats, std::size_t z1, std::size_t z2) {
    const auto* p = stats.pair(z1, z2);
    if (p == nullptr)
        throw std::invalid_argument("ensemble statistics have no Z1/Z2 covariance channel");
    return Series{stats.grid, p->cov, p->cov_sem};
}

inline Series covariance_gap(const EnsembleStats& stats) {
    return covariance_gap(stats, stats.species_index("Z1"), stats.species_index("Z2"));
}

/// Equilibrium of the deterministic antithetic closed loop around a
/// unimolecular open loop: the moment prediction for (X, Z1) and
/// Z2 = mu / (eta Z1).
inline Eigen::VectorXd analytic_equilibrium(const ClosedLoopNetwork& closed) {
    const auto& spec = std::get<AntitheticSpec>(closed.controller);
    const auto model = build_linear_model(strip_controller(closed));
    const auto pred = predict_steady_state(model, spec);
    Eigen::VectorXd eq(static_cast<Eigen::Index>(closed.net.num_species()));
    eq.head(pred.mean_X.size()) = pred.mean_X;
    eq(static_cast<Eigen::Index>(closed.z1())) = pred.mean_Z1;
    eq(static_cast<Eigen::Index>(closed.z2())) = spec.mu / (spec.eta * pred.mean_Z1);
    return eq;
}

/// Spectral abscissa of the Jacobian at the analytic equilibrium; its sign
/// change locates the Hopf curve.
inline double hopf_abscissa(const ClosedLoopNetwork& closed) {
    const auto sys = deterministic_rhs(closed);
    return spectral_abscissa(sys.jacobian(analytic_equilibrium(closed)));
}

struct BifurcationConfig {
    ReactionNetwork open;
    double mu = 1.0;
    double theta = 1.0;
    std::vector<double> k_grid;
    std::vector<double> eta_grid;
    double t_end = 3000.0;
    IntegrationOptions integration{1e-8, 0.5};
    AttractorOptions attractor;
    std::optional<Eigen::VectorXd> x0; // defaults to the zero state
    unsigned threads = 0;
};

struct BifurcationCell {
    double k = 0.0;
    double eta = 0.0;
    AttractorVerdict verdict;
    double max_real_eig = 0.0;
    std::string error; // integrator failure, if any
};

struct BifurcationMap {
    std::vector<double> k_grid;
    std::vector<double> eta_grid;
    std::vector<BifurcationCell> cells; // row-major: k index, then eta index

    const BifurcationCell& at(std::size_t ik, std::size_t ie) const { return cells.at(ik * eta_grid.size() + ie); }

    /// Fraction of decided cells whose verdict matches the sign of the Jacobian abscissa.
    double oracle_agreement(std::size_t* decided_out = nullptr) const {
        std::size_t decided = 0, agree = 0;
        for (const auto& c : cells) {
            if (c.verdict.is_undecided())
                continue;
            ++decided;
            if (c.verdict.is_limit_cycle() == (c.max_real_eig > 0.0))
                ++agree;
        }
        if (decided_out)
            *decided_out = decided;
        return decided == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(decided);
    }

    /// k indices whose decided verdicts change more than once along increasing eta.
    std::vector<std::size_t> non_monotone_rows() const {
        std::vector<std::size_t> rows;
        for (std::size_t ik = 0; ik < k_grid.size(); ++ik) {
            int changes = 0;
            std::optional<bool> prev;
            for (std::size_t ie = 0; ie < eta_grid.size(); ++ie) {
                const auto& v = at(ik, ie).verdict;
                if (v.is_undecided())
                    continue;
                if (prev && *prev != v.is_limit_cycle())
                    ++changes;
                prev = v.is_limit_cycle();
            }
            if (changes > 1)
                rows.push_back(ik);
        }
        return rows;
    }
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0)
        throw std::invalid_argument("log grid needs 0 < lo <= hi and n > 0");
    std::vector<double> g;
    for (std::size_t i = 0; i < n; ++i)
        g.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                                                              static_cast<double>(n - 1)));
    return g;
}

/// Integrates and classifies the deterministic closed loop at one (k, eta).
inline BifurcationCell scan_cell(const BifurcationConfig& cfg, double k, double eta) {
    BifurcationCell cell;
    cell.k = k;
    cell.eta = eta;
    const auto closed = augment_antithetic(cfg.open, AntitheticSpec{cfg.mu, cfg.theta, eta, k});
    cell.max_real_eig = hopf_abscissa(closed);
    const auto sys = deterministic_rhs(closed);
    const Eigen::VectorXd x0 =
        cfg.x0 ? *cfg.x0 : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(closed.net.num_species()));
    auto opts = cfg.attractor;
    if (!opts.reference)
        opts.reference = cfg.mu / cfg.theta;
    try {
        const auto traj = integrate(sys, x0, cfg.t_end, cfg.integration);
        cell.verdict = classify_attractor(traj, closed.net.regulated(), opts);
    } catch (const IntegrationError& e) {
        cell.error = e.what();
        cell.verdict = AttractorVerdict{};
    }
    return cell;
}

inline BifurcationMap bifurcation_scan(const BifurcationConfig& cfg) {
    for (double v : cfg.k_grid)
        if (!(v > 0.0))
            throw std::invalid_argument("k grid must be positive");
    for (double v : cfg.eta_grid)
        if (!(v > 0.0))
            throw std::invalid_argument("eta grid must be positive");
    BifurcationMap map;
    map.k_grid = cfg.k_grid;
    map.eta_grid = cfg.eta_grid;
    const std::size_t n = cfg.k_grid.size() * cfg.eta_grid.size();
    map.cells.resize(n);
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t idx) {
        try {
            map.cells[idx] = scan_cell(cfg, cfg.k_grid[idx / cfg.eta_grid.size()], cfg.eta_grid[idx % cfg.eta_grid.size()]);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    };
    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    work(i);
            });
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return map;
}

} // namespace aic
