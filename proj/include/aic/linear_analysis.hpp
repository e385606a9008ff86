#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "aic/controller.hpp"
#include "aic/errors.hpp"
#include "aic/network.hpp"
#include "aic/simplex.hpp"

namespace aic {

/// Strict-inequality margin used in every LP below.
inline constexpr double kLpEpsilon = 1e-6;
/// |[(SW)^-1]_{l,1}| at or below this counts as zero gain.
inline constexpr double kGainTolerance = 1e-9;
inline constexpr std::size_t kAccessibilityGridPoints = 64;

/// Affine propensities lambda_k(x) = sum_i W(k,i) x_i + w0(k), stoichiometry S.
struct LinearModel {
    Eigen::MatrixXd S;  // d x K, columns are stoichiometric vectors
    Eigen::MatrixXd W;  // K x d
    Eigen::VectorXd w0; // K
    std::size_t regulated = 0;
    std::size_t actuated = 0;

    Eigen::MatrixXd SW() const { return S * W; }
    Eigen::VectorXd Sw0() const { return S * w0; }
    Eigen::Index dim() const { return S.rows(); }
};

inline LinearModel build_linear_model(const ReactionNetwork& net) {
    const auto d = static_cast<Eigen::Index>(net.num_species());
    const auto K = static_cast<Eigen::Index>(net.num_reactions());
    LinearModel m;
    m.S = Eigen::MatrixXd::Zero(d, K);
    m.W = Eigen::MatrixXd::Zero(K, d);
    m.w0 = Eigen::VectorXd::Zero(K);
    m.regulated = net.regulated();
    m.actuated = net.actuated();
    for (Eigen::Index k = 0; k < K; ++k) {
        const auto& r = net.reaction(static_cast<std::size_t>(k));
        if (r.is_hill() || r.order() > 1)
            throw NonAffineError(static_cast<std::size_t>(k));
        const auto zeta = net.stoichiometry(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < d; ++i)
            m.S(i, k) = zeta[static_cast<std::size_t>(i)];
        const double c = std::get<MassAction>(r.kind).rate;
        if (r.order() == 0)
            m.w0(k) = c;
        else
            m.W(k, static_cast<Eigen::Index>(r.reactants[0])) = c;
    }
    return m;
}

inline bool is_metzler(const Eigen::MatrixXd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            if (i != j && M(i, j) < 0.0)
                return false;
    return true;
}

/// Largest real part of the spectrum.
inline double spectral_abscissa(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue computation failed");
    return es.eigenvalues().real().maxCoeff();
}

struct HurwitzResult {
    bool hurwitz = false;
    bool via_lp = true; // false when the matrix was not Metzler and eigenvalues decided
    std::optional<Eigen::VectorXd> witness; // v >= 1 with v^T M <= -eps
};

/// For a Metzler matrix M: Hurwitz iff {v >= 1, v^T M <= -eps} is feasible.
inline HurwitzResult hurwitz_check(const Eigen::MatrixXd& M, double eps = kLpEpsilon) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("hurwitz_check needs a square matrix");
    HurwitzResult res;
    if (!is_metzler(M)) {
        res.via_lp = false;
        res.hurwitz = spectral_abscissa(M) < 0.0;
        return res;
    }
    const auto d = M.rows();
    // v = 1 + u, u >= 0:  u^T M_j <= -eps - 1^T M_j  for every column j
    LinearProgram lp;
    lp.cost = Eigen::VectorXd::Zero(d);
    lp.A_ub = M.transpose();
    lp.b_ub = -Eigen::VectorXd::Constant(d, eps) - M.colwise().sum().transpose();
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible)
        return res;
    res.hurwitz = true;
    res.witness = (Eigen::VectorXd::Ones(d) + sol.x).eval();
    return res;
}

/// [(M)^-1]_{row, col}; throws std::domain_error when M is singular.
inline double inverse_entry(const Eigen::MatrixXd& M, std::size_t row, std::size_t col) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw std::domain_error("SW is singular");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(M.rows());
    e(static_cast<Eigen::Index>(col)) = 1.0;
    return lu.solve(e)(static_cast<Eigen::Index>(row));
}

struct ControllabilityResult {
    double impulse_gain = 0.0;
    bool controllable = false;
};

inline ControllabilityResult output_controllability(const Eigen::MatrixXd& SW, std::size_t regulated,
                                                    std::size_t actuated = 0) {
    ControllabilityResult r;
    r.impulse_gain = inverse_entry(SW, regulated, actuated);
    r.controllable = std::abs(r.impulse_gain) > kGainTolerance;
    return r;
}

struct AccessibilityWitness {
    double c = 0.0;
    Eigen::VectorXd v;
};

struct AccessibilityResult {
    bool accessible = false;
    std::optional<AccessibilityWitness> witness;
    /// inf over the c-grid of min_v v^T S w0 / (c v_l); accessible iff mu/theta exceeds it.
    double min_set_point = std::numeric_limits<double>::infinity();
};

/// Checks v^T (SW + cI) < 0 componentwise and mu/theta > v^T S w0 / (c v_l).
inline bool accessibility_condition(const LinearModel& model, double mu, double theta, double c,
                                    const Eigen::VectorXd& v) {
    const auto d = model.dim();
    if ((v.array() <= 0.0).any() || !(c > 0.0))
        return false;
    const Eigen::MatrixXd shifted = model.SW() + c * Eigen::MatrixXd::Identity(d, d);
    if (((v.transpose() * shifted).array() >= 0.0).any())
        return false;
    return mu / theta > v.dot(model.Sw0()) / (c * v(static_cast<Eigen::Index>(model.regulated)));
}

inline AccessibilityResult accessibility_check(const LinearModel& model, double mu, double theta,
                                               std::size_t grid_points = kAccessibilityGridPoints,
                                               double eps = kLpEpsilon) {
    if (!(mu > 0.0) || !(theta > 0.0))
        throw std::invalid_argument("mu and theta must be positive");
    const Eigen::MatrixXd SW = model.SW();
    const double a = -spectral_abscissa(SW);
    AccessibilityResult res;
    if (!(a > 0.0))
        return res;
    const auto d = model.dim();
    const auto l = static_cast<Eigen::Index>(model.regulated);
    const Eigen::VectorXd Sw0 = model.Sw0();
    const double set_point = mu / theta;
    const double lo = std::log(1e-3 * a), hi = std::log(0.999 * a);
    double best_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double c =
            std::exp(grid_points == 1 ? hi : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1));
        const Eigen::MatrixXd shifted = SW + c * Eigen::MatrixXd::Identity(d, d);
        // v = eps + u, u >= 0, v_l = 1, v^T (SW + cI) <= -eps; minimize v^T S w0
        LinearProgram lp;
        lp.cost = Sw0;
        lp.A_ub = shifted.transpose();
        lp.b_ub = -Eigen::VectorXd::Constant(d, eps) - eps * shifted.colwise().sum().transpose();
        lp.A_eq = Eigen::MatrixXd::Zero(1, d);
        lp.A_eq(0, l) = 1.0;
        lp.b_eq = Eigen::VectorXd::Constant(1, 1.0 - eps);
        const auto sol = solve_lp(lp);
        if (sol.status == LpStatus::Infeasible)
            continue;
        if (sol.status == LpStatus::Unbounded) {
            res.min_set_point = -std::numeric_limits<double>::infinity();
            res.accessible = true;
            continue;
        }
        const Eigen::VectorXd v = (sol.x.array() + eps).matrix();
        const double required = v.dot(Sw0) / c;
        res.min_set_point = std::min(res.min_set_point, required);
        const double margin = set_point - required;
        if (margin > 0.0 && margin > best_margin) {
            best_margin = margin;
            res.accessible = true;
            res.witness = AccessibilityWitness{c, v};
        }
    }
    return res;
}

struct SteadyStatePrediction {
    Eigen::VectorXd mean_X;
    double mean_Z1 = 0.0;
};

/// Stationary means of the antithetic closed loop from the first-moment
/// equations: 0 = SW x + S w0 + k z1 e_1 together with x_l = mu/theta.
/// With S w0 = 0 this reduces to mean_X = mu (SW)^-1 e_1 / (theta g) and
/// mean_Z1 = -mu / (k theta g), g = [(SW)^-1]_{l,1}.
inline SteadyStatePrediction predict_steady_state(const LinearModel& model, const AntitheticSpec& spec) {
    spec.validate();
    const Eigen::MatrixXd SW = model.SW();
    if (!hurwitz_check(SW).hurwitz)
        throw std::domain_error("SW is not Hurwitz stable");
    const auto ctrl = output_controllability(SW, model.regulated, model.actuated);
    if (!ctrl.controllable)
        throw std::domain_error("open loop is not output controllable");
    if (!accessibility_check(model, spec.mu, spec.theta).accessible)
        throw std::domain_error("set-point is not accessible");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(SW);
    const auto l = static_cast<Eigen::Index>(model.regulated);
    const Eigen::VectorXd q = lu.solve(model.Sw0());
    const double actuation = -(spec.set_point() + q(l)) / ctrl.impulse_gain; // k E[Z1]
    Eigen::VectorXd input = model.Sw0();
    input(static_cast<Eigen::Index>(model.actuated)) += actuation;
    SteadyStatePrediction p;
    p.mean_X = -lu.solve(input);
    p.mean_Z1 = actuation / spec.k;
    return p;
}

/// Weighted stationary firing rate of reference, measurement, comparison and
/// actuation: mu (a1 + a2 + a3) + a4 k E[Z1]. For S w0 = 0 the last term is
/// (mu/theta) a4 / |g|.
inline double metabolic_load(const AntitheticSpec& spec, const LinearModel& model, const std::array<double, 4>& alphas) {
    for (double a : alphas)
        if (a < 0.0)
            throw std::invalid_argument("metabolic weights must be nonnegative");
    const Eigen::MatrixXd SW = model.SW();
    const auto ctrl = output_controllability(SW, model.regulated, model.actuated);
    if (!ctrl.controllable)
        throw std::domain_error("zero impulse gain: metabolic load is undefined");
    const Eigen::VectorXd q = Eigen::FullPivLU<Eigen::MatrixXd>(SW).solve(model.Sw0());
    const double actuation = -(spec.set_point() + q(static_cast<Eigen::Index>(model.regulated))) / ctrl.impulse_gain;
    return spec.mu * (alphas[0] + alphas[1] + alphas[2]) + alphas[3] * actuation;
}

struct AnalysisReport {
    bool metzler = false;
    double spectral_abscissa = 0.0;
    bool hurwitz = false;
    std::optional<Eigen::VectorXd> hurwitz_witness;
    std::optional<double> impulse_gain; // absent when SW is singular
    bool output_controllable = false;
    bool accessible = false;
    double min_set_point = std::numeric_limits<double>::infinity();
    std::optional<AccessibilityWitness> witness;
    std::optional<Eigen::VectorXd> predicted_mean_X;
    std::optional<double> predicted_mean_Z1;
    std::optional<double> metabolic_load;

    bool all_conditions() const { return hurwitz && output_controllable && accessible; }
};

inline AnalysisReport analyze(const LinearModel& model, const AntitheticSpec& spec,
                              const std::array<double, 4>& alphas = {1.0, 1.0, 1.0, 1.0}) {
    spec.validate();
    AnalysisReport rep;
    const Eigen::MatrixXd SW = model.SW();
    rep.metzler = is_metzler(SW);
    rep.spectral_abscissa = spectral_abscissa(SW);
    const auto hw = hurwitz_check(SW);
    rep.hurwitz = hw.hurwitz;
    rep.hurwitz_witness = hw.witness;
    try {
        const auto ctrl = output_controllability(SW, model.regulated, model.actuated);
        rep.impulse_gain = ctrl.impulse_gain;
        rep.output_controllable = ctrl.controllable;
    } catch (const std::domain_error&) {
        rep.output_controllable = false;
    }
    if (rep.hurwitz) {
        const auto acc = accessibility_check(model, spec.mu, spec.theta);
        rep.accessible = acc.accessible;
        rep.min_set_point = acc.min_set_point;
        rep.witness = acc.witness;
    }
    if (rep.all_conditions()) {
        const auto pred = predict_steady_state(model, spec);
        rep.predicted_mean_X = pred.mean_X;
        rep.predicted_mean_Z1 = pred.mean_Z1;
        rep.metabolic_load = metabolic_load(spec, model, alphas);
    }
    return rep;
}

} // namespace aic
