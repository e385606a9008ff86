#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace aic {

/// minimize cost^T x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
struct LinearProgram {
    Eigen::VectorXd cost;
    Eigen::MatrixXd A_ub;
    Eigen::VectorXd b_ub;
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
};

namespace detail {

class Tableau {
  public:
    Tableau(Eigen::Index rows, Eigen::Index cols) : T_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows) {}

    Eigen::MatrixXd& data() { return T_; }
    std::vector<Eigen::Index>& basis() { return basis_; }
    Eigen::Index rows() const { return T_.rows() - 1; }
    Eigen::Index cols() const { return T_.cols() - 1; }
    double rhs(Eigen::Index i) const { return T_(i, cols()); }

    void pivot(Eigen::Index r, Eigen::Index c) {
        T_.row(r) /= T_(r, c);
        for (Eigen::Index i = 0; i < T_.rows(); ++i)
            if (i != r && T_(i, c) != 0.0)
                T_.row(i) -= T_(i, c) * T_.row(r);
        basis_[static_cast<std::size_t>(r)] = c;
    }

    /// Sets the objective row to reduced costs of `cost` for the current basis.
    void price(const Eigen::VectorXd& cost) {
        const auto obj = rows();
        T_.row(obj).setZero();
        T_.row(obj).head(cost.size()) = cost.transpose();
        for (Eigen::Index i = 0; i < rows(); ++i) {
            const double cb = cost(basis_[static_cast<std::size_t>(i)]);
            if (cb != 0.0)
                T_.row(obj) -= cb * T_.row(i);
        }
    }

    /// Bland's rule iterations over columns [0, allowed). Returns false if unbounded.
    bool optimize(Eigen::Index allowed, double tol) {
        const auto obj = rows();
        while (true) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j)
                if (T_(obj, j) < -tol) {
                    enter = j;
                    break;
                }
            if (enter < 0)
                return true;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double a = T_(i, enter);
                if (a > tol) {
                    const double ratio = rhs(i) / a;
                    if (ratio < best - 1e-12 ||
                        (ratio <= best + 1e-12 && leave >= 0 &&
                         basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                        best = std::min(best, ratio);
                        leave = i;
                    }
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
        }
    }

  private:
    Eigen::MatrixXd T_;
    std::vector<Eigen::Index> basis_;
};

} // namespace detail

/// Dense two-phase primal simplex with Bland's anti-cycling rule. Intended for
/// problems with a few dozen variables and constraints.
inline LpResult solve_lp(const LinearProgram& lp, double tol = 1e-9) {
    const Eigen::Index n = lp.cost.size();
    const Eigen::Index m_ub = lp.A_ub.rows();
    const Eigen::Index m_eq = lp.A_eq.rows();
    if ((m_ub > 0 && lp.A_ub.cols() != n) || (m_eq > 0 && lp.A_eq.cols() != n) || lp.b_ub.size() != m_ub ||
        lp.b_eq.size() != m_eq)
        throw std::invalid_argument("linear program dimensions are inconsistent");

    const Eigen::Index m = m_ub + m_eq;
    const Eigen::Index n_struct = n + m_ub; // original variables + slacks
    const Eigen::Index n_total = n_struct + m; // + artificials
    detail::Tableau tab(m, n_total);
    auto& T = tab.data();
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool ub = i < m_ub;
        double b = ub ? lp.b_ub(i) : lp.b_eq(i - m_ub);
        const double sign = b < 0.0 ? -1.0 : 1.0;
        if (ub) {
            T.row(i).head(n) = sign * lp.A_ub.row(i);
            T(i, n + i) = sign;
        } else {
            T.row(i).head(n) = sign * lp.A_eq.row(i - m_ub);
        }
        T(i, n_struct + i) = 1.0;
        T(i, n_total) = sign * b;
        tab.basis()[static_cast<std::size_t>(i)] = n_struct + i;
    }

    // phase 1: minimize the sum of artificials
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_total);
    phase1.tail(m).setOnes();
    tab.price(phase1);
    tab.optimize(n_total, tol);
    double scale = 1.0;
    for (Eigen::Index i = 0; i < m; ++i)
        scale = std::max(scale, std::abs(T(i, n_total)));
    LpResult result;
    if (-T(m, n_total) > 1e-9 * scale) {
        result.status = LpStatus::Infeasible;
        return result;
    }
    // drive zero-level artificials out of the basis where possible
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis()[static_cast<std::size_t>(i)] < n_struct)
            continue;
        for (Eigen::Index j = 0; j < n_struct; ++j)
            if (std::abs(T(i, j)) > tol) {
                tab.pivot(i, j);
                break;
            }
    }

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_total);
    phase2.head(n) = lp.cost;
    tab.price(phase2);
    if (!tab.optimize(n_struct, tol)) {
        result.status = LpStatus::Unbounded;
        return result;
    }
    result.status = LpStatus::Optimal;
    result.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto b = tab.basis()[static_cast<std::size_t>(i)];
        if (b < n)
            result.x(b) = std::max(0.0, T(i, n_total));
    }
    result.objective = lp.cost.dot(result.x);
    return result;
}

} // namespace aic
