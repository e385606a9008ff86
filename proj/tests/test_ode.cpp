#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "aic/controller.hpp"
#include "aic/dynamics.hpp"
#include "aic/linear_analysis.hpp"
#include "aic/ode.hpp"
#include "aic/parser.hpp"

using namespace aic;

namespace {

const char* kGene = "species X1 X2\nactuated X1\nregulated X2\nX1 -> 0 @ 3\nk2: X1 -> X1 + X2 @ 2\nX2 -> 0 @ 1\n";

} // namespace

TEST(Ode, ExponentialDecay) {
    const auto sys = deterministic_rhs(parse_network("A -> 0 @ 1\n"));
    IntegrationOptions o;
    o.grid_dt = 0.25;
    const auto tr = integrate(sys, Eigen::VectorXd::Constant(1, 1.0), 1.0, o);
    ASSERT_EQ(tr.times.size(), 5u);
    EXPECT_EQ(tr.times.back(), 1.0);
    EXPECT_NEAR(tr.states.back()(0), std::exp(-1.0), 1e-7);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        EXPECT_DOUBLE_EQ(tr.times[i], 0.25 * static_cast<double>(i));
}

TEST(Ode, LinearSystemMatchesMatrixExponential) {
    const auto net = parse_network("species A B C\nA -> B @ 2\nB -> A @ 0.5\nB -> C @ 1\nC -> 0 @ 0.3\n0 -> A @ 0\n");
    const auto m = build_linear_model(net);
    const Eigen::MatrixXd SW = m.SW();
    const Eigen::Vector3d x0(10, 2, 0);
    IntegrationOptions o;
    o.grid_dt = 0.5;
    const auto tr = integrate(deterministic_rhs(net), x0, 10.0, o);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const Eigen::MatrixXd E = (SW * tr.times[i]).exp();
        const Eigen::VectorXd exact = E * x0;
        EXPECT_LT((tr.states[i] - exact).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + exact.cwiseAbs().maxCoeff()));
    }
}

TEST(Ode, ConservedTotal) {
    const auto tr = integrate(deterministic_rhs(parse_network("A -> B @ 3\nB -> A @ 0.7\n")), Eigen::Vector2d(5, 1), 50.0);
    for (const auto& x : tr.states)
        EXPECT_NEAR(x.sum(), 6.0, 1e-9);
}

TEST(Ode, RhsExamples) {
    const auto open = parse_network(kGene);
    const auto f = deterministic_rhs(open).rhs(Eigen::Vector2d(1, 1));
    EXPECT_DOUBLE_EQ(f(0), -3.0);
    EXPECT_DOUBLE_EQ(f(1), 1.0);

    const auto cl = augment_antithetic(open, {3, 1, 50, 1});
    const auto eq = analytic_equilibrium(cl);
    EXPECT_NEAR(eq(1), 3.0, 1e-12);
    EXPECT_LT(deterministic_rhs(cl).rhs(eq).cwiseAbs().maxCoeff(), 1e-12);

    // homodimer uses c x^2 in the continuum limit
    const auto dimer = deterministic_rhs(parse_network("2 A -> B @ 0.5\n")).rhs(Eigen::Vector2d(4, 0));
    EXPECT_DOUBLE_EQ(dimer(0), -16.0);
    EXPECT_DOUBLE_EQ(dimer(1), 8.0);
}

TEST(Ode, JacobianMatchesFiniteDifferences) {
    const auto open = parse_network("species X1 X2 D\nactuated X1\nregulated X2\nX1 -> 0 @ 3\nX1 -> X1 + X2 @ 2\n"
                                    "X2 -> 0 @ 1\n2 X2 -> D @ 0.2\nD -> 0 @ 1\n0 -> D @ hill(2, 1.5, 3, X1)\n");
    for (const auto& cl : {augment_antithetic(open, {2, 1, 5, 1}), augment_hill(open, {8.22, 3, 2})}) {
        const auto sys = deterministic_rhs(cl);
        Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(sys.dimension), 0.7, 2.9);
        const Eigen::MatrixXd J = sys.jacobian(x);
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double h = 1e-6;
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            const Eigen::VectorXd col = (sys.rhs(xp) - sys.rhs(xm)) / (2 * h);
            EXPECT_LT((col - J.col(j)).cwiseAbs().maxCoeff(), 1e-6) << "column " << j;
        }
    }
}

TEST(Ode, FixedPointOfHillLoop) {
    const auto cl = augment_hill(parse_network(kGene), {8.22, 3, 1});
    const auto x = deterministic_fixed_point(deterministic_rhs(cl), Eigen::Vector2d::Zero());
    // x2 = (k2/g1/g2) a K / (K + x2) with k2/(g1 g2) = 2/3
    EXPECT_NEAR(x(1) * (3.0 + x(1)), 2.0 / 3.0 * 8.22 * 3.0, 1e-6);
}

TEST(Ode, FixedPointRejectsOscillation) {
    const auto cl = augment_antithetic(
        parse_network("species X1 X2\nX1 -> 0 @ 1\nX1 -> X1 + X2 @ 1\nX2 -> 0 @ 1\n"), {1, 1, 100, 10});
    EXPECT_THROW(deterministic_fixed_point(deterministic_rhs(cl), Eigen::Vector4d::Zero()), IntegrationError);
}

TEST(Ode, InvalidArguments) {
    const auto sys = deterministic_rhs(parse_network("A -> 0 @ 1\n"));
    EXPECT_THROW(integrate(sys, Eigen::Vector2d::Zero(), 1.0), std::invalid_argument);
    EXPECT_THROW(integrate(sys, Eigen::VectorXd::Zero(1), -1.0), std::invalid_argument);
}
