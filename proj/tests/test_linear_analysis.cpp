#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aic/linear_analysis.hpp"
#include "aic/parser.hpp"

using namespace aic;

namespace {

LinearModel gene_expression_model(double gamma1 = 3, double k2 = 2, double gamma2 = 1) {
    return build_linear_model(parse_network("species X1 X2\nactuated X1\nregulated X2\nX1 -> 0 @ " +
                                            std::to_string(gamma1) + "\nX1 -> X1 + X2 @ " + std::to_string(k2) +
                                            "\nX2 -> 0 @ " + std::to_string(gamma2) + "\n"));
}

} // namespace

TEST(LinearModel, GeneExpression) {
    const auto m = gene_expression_model();
    Eigen::Matrix2d expected;
    expected << -3, 0, 2, -1;
    EXPECT_TRUE(m.SW().isApprox(expected));
    EXPECT_TRUE(m.Sw0().isZero());
    EXPECT_TRUE(is_metzler(m.SW()));
    EXPECT_NEAR(spectral_abscissa(m.SW()), -1.0, 1e-12);
}

TEST(LinearModel, RejectsNonAffine) {
    EXPECT_THROW(build_linear_model(parse_network("A + B -> 0 @ 1\n")), NonAffineError);
    EXPECT_THROW(build_linear_model(parse_network("species A B\n0 -> A @ hill(1, 1, 1, B)\n")), NonAffineError);
}

TEST(LinearModel, MatchesMassActionDrift) {
    // sum_k zeta_k lambda_k(x) = SW x + S w0 for every unimolecular network
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> rate(0.0, 5.0);
    std::uniform_int_distribution<int> pick(0, 3), count(0, 50);
    const std::vector<std::string> sp{"A", "B", "C", "D"};
    for (int trial = 0; trial < 100; ++trial) {
        std::string text = "species A B C D\n";
        for (int k = 0; k < 8; ++k) {
            const int o = pick(gen) % 2;
            std::string lhs = o == 0 ? "0" : sp[static_cast<std::size_t>(pick(gen))];
            std::string rhs = pick(gen) == 0 ? "0" : sp[static_cast<std::size_t>(pick(gen))] + " + " +
                                                         sp[static_cast<std::size_t>(pick(gen))];
            text += lhs + " -> " + rhs + " @ " + std::to_string(rate(gen)) + "\n";
        }
        const auto net = parse_network(text);
        const auto m = build_linear_model(net);
        const State x(std::vector<Count>{count(gen), count(gen), count(gen), count(gen)});
        const auto a = propensity(net, x);
        Eigen::VectorXd drift = Eigen::VectorXd::Zero(4), xv(4);
        for (std::size_t k = 0; k < net.num_reactions(); ++k) {
            const auto z = net.stoichiometry(k);
            for (int i = 0; i < 4; ++i)
                drift(i) += z[static_cast<std::size_t>(i)] * a[k];
        }
        for (int i = 0; i < 4; ++i)
            xv(i) = static_cast<double>(x[static_cast<std::size_t>(i)]);
        EXPECT_TRUE(drift.isApprox(m.SW() * xv + m.Sw0(), 1e-12) || (drift - m.SW() * xv - m.Sw0()).norm() < 1e-9);
    }
}

TEST(Hurwitz, GeneExpressionWitness) {
    const auto r = hurwitz_check(gene_expression_model().SW());
    ASSERT_TRUE(r.hurwitz);
    ASSERT_TRUE(r.via_lp);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_TRUE((r.witness->array() >= 1.0 - 1e-12).all());
    EXPECT_TRUE(((r.witness->transpose() * gene_expression_model().SW()).array() <= -kLpEpsilon + 1e-12).all());
}

TEST(Hurwitz, LpVerdictMatchesEigenvalues) {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_real_distribution<double> off(0.0, 1.0), diag(-4.0, 0.5), coin(0.0, 1.0);
    int disagreements = 0, stable = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = dim(gen);
        Eigen::MatrixXd M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                M(i, j) = i == j ? diag(gen) : (coin(gen) < 0.5 ? off(gen) : 0.0);
        const bool oracle = spectral_abscissa(M) < 0.0;
        const auto r = hurwitz_check(M);
        EXPECT_TRUE(r.via_lp);
        stable += oracle;
        disagreements += r.hurwitz != oracle;
    }
    EXPECT_EQ(disagreements, 0);
    EXPECT_GT(stable, 100);
    EXPECT_LT(stable, 900);
}

TEST(Hurwitz, NonMetzlerUsesEigenvalues) {
    Eigen::Matrix2d M;
    M << -1, -5, 1, -1;
    const auto r = hurwitz_check(M);
    EXPECT_FALSE(r.via_lp);
    EXPECT_TRUE(r.hurwitz);
}

TEST(Controllability, GeneExpressionGain) {
    for (auto [g1, k2, g2] : {std::tuple{3.0, 2.0, 1.0}, {1.0, 1.0, 1.0}, {0.5, 4.0, 2.5}}) {
        const auto m = gene_expression_model(g1, k2, g2);
        const auto c = output_controllability(m.SW(), m.regulated, m.actuated);
        EXPECT_NEAR(c.impulse_gain, -k2 / (g1 * g2), 1e-9);
        EXPECT_TRUE(c.controllable);
    }
}

TEST(Controllability, DecoupledHasZeroGain) {
    const auto m = build_linear_model(
        parse_network("species A B\nactuated A\nregulated B\nA -> 0 @ 1\n0 -> B @ 1\nB -> 0 @ 1\n"));
    const auto c = output_controllability(m.SW(), m.regulated, m.actuated);
    EXPECT_EQ(c.impulse_gain, 0.0);
    EXPECT_FALSE(c.controllable);
}

TEST(Controllability, SingularThrows) {
    EXPECT_THROW(inverse_entry(Eigen::Matrix2d::Zero(), 0, 0), std::domain_error);
}

TEST(Accessibility, BirthDeathClosedForm) {
    // single species with birth b and death g: accessible iff mu/theta > b/g
    for (auto [b, g] : {std::pair{3.0, 1.0}, {1.0, 4.0}, {10.0, 2.5}}) {
        const auto m = build_linear_model(parse_network("0 -> X @ " + std::to_string(b) + "\nX -> 0 @ " +
                                                        std::to_string(g) + "\n"));
        EXPECT_TRUE(accessibility_check(m, 1.05 * b / g, 1.0).accessible);
        EXPECT_FALSE(accessibility_check(m, 0.95 * b / g, 1.0).accessible);
        const auto r = accessibility_check(m, 2.0 * b / g, 1.0);
        EXPECT_NEAR(r.min_set_point, b / g, 2e-3 * b / g);
        ASSERT_TRUE(r.witness.has_value());
        EXPECT_TRUE(accessibility_condition(m, 2.0 * b / g, 1.0, r.witness->c, r.witness->v));
    }
}

TEST(Accessibility, WitnessIsScaleInvariant) {
    const auto m = build_linear_model(parse_network("species X1 X2\nactuated X1\nregulated X2\n0 -> X1 @ 0.5\n"
                                                    "X1 -> 0 @ 3\nX1 -> X1 + X2 @ 2\nX2 -> 0 @ 1\n"));
    const auto r = accessibility_check(m, 3.0, 1.0);
    ASSERT_TRUE(r.accessible);
    const auto& w = *r.witness;
    EXPECT_TRUE(accessibility_condition(m, 3.0, 1.0, w.c, w.v));
    EXPECT_TRUE(accessibility_condition(m, 3.0, 1.0, w.c, (10.0 * w.v).eval()));
    EXPECT_TRUE(accessibility_condition(m, 3.0, 1.0, w.c, (0.1 * w.v).eval()));
}

TEST(Accessibility, ZeroBasalProductionIsAlwaysAccessible) {
    const auto r = accessibility_check(gene_expression_model(), 0.01, 1.0);
    EXPECT_TRUE(r.accessible);
}

TEST(SteadyState, GeneExpressionPrediction) {
    const auto p = predict_steady_state(gene_expression_model(), {3, 1, 50, 1});
    EXPECT_NEAR(p.mean_X(0), 1.5, 1e-9);
    EXPECT_NEAR(p.mean_X(1), 3.0, 1e-9);
    EXPECT_NEAR(p.mean_Z1, 4.5, 1e-9);
    // actuation rate k E[Z1] scales with 1/k in E[Z1]
    EXPECT_NEAR(predict_steady_state(gene_expression_model(), {3, 1, 50, 2}).mean_Z1, 2.25, 1e-9);
}

TEST(SteadyState, BasalProduction) {
    // 0 -> X @ b, X -> 0 @ g, controller adds g mu/theta - b
    const auto m = build_linear_model(parse_network("0 -> X @ 1\nX -> 0 @ 2\n"));
    const auto p = predict_steady_state(m, {3, 1, 10, 1});
    EXPECT_NEAR(p.mean_X(0), 3.0, 1e-9);
    EXPECT_NEAR(p.mean_Z1, 5.0, 1e-9);
    EXPECT_THROW(predict_steady_state(m, {0.2, 1, 10, 1}), std::domain_error);
}

TEST(MetabolicLoad, GeneExpression) {
    const auto m = gene_expression_model();
    EXPECT_NEAR(metabolic_load({3, 1, 50, 1}, m, {1, 1, 1, 1}), 13.5, 1e-9);
    EXPECT_NEAR(metabolic_load({3, 1, 50, 1}, m, {0, 0, 0, 1}), 4.5, 1e-9);
    EXPECT_NEAR(metabolic_load({3, 1, 50, 1}, m, {1, 2, 3, 0}), 18.0, 1e-9);
}

TEST(Analyze, ReportsEachCondition) {
    const auto ok = analyze(gene_expression_model(), {3, 1, 50, 1});
    EXPECT_TRUE(ok.all_conditions());
    ASSERT_TRUE(ok.predicted_mean_X.has_value());

    const auto birth = analyze(build_linear_model(parse_network("X -> X + X @ 1\n")), {3, 1, 50, 1});
    EXPECT_FALSE(birth.hurwitz);
    EXPECT_FALSE(birth.predicted_mean_X.has_value());
}
