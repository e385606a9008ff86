#include <cmath>

#include <gtest/gtest.h>

#include "aic/controller.hpp"
#include "aic/ensemble.hpp"
#include "aic/parser.hpp"

using namespace aic;

namespace {

ReactionNetwork gene_expression() {
    return parse_network("species X1 X2\nactuated X1\nregulated X2\nX1 -> 0 @ 3\nk2: X1 -> X1 + X2 @ 2\n"
                         "X2 -> 0 @ 1\n");
}

} // namespace

TEST(Antithetic, AugmentationAddsTwoSpeciesAndFourReactions) {
    const auto open = gene_expression();
    const auto cl = augment_antithetic(open, {3, 1, 50, 1});
    ASSERT_EQ(cl.net.num_species(), 4u);
    ASSERT_EQ(cl.net.num_reactions(), 7u);
    EXPECT_EQ(cl.net.species()[cl.z1()], "Z1");
    EXPECT_EQ(cl.net.species()[cl.z2()], "Z2");
    EXPECT_TRUE(cl.warnings.empty());

    auto zeta = [&](const char* label) { return cl.net.stoichiometry(*cl.net.find_reaction(label)); };
    EXPECT_EQ(zeta(kReferenceLabel), (std::vector<int>{0, 0, 1, 0}));
    EXPECT_EQ(zeta(kMeasurementLabel), (std::vector<int>{0, 0, 0, 1}));
    EXPECT_EQ(zeta(kComparisonLabel), (std::vector<int>{0, 0, -1, -1}));
    EXPECT_EQ(zeta(kActuationLabel), (std::vector<int>{1, 0, 0, 0}));

    // measurement is catalysed by X2, actuation by Z1
    const State x(std::vector<Count>{0, 4, 2, 3});
    const auto a = propensity(cl.net, x);
    EXPECT_DOUBLE_EQ(a[3], 3.0);
    EXPECT_DOUBLE_EQ(a[4], 4.0);
    EXPECT_DOUBLE_EQ(a[5], 300.0);
    EXPECT_DOUBLE_EQ(a[6], 2.0);
}

TEST(Antithetic, NameCollisionIsRenamed) {
    const auto open = parse_network("species Z1 X\nactuated Z1\nregulated X\nZ1 -> Z1 + X @ 1\nX -> 0 @ 1\nZ1 -> 0 @ 1\n");
    const auto cl = augment_antithetic(open, {1, 1, 1, 1});
    EXPECT_EQ(cl.net.species()[cl.z1()], "Z1_1");
    EXPECT_EQ(cl.net.species()[cl.z2()], "Z2");
    ASSERT_EQ(cl.warnings.size(), 1u);
    EXPECT_EQ(strip_controller(cl), open);
}

TEST(Antithetic, StripRoundTrip) {
    const auto open = gene_expression();
    EXPECT_EQ(strip_controller(augment_antithetic(open, {3, 1, 50, 1})), open);
    EXPECT_EQ(strip_controller(augment_hill(open, {8.22, 3, 1})), open);
    EXPECT_EQ(strip_controller(open_loop(open)), open);
}

TEST(Antithetic, InvalidParameters) {
    EXPECT_THROW(augment_antithetic(gene_expression(), {0, 1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(augment_antithetic(gene_expression(), {1, 1, -1, 1}), std::invalid_argument);
    EXPECT_THROW(augment_hill(gene_expression(), {1, 1, 0}), std::invalid_argument);
}

TEST(Antithetic, WithParameter) {
    const auto cl = augment_antithetic(gene_expression(), {3, 1, 50, 1});
    const auto up = with_parameter(cl, "mu", 5);
    EXPECT_DOUBLE_EQ(std::get<AntitheticSpec>(up.controller).mu, 5.0);
    EXPECT_DOUBLE_EQ(std::get<MassAction>(up.net.reaction(*up.net.find_reaction(kReferenceLabel)).kind).rate, 5.0);
    const auto k2 = with_parameter(cl, "k2", 6);
    EXPECT_DOUBLE_EQ(std::get<MassAction>(k2.net.reaction(1).kind).rate, 6.0);
    EXPECT_THROW(with_parameter(cl, "nope", 1), std::invalid_argument);
    EXPECT_THROW(with_parameter(cl, kReferenceLabel, 1), std::invalid_argument);
    EXPECT_THROW(with_parameter(cl, "theta", 0), std::invalid_argument);
}

TEST(Hill, AugmentationAndParameters) {
    const auto cl = augment_hill(gene_expression(), {8.22, 3, 1});
    ASSERT_EQ(cl.net.num_reactions(), 4u);
    EXPECT_THROW(cl.z1(), std::logic_error);
    const auto a = propensity(cl.net, State(std::vector<Count>{0, 3}));
    EXPECT_DOUBLE_EQ(a[3], 4.11);
    const auto sharper = with_parameter(cl, "n", 2);
    EXPECT_EQ(std::get<RepressingHill>(sharper.net.reaction(3).kind).n, 2);
    EXPECT_THROW(with_parameter(cl, "n", 1.5), std::invalid_argument);
    EXPECT_THROW(with_parameter(cl, "mu", 1), std::invalid_argument);
}

TEST(DeltaZ, StandardErrorUsesCovariance) {
    EnsembleStats st;
    st.species = {"Z1", "Z2"};
    st.grid = {0.0};
    st.n_paths = 100;
    st.mean = {{5.0, 2.0}};
    st.var = {{4.0, 1.0}};
    st.sem = {{0.2, 0.1}};
    PairSeries p;
    p.a = 0;
    p.b = 1;
    p.cov = {-1.0};
    st.pairs.push_back(p);
    const auto dz = delta_z(st);
    EXPECT_DOUBLE_EQ(dz.value[0], 3.0);
    EXPECT_DOUBLE_EQ(dz.sem[0], std::sqrt(7.0 / 100.0));
}
