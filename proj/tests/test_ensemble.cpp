#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "aic/csv.hpp"
#include "aic/ensemble.hpp"
#include "aic/parser.hpp"

using namespace aic;

namespace {

EnsembleOptions options(std::size_t paths, unsigned threads) {
    EnsembleOptions o;
    o.grid = make_grid(10.0, 0.5);
    o.n_paths = paths;
    o.master_seed = 21;
    o.threads = threads;
    o.rate_window = std::pair{5.0, 10.0};
    return o;
}

const char* kNet = "0 -> A @ 3\nA -> B @ 1\nA + B -> 0 @ 0.1\nB -> 0 @ 0.5\n";

} // namespace

TEST(Grid, EndsAtTEnd) {
    const auto g = make_grid(1.0, 0.3);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.back(), 1.0);
    EXPECT_EQ(make_grid(60.0, 0.1).size(), 601u);
    EXPECT_THROW(make_grid(1.0, 0.0), std::invalid_argument);
}

TEST(Ensemble, SerialAndParallelAreBitwiseEqual) {
    const auto net = parse_network(kNet);
    const auto serial = simulate_ensemble(net, State::zeros(2), 10.0, options(333, 1));
    const auto parallel = simulate_ensemble(net, State::zeros(2), 10.0, options(333, 4));
    EXPECT_TRUE(serial == parallel);
    std::ostringstream a, b;
    write_ensemble_csv(a, serial, {{0, 1}});
    write_ensemble_csv(b, parallel, {{0, 1}});
    EXPECT_EQ(a.str(), b.str());
}

TEST(Ensemble, SinglePhaseEqualsPlainRun) {
    const auto net = parse_network(kNet);
    const std::vector<Phase> phases{{0.0, net}};
    const auto plain = simulate_ensemble(net, State::zeros(2), 10.0, options(200, 2));
    const auto scheduled = simulate_ensemble(phases, State::zeros(2), 10.0, options(200, 2));
    EXPECT_TRUE(plain == scheduled);
}

TEST(Ensemble, UnchangedSecondPhaseDiffersOnlyInRandomness) {
    // a schedule event that changes nothing still restarts the pending firing;
    // statistics must agree within noise
    const auto net = parse_network("0 -> A @ 3\nA -> 0 @ 1\n");
    const std::vector<Phase> phases{{0.0, net}, {5.0, net}};
    const auto st = simulate_ensemble(phases, State::zeros(1), 10.0, options(2000, 0));
    EXPECT_NEAR(st.mean.back()[0], 3.0, 4.0 * st.sem.back()[0]);
}

TEST(Ensemble, PureDeathMoments) {
    const auto net = parse_network("A -> 0 @ 1\n");
    auto o = options(4000, 0);
    const auto st = simulate_ensemble(net, State(std::vector<Count>{50}), 10.0, o);
    for (std::size_t g = 0; g < st.grid.size(); g += 4) {
        const double p = std::exp(-st.grid[g]);
        const double var = 50.0 * p * (1.0 - p);
        if (var == 0.0) {
            EXPECT_EQ(st.mean[g][0], 50.0);
            continue;
        }
        EXPECT_NEAR(st.mean[g][0], 50.0 * p, 4.0 * st.sem[g][0]);
        if (50.0 * p >= 5.0) { // the normal approximation to the variance sem needs a non-degenerate law
            EXPECT_NEAR(st.var[g][0], var, 4.0 * var * std::sqrt(2.0 / 4000.0));
        }
    }
}

TEST(Ensemble, IndependentSpeciesHaveZeroCovariance) {
    const auto net = parse_network("species A B\n0 -> A @ 2\nA -> 0 @ 1\n0 -> B @ 5\nB -> 0 @ 1\n");
    const auto st = simulate_ensemble(net, State::zeros(2), 10.0, options(3000, 0));
    const auto* p = st.pair(0, 1);
    ASSERT_NE(p, nullptr);
    const auto g = st.grid.size() - 1;
    EXPECT_NEAR(p->cov[g], 0.0, 4.0 * p->cov_sem[g]);
    EXPECT_NEAR(p->product_mean[g], 10.0, 4.0 * p->product_sem[g]);
}

TEST(Ensemble, FiringRates) {
    const auto net = parse_network("birth: 0 -> A @ 3\ndeath: A -> 0 @ 1\n");
    const auto st = simulate_ensemble(net, State::zeros(1), 10.0, options(2000, 0));
    ASSERT_EQ(st.reaction_labels.size(), 2u);
    EXPECT_EQ(st.reaction_labels[0], "birth");
    EXPECT_NEAR(st.firing_rate[0], 3.0, 4.0 * st.firing_rate_sem[0]);
    EXPECT_NEAR(st.firing_rate[1], 3.0, 4.0 * st.firing_rate_sem[1]);
}

TEST(Ensemble, DivergenceStopsTheRun) {
    const auto net = parse_network("A -> A + A @ 1\n");
    auto o = options(100, 2);
    o.ceiling = 500;
    EXPECT_THROW(simulate_ensemble(net, State(std::vector<Count>{1}), 10.0, o), DivergenceError);
}
