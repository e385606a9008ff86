#include <random>
#include <string>

#include <gtest/gtest.h>

#include "aic/network.hpp"
#include "aic/parser.hpp"

using namespace aic;

namespace {

const char* kGeneExpression = R"(
# mRNA and protein
species X1 X2
actuated X1
regulated X2
X1 -> 0 @ 3
k2: X1 -> X1 + X2 @ 2
X2 -> 0 @ 1
)";

ParseError parse_failure(const std::string& text) {
    try {
        parse_network(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no ParseError for: " << text;
    return ParseError(0, 0, "none");
}

} // namespace

TEST(Parser, GeneExpression) {
    const auto net = parse_network(kGeneExpression);
    ASSERT_EQ(net.num_species(), 2u);
    ASSERT_EQ(net.num_reactions(), 3u);
    EXPECT_EQ(net.species()[net.actuated()], "X1");
    EXPECT_EQ(net.species()[net.regulated()], "X2");
    auto k2 = net.find_reaction("k2");
    ASSERT_TRUE(k2.has_value());
    EXPECT_EQ(*k2, 1u);
    EXPECT_EQ(net.stoichiometry(*k2), (std::vector<int>{0, 1}));
    EXPECT_EQ(net.stoichiometry(0), (std::vector<int>{-1, 0}));
    EXPECT_DOUBLE_EQ(std::get<MassAction>(net.reaction(*k2).kind).rate, 2.0);
}

TEST(Parser, DefaultsToFirstAndLastSpecies) {
    const auto net = parse_network("A -> B @ 1\nB -> C @ 2\n");
    EXPECT_EQ(net.species()[net.actuated()], "A");
    EXPECT_EQ(net.species()[net.regulated()], "C");
}

TEST(Parser, Multiplicity) {
    const auto net = parse_network("2 A -> B @ 0.5\n");
    EXPECT_TRUE(net.reaction(0).is_homodimer());
    EXPECT_EQ(net.stoichiometry(0), (std::vector<int>{-2, 1}));
}

TEST(Parser, HillRateLaw) {
    const auto net = parse_network("species X1 X2\n0 -> X1 @ hill(8.22, 3, 1, X2)\nX1 -> 0 @ 1\nX2 -> 0 @ 1\n");
    const auto& h = std::get<RepressingHill>(net.reaction(0).kind);
    EXPECT_DOUBLE_EQ(h.alpha, 8.22);
    EXPECT_DOUBLE_EQ(h.K, 3.0);
    EXPECT_EQ(h.n, 1);
    EXPECT_EQ(h.input, 1u);
}

TEST(Parser, NegativeRateReportsPosition) {
    const auto e = parse_failure("A -> B @ 1\nB -> 0 @ -2\n");
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 10u);
}

TEST(Parser, Errors) {
    EXPECT_EQ(parse_failure("species A\nfoo A\nA -> 0 @ 1").line(), 2u);
    EXPECT_EQ(parse_failure("A + B + C -> 0 @ 1").line(), 1u);
    EXPECT_EQ(parse_failure("A -> 0 @ hill(1, 1, 1, A)").line(), 1u);
    EXPECT_EQ(parse_failure("A -> 0 @ hill(1, 1, 0, A)").line(), 1u);
    EXPECT_THROW(parse_network("# nothing\n"), ParseError);
    EXPECT_EQ(parse_failure("A -> 0 @ 1\nregulated Q\n").line(), 2u);
    EXPECT_EQ(parse_failure("species A A\n").line(), 1u);
    EXPECT_EQ(parse_failure("A -> 0 @ 1 junk").line(), 1u);
    EXPECT_EQ(parse_failure("A -> 0 @ fast").line(), 1u);
    EXPECT_EQ(parse_failure("A => 0 @ 1").line(), 1u);
}

TEST(Parser, RenderRoundTrip) {
    std::mt19937_64 gen(42);
    const std::vector<std::string> names{"A", "B", "C_1", "Dimer", "x2"};
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<int> n_reac(1, 6), n_spec(1, 5), order(0, 2), pick(0, 4), coin(0, 3);
        const int d = n_spec(gen);
        std::string text = "species";
        for (int i = 0; i < d; ++i)
            text += " " + names[static_cast<std::size_t>(i)];
        text += "\n";
        std::uniform_int_distribution<int> sp(0, d - 1);
        std::uniform_real_distribution<double> rate(0.0, 100.0);
        const int K = n_reac(gen);
        for (int k = 0; k < K; ++k) {
            if (coin(gen) == 0)
                text += "r" + std::to_string(k) + ": ";
            auto side = [&](int n) {
                if (n == 0)
                    return std::string("0");
                std::string out = names[static_cast<std::size_t>(sp(gen))];
                for (int i = 1; i < n; ++i)
                    out += " + " + names[static_cast<std::size_t>(sp(gen))];
                return out;
            };
            const int o = order(gen);
            if (o == 0 && coin(gen) == 0) {
                text += "0 -> " + side(1) + " @ hill(" + std::to_string(rate(gen)) + ", 2.5, " +
                        std::to_string(1 + pick(gen)) + ", " + names[static_cast<std::size_t>(sp(gen))] + ")\n";
                continue;
            }
            text += side(o) + " -> " + side(pick(gen) % 3) + " @ " + std::to_string(rate(gen)) + "\n";
        }
        const auto net = parse_network(text);
        const auto rendered = render_network(net);
        const auto again = parse_network(rendered);
        EXPECT_EQ(net, again) << text << "\n---\n" << rendered;
        EXPECT_EQ(rendered, render_network(again));
    }
}

TEST(Propensity, Examples) {
    const auto net = parse_network("species A B\nA -> 0 @ 2\nA + B -> 0 @ 0.5\n2 A -> B @ 0.1\n0 -> A @ 4\n"
                                   "0 -> A @ hill(8.22, 3, 1, B)\n");
    const State x(std::vector<Count>{5, 3});
    const auto a = propensity(net, x);
    EXPECT_DOUBLE_EQ(a[0], 10.0);
    EXPECT_DOUBLE_EQ(a[1], 7.5);
    EXPECT_DOUBLE_EQ(a[2], 2.0); // 0.1 * 5 * 4
    EXPECT_DOUBLE_EQ(a[3], 4.0);
    EXPECT_DOUBLE_EQ(a[4], 4.11);

    const auto one = propensity(net, State(std::vector<Count>{1, 0}));
    EXPECT_DOUBLE_EQ(one[2], 0.0);
    EXPECT_DOUBLE_EQ(one[4], 8.22);
}

TEST(Propensity, ZeroPropensityCannotFire) {
    const auto net = parse_network("A -> 0 @ 1\n");
    EXPECT_THROW(apply_reaction(State::zeros(1), net, 0), std::logic_error);
    EXPECT_THROW(State(std::vector<Count>{-1}), std::invalid_argument);
}

TEST(Propensity, AdmissibleStatesStayNonnegative) {
    const auto net = parse_network("species A B\nA -> 0 @ 1\nA + B -> A @ 1\n2 A -> B @ 1\n2 B -> 0 @ 2\nB -> A + A @ 1\n");
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<Count> count(0, 3);
    for (int i = 0; i < 2000; ++i) {
        const State x(std::vector<Count>{count(gen), count(gen)});
        const auto a = propensity(net, x);
        for (std::size_t k = 0; k < net.num_reactions(); ++k) {
            ASSERT_GE(a[k], 0.0);
            if (a[k] > 0.0) {
                const auto y = apply_reaction(x, net, k);
                EXPECT_GE(y[0], 0);
                EXPECT_GE(y[1], 0);
            }
        }
    }
}

TEST(Network, WithRateAndValidation) {
    const auto net = parse_network(kGeneExpression);
    const auto faster = net.with_rate(1, 6.0);
    EXPECT_DOUBLE_EQ(std::get<MassAction>(faster.reaction(1).kind).rate, 6.0);
    EXPECT_DOUBLE_EQ(std::get<MassAction>(net.reaction(1).kind).rate, 2.0);
    EXPECT_THROW(net.with_rate(0, -1.0), std::invalid_argument);
}
