#include <array>
#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "aic/random.hpp"

using namespace aic;

// Known-answer vectors for Philox4x32-10 (Random123 kat_vectors).
TEST(Philox, KnownAnswers) {
    using Block = std::array<std::uint32_t, 4>;
    EXPECT_EQ(PathRng::philox_block({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(PathRng::philox_block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(PathRng::philox_block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(PathRng, StreamsDependOnlyOnSeedAndPath) {
    PathRng a(SeedSpec{11, 3}), b(SeedSpec{11, 3}), c(SeedSpec{11, 4}), d(SeedSpec{12, 3});
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        EXPECT_NE(x, c.next_u64());
        EXPECT_NE(x, d.next_u64());
    }
}

TEST(PathRng, UniformMoments) {
    PathRng r(SeedSpec{1, 0});
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    const double mean = s / n;
    EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(s2 / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(PathRng, ExponentialMean) {
    PathRng r(SeedSpec{5, 9});
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += r.exponential(4.0);
    EXPECT_NEAR(s / n, 0.25, 4.0 * 0.25 / std::sqrt(n));
}
