#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace aic {

/// Identifies one independent random stream: a pure function of both fields.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
};

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The key is the master seed; the path index occupies the upper half of the
/// counter and the lower half counts blocks drawn so far. Streams for distinct
/// path indices never overlap for fewer than 2^64 blocks per path.
class PathRng {
  public:
    explicit PathRng(SeedSpec seed)
        : key_{static_cast<std::uint32_t>(seed.master_seed), static_cast<std::uint32_t>(seed.master_seed >> 32)},
          path_{static_cast<std::uint32_t>(seed.path_index), static_cast<std::uint32_t>(seed.path_index >> 32)} {}

    std::uint64_t next_u64() {
        if (used_ >= 2)
            refill();
        const auto lo = block_[2 * used_];
        const auto hi = block_[2 * used_ + 1];
        ++used_;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Exponential waiting time with the given rate.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t blocks_drawn() const noexcept { return counter_; }

    /// One Philox4x32-10 block.
    static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, ctr[0], hi0, lo0);
            mulhilo(kMul1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() {
        block_ = philox_block({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                               path_[0], path_[1]},
                              key_);
        ++counter_;
        used_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> path_;
    std::array<std::uint32_t, 4> block_{};
    std::uint64_t counter_ = 0;
    unsigned used_ = 2;
};

} // namespace aic
