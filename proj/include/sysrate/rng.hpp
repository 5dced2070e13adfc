#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sysrate {

/**
 * Counter-based generator (Philox4x32-10, Salmon et al. 2011).
 *
 * Every draw is a pure function of (seed, stream_a, stream_b, index), so
 * trials and steps can be generated in any order or in parallel and still
 * produce identical values.
 */
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint32_t stream_a, std::uint32_t stream_b) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_a_(stream_a),
          stream_b_(stream_b) {}

    constexpr std::array<std::uint32_t, 4> block(std::uint64_t index) const noexcept {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                         stream_a_, stream_b_};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    /// Uniform on the open interval (0, 1), 53 bits.
    double uniform(std::uint64_t index) const noexcept {
        const auto b = block(index);
        return to_unit((std::uint64_t{b[0]} << 32) | b[1]);
    }

    /// Standard normal by Box-Muller on one block.
    double normal(std::uint64_t index) const noexcept {
        const auto b = block(index);
        const double u1 = to_unit((std::uint64_t{b[0]} << 32) | b[1]);
        const double u2 = to_unit((std::uint64_t{b[2]} << 32) | b[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static double to_unit(std::uint64_t x) noexcept {
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_a_;
    std::uint32_t stream_b_;
};

}  // namespace sysrate
