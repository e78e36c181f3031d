#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace cqed {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output depends only on (key, counter), so any draw can be regenerated
/// independently of how many draws preceded it.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(Key key) : key_(key) {}
    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Counter operator()(Counter ctr) const {
        Key k = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k[0] += 0x9E3779B9u;
                k[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0};
        }
        return ctr;
    }

    /// Two uniforms in the open interval (0, 1) with 53-bit resolution.
    std::array<double, 2> uniform_pair(Counter ctr) const {
        const Counter r = (*this)(ctr);
        return {to_open_unit(r[0], r[1]), to_open_unit(r[2], r[3])};
    }

    /// Standard complex normal: independent real and imaginary parts of
    /// variance 1/2 each, so E|z|^2 = 1 (Box-Muller).
    std::complex<double> complex_normal(Counter ctr) const {
        const auto [u1, u2] = uniform_pair(ctr);
        const double r = std::sqrt(-std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    Key key_;
};

}  // namespace cqed
