#pragma once

#include <array>
#include <cstdint>

namespace ndasnr {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: every output block is a
// pure function of (counter, key), so any draw can be reproduced in isolation.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Key derived from a 64-bit seed (low word first).
constexpr Philox4x32::Key philox_key(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of two 64-bit tokens into a new seed.
std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) noexcept;

/// Maps 32 random bits onto (0, 1), never hitting either end.
double uniform_open01(std::uint32_t bits) noexcept;

/// Maps 64 random bits onto (0, 1) with 52-bit resolution.
double uniform_open01(std::uint64_t bits) noexcept;

/// Inverse of the standard normal CDF. Requires 0 < p < 1.
double standard_normal_quantile(double p);

}  // namespace ndasnr
