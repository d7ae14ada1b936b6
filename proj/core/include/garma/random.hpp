#pragma once

#include "garma/types.hpp"

#include <array>
#include <cstdint>

namespace garma {

/// SplitMix64 step; used for seeding and substream derivation.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/**
 * xoshiro256** 1.0 (Blackman & Vigna). Portable, fixed output for a given
 * seed on every platform. The 256-bit state is filled by four SplitMix64
 * outputs starting from the seed.
 *
 * Substream i of seed s is the generator seeded with
 *   s ^ (0x9E3779B97F4A7C15 * (i + 1))
 * which the SplitMix64 expansion then decorrelates.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    [[nodiscard]] static Rng substream(std::uint64_t seed, std::uint64_t index) noexcept;

    result_type operator()() noexcept;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    /// Uniform on [0,1) with 53 random bits.
    [[nodiscard]] double uniform() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

/**
 * Poisson variate. Sequential-search inversion for lambda < 10, otherwise
 * the PTRS transformed rejection sampler (Hoermann 1993).
 */
[[nodiscard]] Count poisson(Rng& rng, double lambda);

}  // namespace garma
