#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace resodyn {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * The 64-bit key selects the experiment seed and the upper half of the
 * 128-bit counter selects an independent substream, so every Monte-Carlo
 * realization owns a reproducible stream regardless of which thread runs it.
 * Satisfies UniformRandomBitGenerator with 64-bit output.
 */
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Raw block for a given counter; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned used_ = 4;
};

/// Substream for realization `index` of an experiment seeded with `seed`.
inline Philox4x32 substream(std::uint64_t seed, std::uint64_t index) noexcept { return Philox4x32(seed, index); }

}  // namespace resodyn
