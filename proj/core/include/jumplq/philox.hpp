#pragma once

#include <array>
#include <cstdint>

namespace jumplq {

/// Philox-4x32-10 block cipher (Salmon et al., SC 2011).
///
/// This is the permanent generator of the library: every stochastic quantity
/// is derived from Philox blocks, so results are reproducible bit-for-bit
/// across platforms, thread counts and library versions.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// A counter-based random stream keyed by (seed, stream_id).
///
/// Streams with distinct (seed, stream_id) pairs are statistically
/// independent; a stream's output depends only on its key and on how many
/// values were drawn, never on other streams or on scheduling. Monte Carlo
/// runs key one stream per path index.
///
/// Layout (fixed permanently): key = {seed_lo, seed_hi},
/// counter = {block_lo, block_hi, stream_lo, stream_hi}.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform double in the open interval (0, 1); 53-bit resolution, never
    /// exactly 0 or 1 (safe under log()).
    double uniform01();

    /// Standard normal via Box-Muller (consumes uniforms in pairs; the
    /// second value of a pair is cached).
    double normal();

    /// Exponential with the given rate > 0.
    double exponential(double rate);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffer_pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

/// Deterministically derives a child seed from (seed, a, b); used to give
/// sub-experiments (e.g. Gram matrix cells) their own independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace jumplq
