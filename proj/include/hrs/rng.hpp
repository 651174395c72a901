#pragma once

#include <array>
#include <cstdint>

#include "hrs/vec3.hpp"

namespace hrs {

// Counter-based generator (Philox4x32-10). Each (seed, stream_id) pair names
// an independent sequence; the stream id occupies the upper half of the
// counter, so streams never overlap for fewer than 2^64 blocks.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    // Uniform point in the closed unit ball (rejection from the cube).
    Vec3 unit_ball();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

inline RandomStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return RandomStream(seed, stream_id);
}

// Deterministic derivation of a stream id from structured coordinates
// (experiment salt, trial, purpose). SplitMix64 finalizer on each word.
std::uint64_t derive_stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

}  // namespace hrs
