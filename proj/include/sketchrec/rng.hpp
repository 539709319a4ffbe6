#pragma once

#include <cstdint>
#include <random>

namespace sketchrec {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The standard distributions are implementation-defined, so every
/// conversion (uniform reals, bounded integers, normals) is done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for (stream, substream) derived from a base seed.
    /// Used for per-point, per-trial seeding in sweeps.
    static Rng for_stream(std::uint64_t base_seed, std::uint64_t stream, std::uint64_t substream);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, bound), unbiased. bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    bool coin() { return (next_u64() >> 63) != 0; }

    /// Standard normal via the Box-Muller transform; caches the paired draw.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; the stream-mixing hash behind Rng::for_stream.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace sketchrec
