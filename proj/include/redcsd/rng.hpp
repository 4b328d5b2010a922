#pragma once

#include <cstdint>
#include <random>

namespace redcsd {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of stream `stream` of work unit `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0) noexcept;

/**
 * Seedable, splittable generator.  Each instance owns a 64-bit Mersenne
 * Twister seeded through SplitMix64, so nearby seeds give unrelated
 * streams.  Instances are not shared between threads; split() hands out
 * child streams keyed by an index.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Independent child stream determined by (seed, index).
    Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index, 0x5eed)); }

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace redcsd
