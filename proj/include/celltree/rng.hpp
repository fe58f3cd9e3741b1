#pragma once

#include <cstdint>
#include <random>

namespace celltree {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// A seeded random stream. Child streams are derived from the seed alone,
/// never from the current engine state, so derive(a).derive(b) is the same
/// stream no matter how much the parent has already been consumed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    [[nodiscard]] RngStream derive(std::uint64_t id) const {
        return RngStream(mix64(seed_ ^ mix64(id + 0x632be59bd9b4e019ULL)));
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace celltree
