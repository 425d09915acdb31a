#pragma once

#include <cstdint>
#include <limits>

namespace bmdp {

/// Counter-based generator: the n-th output of a stream is a pure function of
/// (key, n), so streams are reproducible on every platform and can be split
/// into independent children without sharing state.
///
/// The output function is the SplitMix64 finalizer applied to
/// key + n * golden_gamma, i.e. the SplitMix64 sequence seeded with `key`.
class Rng {
public:
    using result_type = std::uint64_t;

    constexpr explicit Rng(std::uint64_t seed = 0) noexcept : key_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return next_u64(); }

    constexpr std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * kGamma);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform01() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); n must be positive. Rejection sampling keeps
    /// the result exactly uniform.
    constexpr std::uint64_t uniform_index(std::uint64_t n) noexcept {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    constexpr bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Independent child stream; does not advance this stream.
    [[nodiscard]] constexpr Rng split(std::uint64_t stream) const noexcept {
        return Rng(mix64(key_ ^ mix64(stream + kGamma)));
    }

    [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t position() const noexcept { return counter_; }

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bmdp
