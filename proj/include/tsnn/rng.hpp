#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace tsnn {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based 64-bit generator (SplitMix64). Every randomized routine in
/// the library takes a seed plus a stream path (purpose tag, indices) rather
/// than a shared generator, so parallel and serial execution draw identical
/// values. Stream derivation: fold each path element into the key with the
/// SplitMix64 finalizer.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1].
    double next_unit_oc() { return 1.0 - next_unit(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Box-Muller transform; two uniforms per draw.
    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = next_unit_oc();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Unbiased integer in [0, n) via modulo rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Partial Fisher-Yates: choose k distinct elements of `pool` in place;
    /// the chosen elements end up in pool[0..k).
    template <typename T>
    void choose(std::vector<T>& pool, std::size_t k) {
        if (k > pool.size()) throw std::invalid_argument("choose: k exceeds pool size");
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform_int(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Named purpose tags for stream derivation.
namespace streams {
inline constexpr std::uint64_t kRowFactors = 1;
inline constexpr std::uint64_t kColFactors = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kMask = 4;
inline constexpr std::uint64_t kFolds = 5;
inline constexpr std::uint64_t kSubsampleRow = 6;
inline constexpr std::uint64_t kSubsampleCol = 7;
inline constexpr std::uint64_t kData = 8;
inline constexpr std::uint64_t kTune = 9;
inline constexpr std::uint64_t kEval = 10;
}  // namespace streams

/// Derive an independent stream key from (seed, path...). Deterministic and
/// order-sensitive in the path elements.
inline std::uint64_t derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = detail::mix64(seed ^ 0xD1B54A32D192ED03ULL);
    for (std::uint64_t part : path) key = detail::mix64(key ^ detail::mix64(part + 0x9E3779B97F4A7C15ULL));
    return key;
}

inline Rng stream_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_stream(seed, path));
}

}  // namespace tsnn
