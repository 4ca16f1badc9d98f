#pragma once

// Counter-based deterministic randomness. Every random decision in the
// library is derived by mixing a few integer coordinates (seed, repetition,
// position, ...) through an avalanching finalizer, so results are
// reproducible across platforms, runs, and thread counts.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace stars {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Chainable key derivation: order-sensitive, avalanching.
inline std::uint64_t key_combine(std::uint64_t key, std::uint64_t v) {
    return mix64((key ^ mix64(v)) + kGolden);
}

// Domain separation tags so unrelated decision streams never alias.
namespace tag {
inline constexpr std::uint64_t hash_fn   = 0x68617368666E0001ULL;
inline constexpr std::uint64_t direction = 0x6469726563740002ULL;
inline constexpr std::uint64_t min_score = 0x6D696E7363720003ULL;
inline constexpr std::uint64_t coin      = 0x636F696E00000004ULL;
inline constexpr std::uint64_t leaders   = 0x6C65616465720005ULL;
inline constexpr std::uint64_t split     = 0x73706C6974000006ULL;
inline constexpr std::uint64_t shift     = 0x7368696674000007ULL;
inline constexpr std::uint64_t bucket    = 0x6275636B65740008ULL;
inline constexpr std::uint64_t datagen   = 0x67656E0000000009ULL;
inline constexpr std::uint64_t replica   = 0x7265706C6963000AULL;
}  // namespace tag

// Top 53 bits as a double in [0, 1).
inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// (0, 1]; safe as a log() argument.
inline double to_unit_open(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// One standard normal from a 64-bit key (Box-Muller, cosine branch).
// Hand-rolled because std::normal_distribution is implementation-defined.
inline double normal_from_key(std::uint64_t key) {
    const double u1 = to_unit_open(mix64(key_combine(key, 1)));
    const double u2 = to_unit(mix64(key_combine(key, 2)));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Small sequential generator for shuffles and sampling. The state walk is
// splitmix64, seeded by a derived key.
class SplitMix {
  public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        state_ += kGolden;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Uniform integer in [0, bound) via Lemire's multiply-shift rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("below: bound must be positive");
        while (true) {
            const std::uint64_t x = (*this)();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
            const std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (0 - bound) % bound)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    // Inclusive range draw.
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
        if (lo > hi) throw std::invalid_argument("between: empty range");
        return lo + below(hi - lo + 1);
    }

    double unit() { return to_unit((*this)()); }

  private:
    std::uint64_t state_;
};

// Portable Fisher-Yates; std::shuffle is implementation-defined.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, SplitMix& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

// First `count` elements of a seeded permutation of [0, m): a without-
// replacement sample, in draw order.
inline std::vector<std::uint32_t> sample_without_replacement(std::size_t m,
                                                             std::size_t count,
                                                             SplitMix& rng) {
    if (count > m) count = m;
    std::vector<std::uint32_t> pool(m);
    for (std::size_t i = 0; i < m; ++i) pool[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace stars
