#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace infoflow {

/// splitmix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed for the named substream of a master seed, e.g. ("lpa", run index).
constexpr std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                       std::uint64_t index = 0) noexcept {
    return mix64(mix64(master ^ hash_name(name)) + mix64(index + 1));
}

using Rng = std::mt19937_64;

/// Uniform double in [0,1) built from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    // Lemire-style rejection keeps the result unbiased and portable.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Fisher-Yates with uniform_index, so shuffles are portable too.
template <class Range>
void portable_shuffle(Range& range, Rng& rng) {
    const auto n = static_cast<std::uint64_t>(std::size(range));
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = uniform_index(rng, i);
        using std::swap;
        swap(range[i - 1], range[j]);
    }
}

}  // namespace infoflow
