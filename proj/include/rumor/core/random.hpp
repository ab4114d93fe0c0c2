#pragma once
// Portable seeded randomness. std::mt19937_64's output sequence is fixed by
// the standard; the std distributions and std::shuffle are not, so draws are
// derived here by hand.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace rumor {

using Rng = std::mt19937_64;

// Uniform double in [0, 1).
inline double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform index in [0, n), n > 0, by rejection.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t v = 0;
    do v = rng();
    while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

// k distinct elements of `pool`, in draw order (partial Fisher-Yates).
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, Rng& rng) {
    for (std::size_t i = 0; i < k && i < pool.size(); ++i)
        std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    pool.resize(std::min(k, pool.size()));
    return pool;
}

}  // namespace rumor
