#ifndef SYMTEST_RNG_HPP
#define SYMTEST_RNG_HPP

#include <cstdint>
#include <random>

namespace symtest {

using Rng = std::mt19937_64;

// Counter-based seed derivation. Streams are identified by a chain of integer
// tags hung off a master seed, so any task (replication, randomization round,
// row) gets its own reproducible stream regardless of thread schedule.
namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return detail::splitmix64(detail::splitmix64(base) ^ detail::splitmix64(tag + 1));
}

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, Tags... rest) {
    return derive_seed(derive_seed(base, tag), rest...);
}

template <typename... Tags>
Rng make_rng(std::uint64_t base, Tags... tags) {
    if constexpr (sizeof...(tags) == 0) {
        return Rng(detail::splitmix64(base));
    } else {
        return Rng(derive_seed(base, tags...));
    }
}

}  // namespace symtest

#endif
