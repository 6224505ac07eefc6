#ifndef EQCOV_RANDOM_HPP
#define EQCOV_RANDOM_HPP

#include <cstdint>
#include <random>

namespace eqcov {

using Rng = std::mt19937_64;

// splitmix64 step; used to spread user seeds and to derive independent
// sub-stream seeds (per repetition, per trial, per model fit).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(splitmix64(base) ^ splitmix64(~salt));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace eqcov

#endif  // EQCOV_RANDOM_HPP
