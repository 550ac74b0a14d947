#ifndef SHAPCRED_RNG_HPP
#define SHAPCRED_RNG_HPP

#include <cstdint>
#include <random>

namespace shapcred {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream label.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept
{
   // splitmix64 finalizer over the combined value
   std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
   z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
   return z ^ (z >> 31);
}

inline double uniform01(Rng& rng)
{
   return std::uniform_real_distribution< double >(0., 1.)(rng);
}

}  // namespace shapcred

#endif  // SHAPCRED_RNG_HPP
