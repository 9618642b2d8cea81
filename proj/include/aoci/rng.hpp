#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace aoci {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a tag (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(Rng& rng);

/// Standard normal via Box-Muller; consumes exactly two draws.
double standard_normal(Rng& rng);

/// Uniform integer in [0, n), rejection-sampled so every value is equally likely.
std::size_t uniform_index(Rng& rng, std::size_t n);

bool bernoulli(Rng& rng, double p);

}  // namespace aoci
