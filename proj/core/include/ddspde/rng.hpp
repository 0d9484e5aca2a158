#pragma once

#include <cstdint>

namespace ddspde {

/// Counter-based Gaussian sampling. Every variate is a pure function of a
/// 64-bit key, so Monte Carlo results do not depend on execution order or
/// worker count. Keys are derived by chaining the SplitMix64 finalizer
/// over (seed, sample, step, mode) words.

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Combines two words into a new key.
std::uint64_t combine(std::uint64_t key, std::uint64_t word);

/// Seed for an indexed stream (e.g. one Monte Carlo sample) of a master seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

/// Standard normal variate determined by the key (Box-Muller on two
/// SplitMix64 outputs).
double standard_normal(std::uint64_t key);

}  // namespace ddspde
