#include "ddspde/rng.hpp"

#include <cmath>
#include <numbers>

namespace ddspde {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t key, std::uint64_t word) {
    return mix64(key ^ (word + 0x9E3779B97F4A7C15ULL + (key << 6) + (key >> 2)));
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return combine(combine(seed, 0x73747265616D73ULL), index);
}

namespace {

// 53-bit uniform in (0, 1].
double uniform_open(std::uint64_t bits) {
    return ((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

double standard_normal(std::uint64_t key) {
    const std::uint64_t a = mix64(key);
    const std::uint64_t b = mix64(key ^ 0xD1B54A32D192ED03ULL);
    const double u1 = uniform_open(a);
    const double u2 = uniform_open(b);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ddspde
