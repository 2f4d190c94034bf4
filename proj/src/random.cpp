#include "senate/random.hpp"

#include <cmath>
#include <numbers>

namespace senate {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, Stream purpose) {
  return Rng(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(purpose)));
}

Rng make_stream(std::uint64_t seed, Stream purpose, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(purpose)) + index));
}

// The standard distributions are implementation-defined; these two are
// spelled out so that seeded output is identical across standard libraries.
double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double standard_normal(Rng& rng) {
  // Box-Muller, one draw per call; u1 in (0, 1].
  const double u1 = 1.0 - uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace senate
