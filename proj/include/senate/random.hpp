#pragma once

#include <cstdint>
#include <random>

namespace senate {

using Rng = std::mt19937_64;

// Independent purposes draw from independent streams so that switching one
// phase on or off never shifts the draws of another.
enum class Stream : std::uint64_t {
  Positions = 1,
  FaultySelection,
  InitialValues,
  Chorus,
  Aloha,
  Ranging,
  Adversary,
  Wnc,
  Kmeans,
  Agreement,
  Finalize,
  Baseline,
  MonteCarlo,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic sub-stream for (seed, purpose).
Rng make_stream(std::uint64_t seed, Stream purpose);

/// Deterministic sub-stream for (seed, purpose, index), e.g. per Monte-Carlo trial.
Rng make_stream(std::uint64_t seed, Stream purpose, std::uint64_t index);

double uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);

}  // namespace senate
