#pragma once

#include "senate/config.hpp"
#include "senate/model.hpp"
#include "senate/random.hpp"

namespace senate {

double true_distance(const NodeTruth& a, const NodeTruth& b);

/// One ranging measurement of a true distance `d` (meters). Never negative.
double estimate_distance(double d, const RangingModel& model, Rng& rng);

/// N nodes uniform in the square, F of them faulty (chosen uniformly).
/// A pure function of the config; the seed comes from `config.seed`
/// unless `seed` is given.
World spawn_world(const ScenarioConfig& config);
World spawn_world(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace senate
