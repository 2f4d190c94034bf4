#include "senate/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace senate {

double true_distance(const NodeTruth& a, const NodeTruth& b) {
  return (a.position - b.position).norm();
}

double estimate_distance(double d, const RangingModel& model, Rng& rng) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ranging::ToA>) {
          return std::max(0.0, d + m.additive_std * standard_normal(rng));
        } else if constexpr (std::is_same_v<T, ranging::Rss>) {
          return d * std::exp(m.mult_log_std * standard_normal(rng));
        } else {
          return d;
        }
      },
      model);
}

World spawn_world(const ScenarioConfig& config) { return spawn_world(config, config.seed); }

World spawn_world(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_nodes);

  Rng positions = make_stream(seed, Stream::Positions);
  Rng faulty_pick = make_stream(seed, Stream::FaultySelection);
  Rng values = make_stream(seed, Stream::InitialValues);

  // Partial Fisher-Yates: the first F entries of the permutation are faulty.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < config.n_faulty; ++i) {
    const auto pick = i + static_cast<int>(faulty_pick() % (n - static_cast<std::size_t>(i)));
    std::swap(order[i], order[pick]);
  }
  std::vector<bool> faulty(n, false);
  for (int i = 0; i < config.n_faulty; ++i) faulty[order[i]] = true;

  World world(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = world[i];
    node.id = static_cast<int>(i);
    const double x = uniform(positions, 0.0, config.area_side);
    const double y = uniform(positions, 0.0, config.area_side);
    node.position = Point(x, y);
    node.is_faulty = faulty[i];
    const auto& range = node.is_faulty ? config.faulty_values : config.good_values;
    node.initial_value = uniform(values, range.lo, range.hi);
    node.pseudonym_budget = node.is_faulty ? config.attack.sybil_seats : 0;
  }
  return world;
}

}  // namespace senate
