#pragma once

#include <Eigen/Core>
#include <variant>
#include <vector>

namespace senate {

using Point = Eigen::Vector2d;

/// Ground-truth state of one physical node.
struct NodeTruth {
  int id = 0;
  Point position = Point::Zero();
  bool is_faulty = false;
  double initial_value = 0.0;
  /// Seats a faulty node tries to win in the lottery; 0 for good nodes.
  int pseudonym_budget = 0;
};

using World = std::vector<NodeTruth>;

namespace ranging {

struct Perfect {};

/// Additive Gaussian error, meters.
struct ToA {
  double additive_std = 0.0;
};

/// Log-normal shadowing; standard deviation of the log-domain factor.
struct Rss {
  double mult_log_std = 0.0;
};

}  // namespace ranging

using RangingModel = std::variant<ranging::Perfect, ranging::ToA, ranging::Rss>;

}  // namespace senate
