#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "senate/adversary.hpp"
#include "senate/model.hpp"

namespace senate {

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Every experiment knob. Defaults reproduce the 100-node reference setup.
struct ScenarioConfig {
  int n_nodes = 100;
  int n_faulty = 0;
  int n_candidates = 50;
  int n_senators = 7;
  int chorus_slots = 2000;
  double tx_cost = 0.3;
  /// Squared meters; unset picks a default from the ranging model.
  std::optional<double> symmetry_tol;
  double wnc_step = 0.05;
  double wnc_error_blend = 0.5;
  double removal_factor = 3.0;
  int max_wnc_rounds = 200;
  int wnc_sweeps_per_round = 50;
  /// Local error below which no candidate is removed.
  double wnc_error_floor = 0.005;
  double area_side = 200.0;
  RangingModel ranging = ranging::Perfect{};
  AttackProfile attack;
  int agreement_fault_budget = 2;
  std::uint64_t seed = 1;
  int episodes = 200;
  /// 0 selects 50 * S / mean equilibrium probability.
  long slot_cap = 0;
  ValueRange good_values{-1.0, 1.0};
  ValueRange faulty_values{99.0, 101.0};

  /// Throws Error(Config) on any broken invariant.
  void validate() const;

  double effective_symmetry_tol() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys throw.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

/// Sets one field by its config-file key.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Renders the config back into the file format (round-trips through parse_config).
std::string to_config_text(const ScenarioConfig& config);

RangingModel parse_ranging(std::string_view text);
BaStrategy parse_ba_strategy(std::string_view text);

}  // namespace senate
