#pragma once

// Faulty-node behavior. Faulty nodes obey the medium (they never transmit in
// another identity's slot and never jam); everything they say is arbitrary.

#include <optional>
#include <variant>
#include <vector>

#include "senate/model.hpp"
#include "senate/random.hpp"

namespace senate {

namespace ba {

/// Faulty senator follows the protocol (the profile is disabled).
struct Honest {};

/// Broadcasts one fixed value everywhere; unset means the node's own initial value.
struct ExtremeValue {
  std::optional<double> value;
};

struct Silent {};

/// Uniform values in [lo, hi] and coin-flip accept bits.
struct RandomVote {
  double lo = -2.0;
  double hi = 2.0;
};

}  // namespace ba

using BaStrategy = std::variant<ba::Honest, ba::ExtremeValue, ba::Silent, ba::RandomVote>;

enum class ShoutMode {
  /// Each pseudonym draws its own offset in [0.5, 1.5] x shout_offset.
  Independent,
  /// Every pseudonym of every faulty node uses exactly shout_offset.
  Shared,
};

struct AttackProfile {
  bool chorus_always_transmit = false;
  int sybil_seats = 1;
  /// Meters added to every distance involving the identity; negative whispers.
  double shout_offset = 0.0;
  ShoutMode shout_mode = ShoutMode::Independent;
  /// Inflate reports only, leaving pilots honest.
  bool asymmetric_lie = false;
  BaStrategy ba_strategy = ba::Honest{};

  bool disabled() const;
};

/// One identity presented by a faulty node.
struct PseudonymGeometry {
  Point position;
  /// Distance tamper for this identity, meters.
  double offset = 0.0;
};

/// Identities of `node`, all anchored at its physical position. A good node,
/// or a faulty node with a disabled profile, yields one honest identity.
std::vector<PseudonymGeometry> pseudonym_positions(const NodeTruth& node,
                                                   const AttackProfile& profile,
                                                   Rng& rng);

/// Round context handed to a faulty senator's strategy.
struct BaContext {
  enum class Phase { Setup, Proposal, Leader, Decision };
  Phase phase = Phase::Setup;
  int round = 0;
  /// The node's own initial value, used by ExtremeValue without an explicit value.
  double own_value = 0.0;
  /// Current value the protocol would have the node send if it were good.
  double honest_value = 0.0;
};

/// Value a faulty senator broadcasts, or nullopt for silence.
std::optional<double> ba_emit(const BaStrategy& strategy, const BaContext& ctx, Rng& rng);

/// Accept bit a faulty senator casts on a leader value, or nullopt for silence.
std::optional<bool> ba_vote(const BaStrategy& strategy, const BaContext& ctx,
                            double leader_value, Rng& rng);

}  // namespace senate
