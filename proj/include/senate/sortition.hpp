#pragma once

// Lottery phase: every node estimates the population from a chorus of pilot
// transmissions, then all nodes play a selfish slotted-ALOHA game whose
// collision-free winners become the candidates.

#include <Eigen/Core>
#include <vector>

#include "senate/adversary.hpp"
#include "senate/model.hpp"
#include "senate/random.hpp"

namespace senate {

/// Symmetric mixed-strategy equilibrium of the ALOHA game: 1 - c^(1/(n-1)).
/// `n` may be fractional. Throws Error(Domain) for n < 2 or c <= 0.
double nash_probability(double cost, double n);

/// Expected per-slot payoff of transmitting with probability `p_self` while
/// the other n-1 players transmit with `p_other`.
double transmit_payoff(double p_self, double p_other, int n, double cost);

/// Transmit probability a node plays given its own population estimate.
double lottery_probability(double cost, double population_estimate);

struct ChorusReport {
  int node_id = 0;
  /// 1-based slot in which the node listens.
  int receive_slot = 1;
  int observed_transmitters = 0;
  double population_estimate = 1.0;
};

/// 1 + T/(T-1) q.
double population_estimate(int slots, int observed);

/// One report per node, in node order. Pseudonyms never inflate the count:
/// the receiver resolves physical transmitters.
std::vector<ChorusReport> run_chorus(const World& world, int slots, const AttackProfile& attack,
                                     Rng& rng);

struct Seat {
  /// 1-based seat number, in order of success.
  int seat = 1;
  int owner = 0;
  /// 0 for the node's first seat; k for its k-th extra identity.
  int pseudonym = 0;

  bool is_pseudonym() const { return pseudonym > 0; }
};

struct SortitionOutcome {
  std::vector<Seat> candidates;
  long slots_elapsed = 0;
  std::vector<ChorusReport> reports;
  /// (i, j): distance measured by seat j's owner from seat i's pilot, meters.
  Eigen::MatrixXd pilot_estimates;
};

struct AlohaParams {
  int seats = 1;
  double tx_cost = 0.3;
  /// 0 selects 50 * seats / mean equilibrium probability.
  long slot_cap = 0;
  RangingModel ranging = ranging::Perfect{};
};

/// Slot-by-slot lottery until `seats` collision-free successes. Good nodes
/// leave after one seat; faulty nodes keep playing until their pseudonym
/// budget is spent. Throws Error(SortitionTimeout) past the slot cap.
SortitionOutcome run_aloha(const World& world, const std::vector<ChorusReport>& reports,
                           const AlohaParams& params, Rng& slot_rng, Rng& ranging_rng);

}  // namespace senate
