#pragma once

// Rotating-leader byzantine agreement among the senators over an
// equivocation-free broadcast medium, and the final network-wide broadcast.

#include <optional>
#include <vector>

#include "senate/adversary.hpp"
#include "senate/random.hpp"

namespace senate {

struct AgreementParams {
  int k = 4;
  /// Design fault budget; k >= 3t + 1 is required.
  int t = 1;
  /// Actual faulty senators. Known to tests and scoring only.
  int f = 0;
};

struct ValueInterval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double x) const { return low <= x && x <= high; }
};

/// Values within t sorted positions of the median of `good_sorted` (length
/// n - f). Indices are clamped into range. Throws Error(NoGoodValues) when
/// `good_sorted` is empty.
ValueInterval median_valid_interval(const std::vector<double>& good_sorted, int n, int f, int t);

/// Lower median of an unsorted list; the list must not be empty.
double lower_median(std::vector<double> values);

struct SenatorSpec {
  double initial_value = 0.0;
  /// Set for faulty senators.
  std::optional<BaStrategy> faulty;

  bool is_faulty() const { return faulty.has_value(); }
};

struct AgreementRound {
  int round = 1;
  /// Index of the leader in the senator list.
  int leader = 0;
  /// Empty when a faulty leader stayed silent.
  std::optional<double> leader_value;
  /// Accept bit per senator; empty for silence.
  std::vector<std::optional<bool>> votes;
  int accepts = 0;
  bool adopted = false;
  /// Current value per senator after the round; empty for faulty senators.
  std::vector<std::optional<double>> current;
};

struct AgreementTranscript {
  /// Setup broadcast per senator; empty for silence.
  std::vector<std::optional<double>> initial_broadcasts;
  /// Sorted common multiset of setup broadcasts.
  std::vector<double> received;
  ValueInterval acceptable;
  double proposal = 0.0;
  std::vector<AgreementRound> rounds;
  /// Decision per senator; empty for faulty senators.
  std::vector<std::optional<double>> decisions;

  /// The common decision of the good senators, if they agree.
  std::optional<double> agreed_value() const;
};

/// Senators are given in ascending seat order, which is also the leader
/// order. Throws Error(Config) when k < 3t + 1 or the senator count differs
/// from k.
AgreementTranscript run_agreement(const std::vector<SenatorSpec>& senators,
                                  const AgreementParams& params, Rng& rng);

/// Majority of the broadcast decisions (silence is skipped); ties go to the
/// smallest value. Throws Error(NoBroadcast) when nothing was broadcast.
double finalize_network(const std::vector<std::optional<double>>& broadcasts);

}  // namespace senate
