#pragma once

// Episode orchestration, sweeps and the CSV surface.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "senate/agreement.hpp"
#include "senate/config.hpp"
#include "senate/selection.hpp"

namespace senate {

struct EpisodeResult {
  std::uint64_t seed = 0;
  int n_faulty = 0;

  /// Owner node per seat, in seat order.
  std::vector<int> seat_owners;
  /// Seats won by faulty nodes, first identities included.
  int faulty_seats = 0;
  /// Seats won by extra identities of faulty nodes.
  int sybil_seats = 0;
  long slots_elapsed = 0;

  /// Candidate pairs invalidated by the reciprocity check.
  int asymmetric_pairs = 0;
  /// Seat numbers removed by the seesaw test, in removal order.
  std::vector<int> removed;
  int removed_faulty = 0;
  int wnc_rounds = 0;

  /// Seat numbers of the senators, in seat order.
  std::vector<int> senators;
  bool valid_senate = false;
  int faulty_senators = 0;

  std::optional<double> decision;
  /// Set iff there is no decision.
  std::string failure_reason;
  /// Every good node holds the same value.
  bool agreement_ok = false;
  /// Decision within the median-valid interval of the good senators'
  /// values with budget t = agreement_fault_budget.
  bool median_valid = false;
  /// Same, with t = the actual number of faulty senators.
  bool median_valid_actual = false;

  std::string to_json() const;
};

struct EpisodeTrace {
  std::vector<WncTraceRow> wnc;
  std::optional<AgreementTranscript> agreement;
};

/// Runs every phase for one seed. Phase errors become failure reasons.
EpisodeResult run_episode(const ScenarioConfig& config, std::uint64_t seed,
                          EpisodeTrace* trace = nullptr);

/// All nodes run agreement directly, with t = floor((k - 1) / 3). With
/// `with_sybil` every faulty node enters attack.sybil_seats identities.
EpisodeResult run_baseline_episode(const ScenarioConfig& config, std::uint64_t seed,
                                   bool with_sybil, AgreementTranscript* transcript = nullptr);

struct SweepRow {
  int faulty_count = 0;
  int episodes = 0;
  double consensus_rate = 0.0;
  double valid_rate = 0.0;
  double mean_sybil_seats = 0.0;
  double mean_faulty_senators = 0.0;
  bool baseline = false;
  std::uint64_t seed = 0;
};

enum class SweepArm { Senate, Baseline, BaselineSybil };

struct SweepOptions {
  SweepArm arm = SweepArm::Senate;
  /// 0 uses the hardware concurrency.
  int workers = 0;
};

/// One row per faulty count; episode i of every row uses seed config.seed + i.
/// Rows are independent of the worker count. Throws Error(Config) for a
/// faulty count the config cannot hold.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const std::vector<int>& faulty_counts,
                                int episodes, const SweepOptions& options = {});

SweepRow summarize(const std::vector<EpisodeResult>& episodes, int faulty_count, bool baseline,
                   std::uint64_t seed);

/// `schema=1`, the column header, then one line per row.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

void write_wnc_trace(std::ostream& out, const std::vector<WncTraceRow>& rows);
void write_ba_trace(std::ostream& out, const AgreementTranscript& transcript);

}  // namespace senate
