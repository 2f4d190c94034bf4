#pragma once

// Candidate-to-senator phase: distance feedback, reciprocity check, robust
// network coordinates with seesaw removal, K-means, election.

#include <vector>

#include "senate/adversary.hpp"
#include "senate/geometry.hpp"
#include "senate/model.hpp"
#include "senate/random.hpp"
#include "senate/sortition.hpp"

namespace senate {

struct FeedbackTable {
  /// reports[i](j): distance candidate i reports for candidate j's pilot.
  std::vector<Eigen::VectorXd> reports;
  /// (j, i) holds reports[i](j) squared, i.e. column i is candidate i's vector.
  Edm<double> edm;
};

/// Assembles every candidate's reported distance vector. Good candidates
/// report what they measured; shouting identities delay their pilots and
/// inflate their own reports by the same offset, so the table stays
/// symmetric. With `asymmetric_lie` only the reports are inflated.
FeedbackTable collect_feedback(const SortitionOutcome& sortition, const World& world,
                               const AttackProfile& attack, Rng& rng);

/// Flags (i, j) and (j, i) whenever |D_ij - D_ji| >= tolerance.
Edm<double> symmetry_verify(const Edm<double>& edm, double tolerance);

enum class WncInit {
  /// Classical MDS of the feedback (unusable entries imputed), plus jitter.
  Mds,
  /// Uniform jitter in [-1, 1]^2 only.
  Jitter,
};

struct WncParams {
  double step = 0.05;
  double error_blend = 0.5;
  double removal_factor = 3.0;
  int max_rounds = 200;
  int sweeps_per_round = 50;
  /// No removal below this local error, whatever the ratio.
  double error_floor = 0.005;
  WncInit init = WncInit::Mds;
};

struct WncTraceRow {
  int round = 0;
  /// Index into the original candidate list.
  int candidate = 0;
  double x = 0.0;
  double y = 0.0;
  double error = 0.0;
};

struct WncResult {
  CoordinateSet<double> coords;
  /// Original indices of the rows of `coords`.
  std::vector<int> survivors;
  /// Original indices, in removal order.
  std::vector<int> removed;
  /// True when stopped by the evenness test rather than the round limit.
  bool terminated = false;
  int rounds = 0;
};

/// Vivaldi-style spring embedding with one seesaw removal per round. After
/// each round every local error is re-measured as the median relative error
/// over the candidate's pairs, and the worst candidate is dropped when it
/// exceeds both removal_factor times the mean and error_floor. Throws Error(DegenerateGeometry)
/// when fewer than 3 candidates are left and Error(NoData) when no usable
/// entry exists.
WncResult robust_wnc(const Edm<double>& edm, const WncParams& params, Rng& rng,
                     std::vector<WncTraceRow>* trace = nullptr);

struct KMeansResult {
  std::vector<int> assignments;
  Points2<double> centroids;
  double cost = 0.0;
  int iterations = 0;
};

/// Sum of squared distances from each point to its assigned centroid.
double kmeans_cost(const Points2<double>& points, const std::vector<int>& assignments,
                   const Points2<double>& centroids);

/// Lloyd iterations from k-means++ seeding; at most 100 iterations. Empty
/// clusters are reseeded at the farthest point. Throws Error(Quorum) when
/// there are fewer points than clusters.
KMeansResult kmeans(const Points2<double>& points, int k, Rng& rng);

struct SenateRoster {
  /// Candidate ids, one per cluster, in cluster order.
  std::vector<int> senators;
  /// Cluster index per surviving candidate.
  std::vector<int> clusters;
  bool valid = false;
};

/// Per cluster, the candidate nearest its centroid (ties to the lowest id).
SenateRoster elect_senators(const Points2<double>& points, const KMeansResult& clustering,
                            const std::vector<int>& ids, int k);

/// Clustering plus election; an invalid roster when fewer than k survive.
SenateRoster select_senate(const CoordinateSet<double>& coords, const std::vector<int>& ids, int k,
                           Rng& rng);

}  // namespace senate
