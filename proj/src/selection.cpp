#include "senate/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "senate/error.hpp"

namespace senate {

FeedbackTable collect_feedback(const SortitionOutcome& sortition, const World& world,
                               const AttackProfile& attack, Rng& rng) {
  const auto s = static_cast<Eigen::Index>(sortition.candidates.size());

  // Offset per seat: each faulty owner's identities in seat order.
  std::vector<std::vector<PseudonymGeometry>> identities(world.size());
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto& seat = sortition.candidates[static_cast<std::size_t>(i)];
    const auto& node = world[static_cast<std::size_t>(seat.owner)];
    auto& ids = identities[static_cast<std::size_t>(seat.owner)];
    if (ids.empty()) ids = pseudonym_positions(node, attack, rng);
    if (node.is_faulty)
      offset(i) = ids[std::min<std::size_t>(static_cast<std::size_t>(seat.pseudonym), ids.size() - 1)].offset;
  }
  const Eigen::VectorXd pilot_delay = attack.asymmetric_lie ? Eigen::VectorXd::Zero(s) : offset;

  FeedbackTable table;
  table.reports.assign(static_cast<std::size_t>(s), Eigen::VectorXd::Zero(s));
  Eigen::MatrixXd squared = Eigen::MatrixXd::Zero(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    auto& report = table.reports[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < s; ++j) {
      if (i == j) continue;
      // Candidate i heard j's (possibly delayed) pilot and may inflate what it says.
      const double heard = sortition.pilot_estimates(j, i) + pilot_delay(j);
      report(j) = std::max(0.0, heard + offset(i));
      squared(j, i) = report(j) * report(j);
    }
  }
  table.edm = Edm<double>(squared);
  return table;
}

Edm<double> symmetry_verify(const Edm<double>& edm, double tolerance) {
  Edm<double> out = edm;
  const Eigen::Index n = edm.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // Either side may be the liar, so both directions go.
      const bool consistent = std::abs(edm.squared(i, j) - edm.squared(j, i)) < tolerance;
      if (!consistent || !edm.valid(i, j) || !edm.valid(j, i)) {
        out.invalidate(i, j);
        out.invalidate(j, i);
      }
    }
  }
  return out;
}

namespace {

Eigen::Vector2d random_unit(Rng& rng) {
  const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {std::cos(angle), std::sin(angle)};
}

// Symmetrized feedback with unusable entries replaced by the mean usable one.
Points2<double> initial_embedding(const Edm<double>& edm,
                                  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& usable) {
  const Eigen::Index n = edm.size();
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (usable(i, j)) {
        sum += edm.squared(i, j);
        ++count;
      }
  const double fill = count > 0 ? sum / static_cast<double>(count) : 0.0;
  Eigen::MatrixXd filled = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool a = usable(i, j), b = usable(j, i);
      if (a && b)
        filled(i, j) = 0.5 * (edm.squared(i, j) + edm.squared(j, i));
      else if (a || b)
        filled(i, j) = a ? edm.squared(i, j) : edm.squared(j, i);
      else
        filled(i, j) = edm.valid(i, j) && edm.valid(j, i) ? 0.0 : fill;
    }
  }
  filled = (0.5 * (filled + filled.transpose())).eval();
  return classical_mds(centered_gram(Edm<double>(filled)), 2).points;
}

}  // namespace

WncResult robust_wnc(const Edm<double>& edm, const WncParams& params, Rng& rng,
                     std::vector<WncTraceRow>* trace) {
  Eigen::Index n = edm.size();
  if (n < 3) throw Error(ErrorCode::DegenerateGeometry, "at least 3 candidates are needed");

  // Distances in meters; zero or invalid entries carry no information.
  Eigen::MatrixXd target = edm.squared.cwiseMax(0.0).cwiseSqrt();
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> usable = edm.valid && (target.array() > 0.0);
  usable.matrix().diagonal().setConstant(false);
  if (!usable.any()) throw Error(ErrorCode::NoData, "no valid distance feedback");

  WncResult result;
  result.survivors.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) result.survivors[static_cast<std::size_t>(i)] = static_cast<int>(i);

  Points2<double> x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = Eigen::RowVector2d(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  if (params.init == WncInit::Mds) x += initial_embedding(edm, usable);
  Eigen::VectorXd error = Eigen::VectorXd::Ones(n);

  auto drop = [](auto& m, Eigen::Index k) {
    const Eigen::Index rows = m.rows();
    const Eigen::Index cols = m.cols();
    using M = std::decay_t<decltype(m)>;
    M out(rows - 1, cols - 1);
    for (Eigen::Index i = 0, oi = 0; i < rows; ++i) {
      if (i == k) continue;
      for (Eigen::Index j = 0, oj = 0; j < cols; ++j) {
        if (j == k) continue;
        out(oi, oj++) = m(i, j);
      }
      ++oi;
    }
    m = std::move(out);
  };

  for (int round = 1; round <= params.max_rounds; ++round) {
    result.rounds = round;
    for (int sweep = 0; sweep < params.sweeps_per_round; ++sweep) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!usable(i, j)) continue;
          const double d = target(i, j);
          Eigen::Vector2d diff = (x.row(i) - x.row(j)).transpose();
          const double dist = diff.norm();
          const Eigen::Vector2d dir = dist > 0.0 ? Eigen::Vector2d(diff / dist) : random_unit(rng);
          const double total = error(i) + error(j);
          const double w = total > 0.0 ? error(i) / total : 0.5;
          const double rel = (dist - d) / d;
          const double blend = params.error_blend * w;
          error(i) = std::abs(rel) * blend + (1.0 - blend) * error(i);
          // Push apart when the measurement exceeds the prediction, pull otherwise.
          x.row(i) += (params.step * w * (d - dist) * dir).transpose();
        }
      }
    }

    // Re-measure each local error against the settled layout before the removal
    // test, as the median relative error over the candidate's pairs.
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<double> rel;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double dist = (x.row(i) - x.row(j)).norm();
        if (usable(i, j)) rel.push_back(std::abs(dist - target(i, j)) / target(i, j));
        if (usable(j, i)) rel.push_back(std::abs(dist - target(j, i)) / target(j, i));
      }
      if (rel.empty()) {
        error(i) = 0.0;
        continue;
      }
      auto mid = rel.begin() + static_cast<long>(rel.size() / 2);
      std::nth_element(rel.begin(), mid, rel.end());
      error(i) = *mid;
    }

    if (trace) {
      for (Eigen::Index i = 0; i < n; ++i)
        trace->push_back({round, result.survivors[static_cast<std::size_t>(i)], x(i, 0), x(i, 1), error(i)});
    }

    Eigen::Index worst = 0;
    const double max_error = error.maxCoeff(&worst);
    const double mean_error = error.mean();
    if (!(max_error > params.removal_factor * mean_error && max_error > params.error_floor)) {
      result.terminated = true;
      break;
    }

    result.removed.push_back(result.survivors[static_cast<std::size_t>(worst)]);
    result.survivors.erase(result.survivors.begin() + worst);
    drop(target, worst);
    drop(usable, worst);
    Points2<double> kept(n - 1, 2);
    Eigen::VectorXd kept_error(n - 1);
    for (Eigen::Index i = 0, o = 0; i < n; ++i) {
      if (i == worst) continue;
      kept.row(o) = x.row(i);
      kept_error(o++) = error(i);
    }
    x = std::move(kept);
    error = std::move(kept_error);
    --n;
    if (n < 3) throw Error(ErrorCode::DegenerateGeometry, "fewer than 3 candidates survived removal");
    if (!usable.any()) throw Error(ErrorCode::NoData, "no valid distance feedback left");
  }

  result.coords.points = std::move(x);
  result.coords.local_error = std::move(error);
  return result;
}

double kmeans_cost(const Points2<double>& points, const std::vector<int>& assignments,
                   const Points2<double>& centroids) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    cost += (points.row(i) - centroids.row(assignments[static_cast<std::size_t>(i)])).squaredNorm();
  return cost;
}

KMeansResult kmeans(const Points2<double>& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  if (k < 1 || n < k)
    throw Error(ErrorCode::Quorum, "k-means needs at least as many points as clusters");

  KMeansResult out;
  out.centroids.resize(k, 2);

  // k-means++ seeding.
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Eigen::Index pick = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      const double total = nearest.sum();
      if (total > 0.0) {
        double u = uniform(rng, 0.0, total);
        pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          u -= nearest(i);
          if (u < 0.0 && nearest(i) > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        // All remaining mass sits on existing centers (duplicate points).
        pick = static_cast<Eigen::Index>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
      }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    out.centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      nearest(i) = std::min(nearest(i), (points.row(i) - points.row(pick)).squaredNorm());
  }

  out.assignments.assign(static_cast<std::size_t>(n), -1);
  for (int iter = 1; iter <= 100; ++iter) {
    out.iterations = iter;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - out.centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.assignments[static_cast<std::size_t>(i)] != best) {
        out.assignments[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    // Empty clusters take the point farthest from its current centroid.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (const int a : out.assignments) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = out.assignments[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(a)] <= 1) continue;
        const double d = (points.row(i) - out.centroids.row(a)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;
      --counts[static_cast<std::size_t>(out.assignments[static_cast<std::size_t>(far)])];
      out.assignments[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    Points2<double> sums = Points2<double>::Zero(k, 2);
    for (Eigen::Index i = 0; i < n; ++i) sums.row(out.assignments[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) out.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];

    if (!changed) break;
  }
  out.cost = kmeans_cost(points, out.assignments, out.centroids);
  return out;
}

SenateRoster elect_senators(const Points2<double>& points, const KMeansResult& clustering,
                            const std::vector<int>& ids, int k) {
  SenateRoster roster;
  roster.clusters = clustering.assignments;
  for (int c = 0; c < k; ++c) {
    int best_id = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (clustering.assignments[static_cast<std::size_t>(i)] != c) continue;
      const double d = (points.row(i) - clustering.centroids.row(c)).squaredNorm();
      const int id = ids[static_cast<std::size_t>(i)];
      if (d < best_d || (d == best_d && id < best_id)) {
        best_d = d;
        best_id = id;
      }
    }
    if (best_id >= 0) roster.senators.push_back(best_id);
  }
  roster.valid = static_cast<int>(roster.senators.size()) == k;
  return roster;
}

SenateRoster select_senate(const CoordinateSet<double>& coords, const std::vector<int>& ids, int k,
                           Rng& rng) {
  if (coords.size() < k) return {};
  const auto clustering = kmeans(coords.points, k, rng);
  return elect_senators(coords.points, clustering, ids, k);
}

}  // namespace senate
