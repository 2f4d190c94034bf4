#pragma once

// Distance-geometry kernel: squared-distance matrices, their Gram matrices,
// low-rank projection error, and the out-of-plane leakage a location forger
// cannot avoid.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <thread>
#include <vector>

#include "senate/error.hpp"
#include "senate/random.hpp"

namespace senate {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

/// Squared pairwise distances with a per-entry validity mask.
template <typename Scalar = double>
struct Edm {
  MatrixX<Scalar> squared;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid;

  Edm() = default;

  template <typename Derived>
  explicit Edm(const Eigen::MatrixBase<Derived>& squared_distances)
      : squared(squared_distances),
        valid(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            squared_distances.rows(), squared_distances.cols(), true)) {}

  Eigen::Index size() const { return squared.rows(); }
  bool complete() const { return valid.all(); }
  void invalidate(Eigen::Index i, Eigen::Index j) { valid(i, j) = false; }

  /// Copy without row/column `k`.
  Edm without(Eigen::Index k) const {
    const Eigen::Index n = size();
    Edm out;
    out.squared.resize(n - 1, n - 1);
    out.valid.resize(n - 1, n - 1);
    for (Eigen::Index i = 0, oi = 0; i < n; ++i) {
      if (i == k) continue;
      for (Eigen::Index j = 0, oj = 0; j < n; ++j) {
        if (j == k) continue;
        out.squared(oi, oj) = squared(i, j);
        out.valid(oi, oj) = valid(i, j);
        ++oj;
      }
      ++oi;
    }
    return out;
  }
};

/// Planar embedding of candidates with each one's local (relative) error.
template <typename Scalar = double>
struct CoordinateSet {
  Points2<Scalar> points;
  VectorX<Scalar> local_error;

  Eigen::Index size() const { return points.rows(); }
};

/// Rows of `points` are positions in any dimension.
template <typename Derived>
Edm<typename Derived::Scalar> edm_from_coords(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  const VectorX<Scalar> norms = points.rowwise().squaredNorm();
  MatrixX<Scalar> d = norms.replicate(1, n) + norms.transpose().replicate(n, 1) -
                      Scalar(2) * points * points.transpose();
  // Exact zeros on the diagonal and no round-off negatives.
  d = d.cwiseMax(Scalar(0));
  d.diagonal().setZero();
  // Symmetrize against round-off in the product.
  d = (Scalar(0.5) * (d + d.transpose())).eval();
  return Edm<Scalar>(d);
}

/// Gram matrix of the configuration translated so that `anchor` sits at the
/// origin: G_ij = (D_ai + D_aj - D_ij) / 2.
template <typename Scalar>
MatrixX<Scalar> gram_from_edm(const Edm<Scalar>& edm, Eigen::Index anchor) {
  if (!edm.complete()) throw Error(ErrorCode::IncompleteMatrix, "Gram matrix needs a complete EDM");
  if (anchor < 0 || anchor >= edm.size()) throw Error(ErrorCode::Domain, "anchor index out of range");
  const auto& d = edm.squared;
  const VectorX<Scalar> beta = d.row(anchor).transpose();
  const Eigen::Index n = edm.size();
  MatrixX<Scalar> gram = Scalar(0.5) * (beta.replicate(1, n) + beta.transpose().replicate(n, 1) - d);
  gram.row(anchor).setZero();
  gram.col(anchor).setZero();
  return gram;
}

/// Gram matrix of the configuration translated to its centroid: -J D J / 2.
template <typename Scalar>
MatrixX<Scalar> centered_gram(const Edm<Scalar>& edm) {
  if (!edm.complete()) throw Error(ErrorCode::IncompleteMatrix, "Gram matrix needs a complete EDM");
  const Eigen::Index n = edm.size();
  const MatrixX<Scalar> centering =
      MatrixX<Scalar>::Identity(n, n) - MatrixX<Scalar>::Constant(n, n, Scalar(1) / Scalar(n));
  return Scalar(-0.5) * centering * edm.squared * centering;
}

/// Eigenvalues of a symmetric matrix, sorted by decreasing magnitude.
template <typename Derived>
VectorX<typename Derived::Scalar> eigenvalues_by_magnitude(const Eigen::MatrixBase<Derived>& sym) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  VectorX<Scalar> values = solver.eigenvalues();
  std::sort(values.data(), values.data() + values.size(),
            [](Scalar a, Scalar b) { return std::abs(a) > std::abs(b); });
  return values;
}

/// Power outside the best rank-`rank` approximation: the sum of eigenvalue
/// magnitudes beyond the `rank` dominant ones.
template <typename Derived>
typename Derived::Scalar low_rank_leakage(const Eigen::MatrixBase<Derived>& gram, Eigen::Index rank) {
  using Scalar = typename Derived::Scalar;
  const auto values = eigenvalues_by_magnitude(gram);
  Scalar leak(0);
  for (Eigen::Index i = std::max<Eigen::Index>(rank, 0); i < values.size(); ++i) leak += std::abs(values(i));
  return leak;
}

template <typename Scalar = double>
struct Embedding {
  MatrixX<Scalar> points;
  /// False when the Gram has a negative eigenvalue beyond tolerance, i.e.
  /// some distance triple violates the triangle inequality.
  bool embeddable = true;
  Scalar min_eigenvalue = Scalar(0);
};

/// Coordinates from the `dim` dominant eigenpairs of a Gram matrix.
template <typename Derived>
Embedding<typename Derived::Scalar> classical_mds(const Eigen::MatrixBase<Derived>& gram, int dim = 2) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(gram);
  const auto& values = solver.eigenvalues();  // ascending
  const auto& vectors = solver.eigenvectors();
  const Eigen::Index n = values.size();
  const Scalar tol = Scalar(1e-9) * std::max(values.cwiseAbs().sum(), Scalar(1e-300));

  Embedding<Scalar> out;
  out.min_eigenvalue = n > 0 ? values(0) : Scalar(0);
  out.embeddable = out.min_eigenvalue >= -tol;
  const Eigen::Index k = std::min<Eigen::Index>(dim, n);
  out.points = MatrixX<Scalar>::Zero(n, dim);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index src = n - 1 - c;
    out.points.col(c) = vectors.col(src) * std::sqrt(std::max(values(src), Scalar(0)));
  }
  return out;
}

/// Theoretical seesaw leakage for one forger among M good nodes.
struct LeakageParams {
  int m_good = 20;
  double sigma2 = 1.0;
  double varsigma2 = 0.0;
  int dim = 2;

  void validate() const {
    if (dim < 2 || m_good < dim + 1 || !(sigma2 > 0.0) || varsigma2 < 0.0)
      throw Error(ErrorCode::Domain, "leakage parameters need dim >= 2, M >= dim + 1, sigma2 > 0, varsigma2 >= 0");
  }
};

/// min{(M - L + 1) sigma^2, (M - L) varsigma^2}.
inline double seesaw_leakage_theory(const LeakageParams& p) {
  p.validate();
  return std::min((p.m_good - p.dim + 1) * p.sigma2, (p.m_good - p.dim) * p.varsigma2);
}

struct LeakageEstimate {
  double theory = 0.0;
  /// Minimum over the orthogonalized basis of the mean squared norm.
  double gram_schmidt = 0.0;
  double gram_schmidt_se = 0.0;
  /// Mean out-of-subspace power of the tampered Gram.
  double eigen = 0.0;
  double eigen_se = 0.0;
};

namespace detail {

struct LeakageSample {
  std::vector<double> basis_norms;  // dim + 1 entries
  double eigen_leak = 0.0;
};

inline LeakageSample leakage_sample(const LeakageParams& p, Rng& rng) {
  const Eigen::Index m = p.m_good;
  const Eigen::Index dim = p.dim;
  const double sigma = std::sqrt(p.sigma2);

  Eigen::MatrixXd coords(m, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < m; ++r) coords(r, c) = sigma * standard_normal(rng);

  // Gram-Schmidt over {x_1..x_L, w}, w carrying the attack power on one axis.
  std::vector<Eigen::VectorXd> basis;
  LeakageSample s;
  auto orthogonalize = [&](Eigen::VectorXd v) {
    for (const auto& u : basis) {
      const double un = u.squaredNorm();
      if (un > 0.0) v -= (u.dot(v) / un) * u;
    }
    s.basis_norms.push_back(v.squaredNorm());
    basis.push_back(std::move(v));
  };
  for (Eigen::Index c = 0; c < dim; ++c) orthogonalize(coords.col(c));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  w(0) = std::sqrt(p.varsigma2 * static_cast<double>(m));
  orthogonalize(w);

  // The optimal forger spreads e = varsigma^2 * 1 over its row of the EDM.
  const Eigen::MatrixXd tampered =
      coords * coords.transpose() + p.varsigma2 * Eigen::MatrixXd::Ones(m, m);
  s.eigen_leak = low_rank_leakage(tampered, dim);
  return s;
}

}  // namespace detail

/// Monte-Carlo counterpart of seesaw_leakage_theory. Trial k draws from its
/// own stream, so results do not depend on `workers`.
inline LeakageEstimate seesaw_leakage_mc(const LeakageParams& p, int trials, std::uint64_t seed,
                                         unsigned workers = 0) {
  p.validate();
  if (trials < 1) throw Error(ErrorCode::Domain, "at least one trial is required");
  std::vector<detail::LeakageSample> samples(static_cast<std::size_t>(trials));

  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  auto run_range = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      Rng rng = make_stream(seed, Stream::MonteCarlo, static_cast<std::uint64_t>(k));
      samples[static_cast<std::size_t>(k)] = detail::leakage_sample(p, rng);
    }
  };
  if (workers <= 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (trials + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (int begin = 0; begin < trials; begin += chunk)
      pool.emplace_back(run_range, begin, std::min(trials, begin + chunk));
    for (auto& t : pool) t.join();
  }

  auto mean_se = [&](auto value_of) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& s : samples) {
      const double v = value_of(s);
      sum += v;
      sum_sq += v * v;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return std::pair{mean, std::sqrt(var / n)};
  };

  LeakageEstimate est;
  est.theory = seesaw_leakage_theory(p);
  est.gram_schmidt = std::numeric_limits<double>::infinity();
  for (int b = 0; b <= p.dim; ++b) {
    const auto [mean, se] = mean_se([b](const auto& s) { return s.basis_norms[static_cast<std::size_t>(b)]; });
    if (mean < est.gram_schmidt) {
      est.gram_schmidt = mean;
      est.gram_schmidt_se = se;
    }
  }
  std::tie(est.eigen, est.eigen_se) = mean_se([](const auto& s) { return s.eigen_leak; });
  return est;
}

}  // namespace senate
