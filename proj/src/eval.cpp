#include "loe/eval.hpp"

#include "loe/core.hpp"
#include "loe/kernels.hpp"
#include "loe/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace loe {

namespace {

int sign3(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

double sqdist(const Matrix& X, int a, int b) {
  return (X.col(a) - X.col(b)).squaredNorm();
}

}  // namespace

double procrustes_distance(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw DimensionError("procrustes_distance: shapes must match");
  const Matrix Xc = center_columns(X);
  const Matrix Yc = center_columns(Y);
  // The optimal orthogonal alignment is Q = U V^T for Xc Yc^T = U S V^T.
  // Evaluating the residual explicitly instead of via the singular-value
  // identity ||Xc||^2 + ||Yc||^2 - 2 sum(s) avoids catastrophic cancellation
  // when the two configurations nearly coincide.
  const Eigen::JacobiSVD<Matrix> svd(Xc * Yc.transpose(),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix Q = svd.matrixU() * svd.matrixV().transpose();
  return (Xc - Q * Yc).norm();
}

double triplet_prediction_error(const Matrix& X_true, const Matrix& X_hat) {
  if (X_true.cols() != X_hat.cols())
    throw DimensionError("triplet_prediction_error: item counts must match");
  const int n = static_cast<int>(X_true.cols());
  if (n < 3)
    throw DimensionError("triplet_prediction_error: need at least 3 items");
  std::uint64_t total = 0, wrong = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int k = j + 1; k < n; ++k) {
        if (k == i) continue;
        ++total;
        const int truth = sign3(sqdist(X_true, i, j) - sqdist(X_true, i, k));
        const int guess = sign3(sqdist(X_hat, i, j) - sqdist(X_hat, i, k));
        if (truth != guess) ++wrong;
      }
    }
  return static_cast<double>(wrong) / static_cast<double>(total);
}

double triplet_prediction_error(const Matrix& X_true, const Matrix& X_hat,
                                std::uint64_t m, std::uint64_t seed) {
  if (X_true.cols() != X_hat.cols())
    throw DimensionError("triplet_prediction_error: item counts must match");
  if (X_true.cols() < 3)
    throw DimensionError("triplet_prediction_error: need at least 3 items");
  if (m == 0) throw DimensionError("triplet_prediction_error: m must be > 0");
  return static_cast<double>(
             kernels::prediction_disagreements(X_true, X_hat, m, seed)) /
         static_cast<double>(m);
}

double ranking_error_diagnostic(const Matrix& R,
                                const SquaredDistanceMatrix& D_true,
                                const std::vector<int>& landmarks) {
  const int n = D_true.n();
  if (R.rows() != n - 1)
    throw DimensionError("ranking_error_diagnostic: R must have n-1 rows");
  if (static_cast<std::size_t>(R.cols()) != landmarks.size())
    throw DimensionError(
        "ranking_error_diagnostic: one landmark per R column");

  double worst = 0.0;
  for (int c = 0; c < static_cast<int>(landmarks.size()); ++c) {
    const int lm = landmarks[static_cast<std::size_t>(c)];
    if (lm < 0 || lm >= n)
      throw DimensionError("ranking_error_diagnostic: landmark out of range");
    Vector truth(n - 1);
    for (int a = 0; a < n - 1; ++a)
      truth(a) = D_true(a + (a >= lm ? 1 : 0), lm);
    const double shift = truth.mean();
    const double err =
        (truth.array() - R.col(c).array() - shift).abs().maxCoeff();
    worst = std::max(worst, err);
  }
  return worst;
}

namespace {

/// k-means++ seeding for one replicate; consumes successive ordinals.
Matrix seed_centers(const Matrix& X, int k, const rng::Stream& stream) {
  const int n = static_cast<int>(X.cols());
  Matrix centers(X.rows(), k);
  std::uint64_t ord = 0;
  const auto first =
      static_cast<int>(stream.uniform_int(ord++, static_cast<std::uint64_t>(n)));
  centers.col(0) = X.col(first);

  Vector d2(n);
  for (int a = 0; a < n; ++a)
    d2(a) = (X.col(a) - centers.col(0)).squaredNorm();

  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      // Remaining points coincide with chosen centers; any choice is as
      // good as any other.
      pick = static_cast<int>(
          stream.uniform_int(ord++, static_cast<std::uint64_t>(n)));
    } else {
      const double target = stream.u01(ord++) * total;
      double acc = 0.0;
      pick = n - 1;
      for (int a = 0; a < n; ++a) {
        acc += d2(a);
        if (acc > target) {
          pick = a;
          break;
        }
      }
    }
    centers.col(j) = X.col(pick);
    for (int a = 0; a < n; ++a)
      d2(a) = std::min(d2(a), (X.col(a) - centers.col(j)).squaredNorm());
  }
  return centers;
}

struct LloydRun {
  std::vector<int> assignment;
  Matrix centers;
  double inertia = 0.0;
};

LloydRun lloyd(const Matrix& X, Matrix centers, int max_iters) {
  const int n = static_cast<int>(X.cols());
  const int k = static_cast<int>(centers.cols());
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int a = 0; a < n; ++a) {
      int best = 0;
      double best_d = (X.col(a) - centers.col(0)).squaredNorm();
      for (int j = 1; j < k; ++j) {
        const double d = (X.col(a) - centers.col(j)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (assignment[static_cast<std::size_t>(a)] != best) {
        assignment[static_cast<std::size_t>(a)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    centers.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int a = 0; a < n; ++a) {
      const int j = assignment[static_cast<std::size_t>(a)];
      centers.col(j) += X.col(a);
      ++counts[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < k; ++j)
      if (counts[static_cast<std::size_t>(j)] > 0)
        centers.col(j) /= counts[static_cast<std::size_t>(j)];

    // An empty cluster steals the point farthest from its own center.
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int a = 0; a < n; ++a) {
        const int owner = assignment[static_cast<std::size_t>(a)];
        if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
        const double d = (X.col(a) - centers.col(owner)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = a;
        }
      }
      if (far < 0) continue;  // all clusters singletons or empty
      const int owner = assignment[static_cast<std::size_t>(far)];
      --counts[static_cast<std::size_t>(owner)];
      ++counts[static_cast<std::size_t>(j)];
      assignment[static_cast<std::size_t>(far)] = j;
      centers.col(j) = X.col(far);
    }
  }

  LloydRun out;
  out.inertia = 0.0;
  for (int a = 0; a < n; ++a)
    out.inertia +=
        (X.col(a) - centers.col(assignment[static_cast<std::size_t>(a)]))
            .squaredNorm();
  out.assignment = std::move(assignment);
  out.centers = std::move(centers);
  return out;
}

}  // namespace

KmeansResult kmeans(const Matrix& X, int k, int replicates, int max_iters,
                    std::uint64_t seed) {
  const int n = static_cast<int>(X.cols());
  if (k < 1) throw DimensionError("kmeans: k must be at least 1");
  if (k > n) throw DimensionError("kmeans: k exceeds the number of points");
  if (replicates < 1) throw DimensionError("kmeans: need at least 1 replicate");

  const rng::Stream stream(seed, rng::hash_tag("kmeans"));
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < replicates; ++r) {
    LloydRun run = lloyd(
        X, seed_centers(X, k, stream.sub(static_cast<std::uint64_t>(r))),
        max_iters);
    if (run.inertia < best.inertia) {
      best.inertia = run.inertia;
      best.assignment = std::move(run.assignment);
      best.centers = std::move(run.centers);
    }
  }
  return best;
}

double purity(const std::vector<int>& assignment,
              const std::vector<int>& class_labels) {
  if (assignment.size() != class_labels.size() || assignment.empty())
    throw DimensionError("purity: one class label per assigned point");
  std::map<int, std::map<int, int>> overlap;
  for (std::size_t a = 0; a < assignment.size(); ++a)
    ++overlap[assignment[a]][class_labels[a]];
  int matched = 0;
  for (const auto& [cluster, per_class] : overlap) {
    int top = 0;
    for (const auto& [label, count] : per_class) top = std::max(top, count);
    matched += top;
  }
  return static_cast<double>(matched) / static_cast<double>(assignment.size());
}

double kmeans_purity(const Matrix& X_hat, const std::vector<int>& class_labels,
                     int k, int replicates, int max_iters,
                     std::uint64_t seed) {
  if (class_labels.size() != static_cast<std::size_t>(X_hat.cols()))
    throw DimensionError("kmeans_purity: one class label per point");
  return purity(kmeans(X_hat, k, replicates, max_iters, seed).assignment,
                class_labels);
}

}  // namespace loe
