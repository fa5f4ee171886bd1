#pragma once

#include "loe/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

/// Evaluation metrics: Procrustes distance, triplet prediction error, the
/// ranking-error diagnostic, and k-means clustering purity.
namespace loe {

/// Metric bundle attached to every experiment run.
struct MetricReport {
  double procrustes = 0.0;
  double normalized_procrustes = 0.0;  // procrustes / sqrt(n d)
  double prediction_error = 0.0;       // fraction in [0, 1]
  std::optional<double> purity;        // clustering experiments only
};

/// Procrustes distance min over orthogonal Q of ||X - QY||_F, in closed
/// form from the singular values of X Y^T.  Inputs are centered internally
/// (the distance is between the centered configurations); symmetric in its
/// arguments, and a pseudometric on centered configurations.
double procrustes_distance(const Matrix& X, const Matrix& Y);

/// Fraction of triplets (i, {j, k}) whose distance ordering
/// sign(||x_i - x_j||^2 - ||x_i - x_k||^2) differs between the two
/// configurations.  A tie on one side only counts as a disagreement.
/// Exhaustive over all n * C(n-1, 2) triplets: quadratic-plus work, meant
/// for small n.
double triplet_prediction_error(const Matrix& X_true, const Matrix& X_hat);

/// Monte Carlo estimate of the same over m uniform triplets.
double triplet_prediction_error(const Matrix& X_true, const Matrix& X_hat,
                                std::uint64_t m, std::uint64_t seed);

/// Ranking error e = max_i ||D*_{-i} - R_i - s*_i 1||_inf of an estimated
/// ranking matrix against ground truth, where s*_i is the mean of column
/// i's true distances (synthetic diagnostics only).  landmarks[c] names
/// the item column c ranked; its rows cover the remaining items in
/// ascending order.
double ranking_error_diagnostic(const Matrix& R,
                                const SquaredDistanceMatrix& D_true,
                                const std::vector<int>& landmarks);

struct KmeansResult {
  std::vector<int> assignment;  // n entries in [0, k)
  Matrix centers;               // d x k
  double inertia = 0.0;         // within-cluster sum of squared distances
};

/// Lloyd's algorithm with k-means++ seeding; `replicates` independent
/// restarts, lowest inertia kept.  Deterministic in `seed` (each replicate
/// draws from its own substream).
KmeansResult kmeans(const Matrix& X, int k, int replicates = 5,
                    int max_iters = 100, std::uint64_t seed = 0);

/// purity(assignment, classes) = (1/n) sum_clusters max_class overlap.
double purity(const std::vector<int>& assignment,
              const std::vector<int>& class_labels);

/// Clusters X_hat with k-means (paper protocol: 5 replicates, 100
/// iterations) and scores the result against the true class labels.
double kmeans_purity(const Matrix& X_hat, const std::vector<int>& class_labels,
                     int k, int replicates = 5, int max_iters = 100,
                     std::uint64_t seed = 0);

}  // namespace loe
