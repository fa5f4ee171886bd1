#include "loe/synthetic.hpp"

#include "loe/core.hpp"
#include "loe/rng.hpp"

#include <cmath>
#include <limits>

namespace loe {

namespace {

Matrix normal_matrix(int d, int n, const rng::Stream& stream, double stddev) {
  Matrix X(d, n);
  std::uint64_t draw = 0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < d; ++r) X(r, c) = stddev * stream.normal(draw++);
  return X;
}

/// Deterministic well-spread unit-scale centers: +-axis directions first,
/// then further shells of the same pattern; rescaled afterwards so the
/// closest pair is exactly `separation` apart.
Matrix blob_centers(int d, int k, double separation) {
  Matrix centers(d, k);
  for (int j = 0; j < k; ++j) {
    const int axis = (j / 2) % d;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double shell = 1.0 + static_cast<double>(j / (2 * d));
    centers.col(j).setZero();
    centers(axis, j) = sign * shell;
  }
  double closest = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      closest = std::min(closest, (centers.col(a) - centers.col(b)).norm());
  if (k > 1) centers *= separation / closest;
  return centers;
}

}  // namespace

Matrix generate_normal_config(int n, int d, std::uint64_t seed, double scale) {
  if (n < 1 || d < 1)
    throw DimensionError("generate_normal_config: n and d must be positive");
  const double stddev = scale * std::pow(2.0 * d, -0.25);
  return center_columns(
      normal_matrix(d, n, rng::Stream(seed, rng::hash_tag("normal")), stddev));
}

Matrix generate_uniform_config(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1)
    throw DimensionError("generate_uniform_config: n and d must be positive");
  const rng::Stream stream(seed, rng::hash_tag("uniform"));
  Matrix X(d, n);
  std::uint64_t draw = 0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < d; ++r) X(r, c) = stream.u01(draw++);
  return center_columns(X);
}

ClusteredConfig generate_clustered_config(int n, int d, int k,
                                          double separation,
                                          std::uint64_t seed) {
  if (n < 1 || d < 1)
    throw DimensionError("generate_clustered_config: n and d must be positive");
  if (k < 1 || k > n)
    throw DimensionError("generate_clustered_config: need 1 <= k <= n");
  if (separation < 0.0)
    throw DimensionError("generate_clustered_config: separation must be >= 0");

  const Matrix centers = blob_centers(d, k, separation);
  ClusteredConfig out;
  out.X = normal_matrix(d, n, rng::Stream(seed, rng::hash_tag("clustered")),
                        1.0);
  out.labels.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const int label = a % k;
    out.labels[static_cast<std::size_t>(a)] = label;
    out.X.col(a) += centers.col(label);
  }
  out.X = center_columns(out.X);
  return out;
}

Matrix exact_rankings(const SquaredDistanceMatrix& D, int l) {
  const int n = D.n();
  if (l < 1 || l >= n)
    throw DimensionError("exact_rankings: need 1 <= l < n");
  Matrix R(n - 1, l);
  for (int c = 0; c < l; ++c) {
    for (int a = 0; a < n - 1; ++a)
      R(a, c) = D(a + (a >= c ? 1 : 0), c);
    R.col(c).array() -= R.col(c).mean();
  }
  return R;
}

}  // namespace loe
