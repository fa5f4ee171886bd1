#include "loe/lmds.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

namespace loe {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

MdsResult classical_mds(const SquaredDistanceMatrix& E, int d) {
  const Eigen::Index l = E.n();
  if (l < d + 1)
    throw DimensionError("classical_mds: need at least d+1 landmarks");

  const Matrix h = centering_matrix(l);
  const Matrix gram = -0.5 * h * E.get() * h;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& spectrum = eig.eigenvalues();  // ascending

  const double scale = std::max(1.0, spectrum.cwiseAbs().maxCoeff());
  int nonneg = 0;
  double neg_mass = 0.0, abs_mass = 0.0;
  for (Eigen::Index i = 0; i < l; ++i) {
    if (spectrum(i) >= -1e-12 * scale) ++nonneg;
    neg_mass += std::max(0.0, -spectrum(i));
    abs_mass += std::abs(spectrum(i));
  }
  if (nonneg < d)
    throw RankError("classical_mds: fewer than d nonnegative eigenvalues",
                    spectrum.reverse());

  MdsResult out;
  out.eigenvalues = spectrum.tail(d).reverse();
  out.negative_mass = abs_mass > 0.0 ? neg_mass / abs_mass : 0.0;
  out.delta_bar = E.get().colwise().mean();
  out.Z.resize(d, l);
  for (int r = 0; r < d; ++r) {
    const double lam = std::max(0.0, out.eigenvalues(r));
    out.Z.row(r) =
        std::sqrt(lam) * eig.eigenvectors().col(l - 1 - r).transpose();
  }
  out.Z = center_columns(out.Z);  // eigenvectors of the centered Gram are
                                  // centered already; this pins exactness
  return out;
}

Matrix lmds_triangulate(const MdsResult& landmarks, const Matrix& F) {
  const Eigen::Index d = landmarks.Z.rows();
  const Eigen::Index l = landmarks.Z.cols();
  if (F.cols() != l)
    throw DimensionError("lmds_triangulate: F must have one column per landmark");
  const double scale = std::max(1.0, landmarks.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < d; ++r)
    if (landmarks.eigenvalues(r) <= 1e-12 * scale)
      throw RankError("lmds_triangulate: landmark configuration is rank "
                      "deficient for dimension d",
                      landmarks.eigenvalues);

  // Pseudoinverse transpose of the landmark configuration: diag(1/lambda) Z.
  const Matrix lsharp =
      landmarks.eigenvalues.cwiseInverse().asDiagonal() * landmarks.Z;
  return -0.5 * lsharp *
         (F.transpose().colwise() - landmarks.delta_bar);
}

Matrix embed_from_rankings(const Matrix& R, int l, int d, MdsResult* mds_out) {
  const ShiftRecovery rec = recover_landmark_columns(R, l);
  const MdsResult mds = classical_mds(rec.columns.E_hat, d);
  Matrix x(d, R.rows() + 1);
  x.leftCols(l) = mds.Z;
  x.rightCols(x.cols() - l) = lmds_triangulate(mds, rec.columns.F_hat);
  if (mds_out != nullptr) *mds_out = mds;
  return center_columns(x);
}

LoeResult loe(TripletOracle& oracle, int d, std::uint64_t m_total,
              const LoeOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = oracle.n_items();
  const int l = opts.landmarks > 0 ? opts.landmarks : d + 3;
  if (l < d + 3)
    throw DimensionError("loe: need at least d + 3 landmarks");
  if (n < l + 1)
    throw DimensionError("loe: need more items than landmarks");
  if (m_total < static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(n - 1))
    throw DimensionError("loe: budget below l*(n-1) comparisons");

  LoeResult out;
  const rng::Stream stream(opts.seed);
  out.landmarks = rng::sample_without_replacement(n, l, stream.sub("landmarks"));

  // Permuted view with the landmarks relabeled to 0..l-1.
  out.perm = out.landmarks;
  out.perm.reserve(static_cast<std::size_t>(n));
  {
    std::vector<char> is_landmark(static_cast<std::size_t>(n), 0);
    for (const int i : out.landmarks) is_landmark[static_cast<std::size_t>(i)] = 1;
    for (int i = 0; i < n; ++i)
      if (is_landmark[static_cast<std::size_t>(i)] == 0) out.perm.push_back(i);
  }
  PermutedTripletOracle view(oracle, out.perm);

  const std::uint64_t queries_before = oracle.query_count();
  RankingOptions ropts;
  ropts.mle = opts.mle;
  ropts.c_lambda = opts.c_lambda;
  ropts.seed = opts.seed;
  ropts.parallel_columns = opts.parallel_columns;

  auto t0 = std::chrono::steady_clock::now();
  out.ranking = rank_landmark_columns(view, l, m_total, ropts);
  out.seconds.ranking = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const ShiftRecovery rec = recover_landmark_columns(out.ranking.R, l);
  out.s_hat = rec.s_hat;
  out.seconds.shifts = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  out.mds = classical_mds(rec.columns.E_hat, d);
  out.seconds.mds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Matrix x_perm(d, n);
  x_perm.leftCols(l) = out.mds.Z;
  x_perm.rightCols(n - l) = lmds_triangulate(out.mds, rec.columns.F_hat);
  x_perm = center_columns(x_perm);
  out.X.resize(d, n);
  for (int p = 0; p < n; ++p)
    out.X.col(out.perm[static_cast<std::size_t>(p)]) = x_perm.col(p);
  out.seconds.triangulation = seconds_since(t0);

  out.queries = oracle.query_count() - queries_before;
  out.converged = out.ranking.all_converged;
  out.seconds.total = seconds_since(t_start);
  return out;
}

}  // namespace loe
