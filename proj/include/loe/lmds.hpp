#pragma once

#include "loe/landmark.hpp"
#include "loe/oracle.hpp"
#include "loe/ranking.hpp"
#include "loe/types.hpp"

#include <cstdint>
#include <vector>

/// Classical multidimensional scaling on the landmark EDM, triangulation of
/// the remaining points from their landmark distances, and the top-level
/// landmark-ordinal-embedding driver.
namespace loe {

/// Landmark MDS solution: Z = diag(sqrt(lambda_1..lambda_d)) V^T from the
/// eigendecomposition of the doubly-centered Gram -1/2 H E H.
struct MdsResult {
  Matrix Z;            // d x l centered landmark configuration
  Vector eigenvalues;  // top d Gram eigenvalues, descending
  Vector delta_bar;    // column means of the source EDM (triangulation needs them)
  double negative_mass = 0.0;  // |negative spectrum| / |spectrum|, a noise gauge
};

/// Embeds the l landmarks from their squared distance matrix.  Exact up to
/// an orthogonal transform when E is the EDM of a rank-d configuration.
/// Throws RankError (carrying the spectrum) when fewer than d Gram
/// eigenvalues are nonnegative.
MdsResult classical_mds(const SquaredDistanceMatrix& E, int d);

/// Triangulates non-landmark points from their squared distances to the
/// landmarks (rows of F), via the pseudoinverse affine map
///   x_a = -1/2 diag(1/lambda) Z (delta_a - delta_bar).
/// Exact for noiseless F of points in the landmark span.  Throws RankError
/// when the landmark configuration does not span d dimensions.
Matrix lmds_triangulate(const MdsResult& landmarks, const Matrix& F);

/// Runs MDS + triangulation on an assembled ranking matrix (landmarks
/// first): the post-ranking stages of the pipeline in isolation.  Returns
/// the d x n embedding in the permuted order, centered.
Matrix embed_from_rankings(const Matrix& R, int l, int d,
                           MdsResult* mds_out = nullptr);

struct LoeOptions {
  int landmarks = 0;            // 0 -> d + 3
  std::uint64_t seed = 0;       // landmark selection + pair sampling
  double c_lambda = 1.0;
  MleOptions mle;
  bool parallel_columns = true;
};

struct LoeStageSeconds {
  double ranking = 0.0;
  double shifts = 0.0;
  double mds = 0.0;
  double triangulation = 0.0;
  double total = 0.0;
};

struct LoeResult {
  Matrix X;                     // d x n, centered, original item order
  std::vector<int> landmarks;   // chosen landmark item indices
  std::vector<int> perm;        // permuted order used internally (landmarks first)
  ShiftVector s_hat;
  MdsResult mds;
  RankingResult ranking;        // R matrix plus per-column solver summaries
  LoeStageSeconds seconds;
  std::uint64_t queries = 0;
  bool converged = false;       // every column solver met its tolerance
};

/// Landmark ordinal embedding: select l landmarks uniformly, rank each
/// landmark's distance column from triplet queries, identify the column
/// shifts through the EDM structure, and reconstruct all n points by
/// landmark MDS.  Output columns are returned in original item order.
LoeResult loe(TripletOracle& oracle, int d, std::uint64_t m_total,
              const LoeOptions& opts = {});

}  // namespace loe
