#pragma once

#include "loe/kernels.hpp"
#include "loe/oracle.hpp"
#include "loe/types.hpp"

#include <cstdint>
#include <vector>

/// l2-regularized Bradley-Terry-Luce maximum-likelihood score estimation
/// from pairwise comparisons, and the per-landmark column-ranking stage.
namespace loe {

/// A pairwise comparison problem: n_items scores, records (j, k, y) with
/// y = +1 claiming item j ranks above (is farther than) item k.
struct ComparisonSet {
  int n_items = 0;
  kernels::PairRecords records;
};

/// Solver options for the regularized MLE: deterministic full-batch
/// first-order ascent (Barzilai-Borwein steps safeguarded by non-monotone
/// backtracking), stopping on the gradient norm.
struct MleOptions {
  double tol = 1e-6;     // gradient 2-norm at the solution
  int max_iters = 2000;
  const Vector* init = nullptr;  // optional start (default: zero vector)
};

struct MleResult {
  Vector theta;       // centered maximizer estimate
  bool converged = false;
  int iters = 0;
  double grad_norm = 0.0;
  double nll = 0.0;   // regularized negative log-likelihood at theta
};

/// Maximizes L_lambda(theta) = sum log f(y (theta_j - theta_k))
///                             - (lambda/2) ||theta||^2
/// and centers the result to sum(theta) = 0.  The objective is strictly
/// concave, so the solver start does not matter beyond tolerance.
/// Non-convergence within opts.max_iters returns the best iterate with
/// converged = false.
MleResult regularized_btl_mle(const ComparisonSet& omega, double lambda,
                              const MleOptions& opts = {});

/// Theorem-schedule regularization strength: c_lambda sqrt(n^3 ln n / m).
double default_lambda(int n_items, std::uint64_t m, double c_lambda = 1.0);

struct RankingOptions {
  MleOptions mle;
  double c_lambda = 1.0;
  std::uint64_t seed = 0;         // pair-sampling stream
  bool parallel_columns = true;   // solve the l columns concurrently
};

struct RankingResult {
  Matrix R;  // (n-1) x l; column i is the centered score estimate under O_i
  std::vector<MleResult> columns;  // per-column solver summaries (theta moved out)
  std::uint64_t queries = 0;       // total oracle comparisons consumed
  std::uint64_t m_per_column = 0;
  double lambda = 0.0;             // regularization used (same for all columns)
  bool all_converged = false;
  bool budget_warning = false;     // m/l below the (n-1) ln(n-1) threshold
};

/// Ranking stage over landmarks 0..l-1 of the given oracle: each column i
/// draws floor(m_total / l) uniform pairs over the (n-1)-item column
/// problem, queries O_i, and solves the regularized MLE.  Columns are
/// independent and may run concurrently; output is ordered by column, and
/// oracle ordinals are partitioned per column, so the result does not
/// depend on scheduling.
RankingResult rank_landmark_columns(TripletOracle& oracle, int l,
                                    std::uint64_t m_total,
                                    const RankingOptions& opts = {});

}  // namespace loe
