#pragma once

#include "loe/types.hpp"

#include <cstdint>
#include <vector>

/// Hot numerical loops, each in two builds:
///
///   kernels::serial::*  -- straight single-threaded reference loops, kept
///                          for testing and as ground truth for the
///                          parallel versions;
///   kernels::*          -- OpenMP versions used by the library.
///
/// The parallel versions are bitwise thread-count invariant: work is split
/// into fixed-size chunks, each chunk produces a partial result, and
/// partials are combined serially in chunk order.  Only the expensive
/// per-record math (distance differences, exp/log) runs in parallel; the
/// cheap gradient scatter stays serial so no atomic or thread-ordered
/// floating-point accumulation exists anywhere.
///
/// `tools/kernelbench` compares the two builds head to head.
namespace loe::kernels {

/// Records are laid out struct-of-arrays for the kernels' benefit.

/// One pairwise comparison (j, k, y): y = +1 claims item j ranks above
/// (is farther than) item k.
struct PairRecords {
  std::vector<int> j, k;
  std::vector<signed char> y;

  std::size_t size() const { return j.size(); }
  void push_back(int jj, int kk, int yy) {
    j.push_back(jj);
    k.push_back(kk);
    y.push_back(static_cast<signed char>(yy));
  }
};

/// One labeled triplet (i, j, k, y): y = +1 claims D_ij > D_ik.
struct TripletRecords {
  std::vector<int> i, j, k;
  std::vector<signed char> y;

  std::size_t size() const { return i.size(); }
  void push_back(int ii, int jj, int kk, int yy) {
    i.push_back(ii);
    j.push_back(jj);
    k.push_back(kk);
    y.push_back(static_cast<signed char>(yy));
  }
};

/// Triplet losses shared by the baselines.
enum class TripletLoss {
  logistic,  // STE:   log(1 + exp(-y (D_ij - D_ik)))
  hinge,     // GNMDS: max(0, 1 - y (D_ij - D_ik))
};

/// Reusable scratch for the two-pass kernels (per-record coefficients and
/// per-chunk partial losses); avoids reallocating inside optimizer loops.
struct Workspace {
  std::vector<double> coeff;
  std::vector<double> partial;
};

/// Fixed work-chunk size of the deterministic parallel reduction.
inline constexpr std::size_t kChunk = 8192;

// ---------------------------------------------------------------------------
// Regularized BTL negative log-likelihood (the ranking stage's objective)
//
//   nll(theta) = sum_t log(1 + exp(-y_t (theta_j - theta_k)))
//                + (lambda/2) ||theta||^2
//
// Returns the value and writes the gradient (resized to theta's length).
// ---------------------------------------------------------------------------
double btl_nll_grad(const PairRecords& records, const Vector& theta,
                    double lambda, Vector& grad, Workspace& ws);

// ---------------------------------------------------------------------------
// Triplet embedding loss over X (d x n) for STE / GNMDS
//
//   nll(X) = sum_t loss(y_t (D_ij - D_ik)),  D_ab = ||x_a - x_b||^2
//
// Returns the value and writes the gradient (resized to X's shape).
// ---------------------------------------------------------------------------
double triplet_nll_grad(const TripletRecords& records, const Matrix& X,
                        TripletLoss loss, Matrix& grad, Workspace& ws);

/// Loss only (no gradient scatter); what line-search probes call.
double triplet_nll(const TripletRecords& records, const Matrix& X,
                   TripletLoss loss, Workspace& ws);

// ---------------------------------------------------------------------------
// Sampled triplet disagreement count between two configurations: of m
// uniformly seeded triplets, how many does X_hat order differently than
// X_true?  (Ties are disagreements unless tied in both.)
// ---------------------------------------------------------------------------
std::uint64_t prediction_disagreements(const Matrix& X_true,
                                       const Matrix& X_hat, std::uint64_t m,
                                       std::uint64_t seed);

namespace serial {

double btl_nll_grad(const PairRecords& records, const Vector& theta,
                    double lambda, Vector& grad);

double triplet_nll_grad(const TripletRecords& records, const Matrix& X,
                        TripletLoss loss, Matrix& grad);

double triplet_nll(const TripletRecords& records, const Matrix& X,
                   TripletLoss loss);

std::uint64_t prediction_disagreements(const Matrix& X_true,
                                       const Matrix& X_hat, std::uint64_t m,
                                       std::uint64_t seed);

}  // namespace serial

/// Whether the library was built with OpenMP, and the worker cap in effect.
bool openmp_enabled();
int max_threads();

}  // namespace loe::kernels
