#pragma once

#include "loe/core.hpp"
#include "loe/types.hpp"

/// Shift recovery: turn the ranking matrix R into landmark distance-column
/// estimates by identifying the per-column constants the ranking stage
/// cannot see.  The key identity: for l >= d + 3 landmarks, the mean
/// off-diagonal of the true landmark EDM equals the second largest
/// eigenvalue of its V-projection, which pins the one remaining degree of
/// freedom of the shift system.
namespace loe {

/// Landmark distance-column estimates: the l x l landmark EDM estimate and
/// the (n-l) x l cross-distance block.
struct LandmarkColumns {
  SquaredDistanceMatrix E_hat;
  Matrix F_hat;
};

/// W: top l-1 rows of R re-laid out with a zero diagonal, so that
/// W[i][j] = R[i - 1{i>j}][j] off the diagonal.  Column j of W estimates
/// E*'s column j up to the unknown shift.
Matrix build_w(const Matrix& R, int l);

/// Least-squares solution sigma of the (C(l,2)+1)-equation system
///   sigma_i - sigma_j = W_ij - W_ji          for all i < j,
///   sum_i sigma_i     = -(1/(l-1)) sum_{i != j} W_ij.
/// Optionally reports the residual norm ||A sigma - b||.
ShiftVector estimate_centered_shifts(const Matrix& W,
                                     double* residual = nullptr);

/// sigma_E estimate: the second largest eigenvalue (descending order) of
/// P_V(shift(W, sigma_hat)).  Valid when l >= d + 3.
double estimate_sigma_e(const Matrix& W, const ShiftVector& sigma_hat);

/// Nearest-EDM surrogate: symmetrize, zero the diagonal, clip the negative
/// eigenvalues of the doubly-centered Gram form, and map back to squared
/// distances.  Members of the EDM cone pass through unchanged.
SquaredDistanceMatrix project_edm(const Matrix& M);

struct ShiftRecovery {
  LandmarkColumns columns;
  ShiftVector s_hat;      // sigma_hat + sigma_e * 1
  ShiftVector sigma_hat;  // centered-shift least-squares solution
  double sigma_e = 0.0;
  double lsq_residual = 0.0;
};

/// Lines 8-15 of the pipeline: W from R, the shift system, the
/// second-eigenvalue correction, the EDM projection, and the shifted
/// cross-distance block F_hat = R(l:n-1, :) + 1 s_hat^T.
ShiftRecovery recover_landmark_columns(const Matrix& R, int l);

}  // namespace loe
