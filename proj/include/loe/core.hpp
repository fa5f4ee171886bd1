#pragma once

#include "loe/types.hpp"

/// Small matrix operators shared by every pipeline stage: distance matrices,
/// the column-shift operator, and the projection onto the subspace
/// V = S^l ∩ J-perp (symmetric matrices orthogonal to J = 11^T - I).
namespace loe {

/// J = 11^T - I, the all-ones-off-diagonal matrix of order l.
Matrix ones_offdiag(Eigen::Index l);

/// Centering matrix H = I - (1/l) 11^T.
Matrix centering_matrix(Eigen::Index l);

/// Squared Euclidean distance matrix of X (d x n, one item per column).
/// Exactly symmetric with exactly zero diagonal by construction.
SquaredDistanceMatrix squared_distance_matrix(const Matrix& X);

/// shift(W, s) = W + J diag(s): adds s_j to column j everywhere off the
/// diagonal; the diagonal is untouched.  Linear in s.
Matrix shift_columns(const Matrix& W, const ShiftVector& s);

/// sigma_X = <X, J> / ||J||^2: the mean off-diagonal entry of X.
double sigma_offdiag(const Matrix& X);

/// Orthogonal projection of X onto V: sym(X) - sigma_{sym(X)} J where
/// sym(X) = (X + X^T)/2.  Idempotent; output satisfies <Y, J> = 0.
Matrix project_onto_V(const Matrix& X);

/// Translates each coordinate row of X to zero mean (pairwise distances are
/// unchanged).
Matrix center_columns(const Matrix& X);

/// True when every coordinate row of X has mean within tol of zero,
/// relative to the coordinate scale.
bool is_centered(const Matrix& X, double tol = 1e-9);

}  // namespace loe
