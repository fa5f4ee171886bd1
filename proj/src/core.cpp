#include "loe/core.hpp"

#include <algorithm>
#include <cmath>

namespace loe {

Matrix ones_offdiag(Eigen::Index l) {
  Matrix j = Matrix::Ones(l, l);
  j.diagonal().setZero();
  return j;
}

Matrix centering_matrix(Eigen::Index l) {
  return Matrix::Identity(l, l) -
         Matrix::Constant(l, l, 1.0 / static_cast<double>(l));
}

SquaredDistanceMatrix squared_distance_matrix(const Matrix& X) {
  const Eigen::Index n = X.cols();
  Matrix d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (X.col(i) - X.col(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return SquaredDistanceMatrix(std::move(d));
}

Matrix shift_columns(const Matrix& W, const ShiftVector& s) {
  if (W.rows() != W.cols())
    throw DimensionError("shift_columns: W must be square");
  if (s.size() != W.cols())
    throw DimensionError("shift_columns: dim(s) must equal the order of W");
  Matrix out = W;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    out.col(j).array() += s(j);
    out(j, j) = W(j, j);
  }
  return out;
}

double sigma_offdiag(const Matrix& X) {
  if (X.rows() != X.cols())
    throw DimensionError("sigma_offdiag: matrix must be square");
  const auto l = static_cast<double>(X.rows());
  if (X.rows() < 2) return 0.0;
  return (X.sum() - X.trace()) / (l * (l - 1.0));
}

Matrix project_onto_V(const Matrix& X) {
  if (X.rows() != X.cols())
    throw DimensionError("project_onto_V: matrix must be square");
  const Matrix sym = 0.5 * (X + X.transpose());
  return sym - sigma_offdiag(sym) * ones_offdiag(X.rows());
}

Matrix center_columns(const Matrix& X) {
  return X.colwise() - X.rowwise().mean();
}

bool is_centered(const Matrix& X, double tol) {
  if (X.cols() == 0) return true;
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  return (X.rowwise().mean().cwiseAbs().maxCoeff()) <=
         tol * scale * static_cast<double>(X.cols());
}

}  // namespace loe
