#include "loe/landmark.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>

namespace loe {

Matrix build_w(const Matrix& R, int l) {
  if (R.cols() != l)
    throw DimensionError("build_w: R must have exactly l columns");
  if (R.rows() < l - 1)
    throw DimensionError("build_w: R must have at least l-1 rows");
  Matrix w = Matrix::Zero(l, l);
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i < l; ++i) {
      if (i == j) continue;
      w(i, j) = R(i - (i > j ? 1 : 0), j);
    }
  }
  return w;
}

ShiftVector estimate_centered_shifts(const Matrix& W, double* residual) {
  if (W.rows() != W.cols())
    throw DimensionError("estimate_centered_shifts: W must be square");
  const int l = static_cast<int>(W.rows());
  if (l < 2)
    throw DimensionError("estimate_centered_shifts: need l >= 2");

  const int rows = l * (l - 1) / 2 + 1;
  Matrix a = Matrix::Zero(rows, l);
  Vector b(rows);
  int r = 0;
  for (int i = 0; i < l; ++i) {
    for (int j = i + 1; j < l; ++j, ++r) {
      a(r, i) = 1.0;
      a(r, j) = -1.0;
      b(r) = W(i, j) - W(j, i);
    }
  }
  a.row(r).setOnes();
  b(r) = -(W.sum() - W.trace()) / static_cast<double>(l - 1);

  const ShiftVector sigma = a.colPivHouseholderQr().solve(b);
  if (residual != nullptr) *residual = (a * sigma - b).norm();
  return sigma;
}

double estimate_sigma_e(const Matrix& W, const ShiftVector& sigma_hat) {
  const Matrix ec = project_onto_V(shift_columns(W, sigma_hat));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ec, Eigen::EigenvaluesOnly);
  // Eigen sorts ascending; the second largest sits at index l-2.
  return eig.eigenvalues()(W.rows() - 2);
}

SquaredDistanceMatrix project_edm(const Matrix& M) {
  if (M.rows() != M.cols())
    throw DimensionError("project_edm: matrix must be square");
  const Eigen::Index l = M.rows();

  Matrix s = 0.5 * (M + M.transpose());
  s.diagonal().setZero();

  const Matrix h = centering_matrix(l);
  const Matrix gram = -0.5 * h * s * h;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  const Matrix g = eig.eigenvectors() * clipped.asDiagonal() *
                   eig.eigenvectors().transpose();

  Matrix d(l, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < l; ++i) {
      const double v = std::max(0.0, g(i, i) + g(j, j) - 2.0 * g(i, j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return SquaredDistanceMatrix(std::move(d));
}

ShiftRecovery recover_landmark_columns(const Matrix& R, int l) {
  if (R.cols() != l)
    throw DimensionError("recover_landmark_columns: R must have l columns");
  const Eigen::Index n_minus_1 = R.rows();
  if (n_minus_1 < l)
    throw DimensionError("recover_landmark_columns: R must have >= l rows");

  ShiftRecovery out;
  const Matrix w = build_w(R, l);
  out.sigma_hat = estimate_centered_shifts(w, &out.lsq_residual);
  out.sigma_e = estimate_sigma_e(w, out.sigma_hat);
  out.s_hat = out.sigma_hat.array() + out.sigma_e;
  out.columns.E_hat = project_edm(shift_columns(w, out.s_hat));
  out.columns.F_hat = R.bottomRows(n_minus_1 - (l - 1));
  out.columns.F_hat.rowwise() += out.s_hat.transpose();
  return out;
}

}  // namespace loe
