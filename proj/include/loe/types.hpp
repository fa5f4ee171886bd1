#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

/// Landmark ordinal embedding: common matrix aliases, domain types, and
/// error hierarchy shared by every stage of the pipeline.
///
/// Conventions used throughout the library:
///   - Point configurations are d x n matrices, one item per column.
///   - Item indices are 0-based in memory; file formats are 1-based.
///   - Squared Euclidean distances everywhere (the oracle compares them).
namespace loe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Shapes disagree with an operation's contract.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input file could not be parsed; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spectrum is unusable for the requested embedding dimension: fewer than
/// d nonnegative eigenvalues.  Carries the offending spectrum.
class RankError : public std::runtime_error {
 public:
  RankError(const std::string& message, Vector spectrum)
      : std::runtime_error(message), spectrum_(std::move(spectrum)) {}
  const Vector& spectrum() const { return spectrum_; }

 private:
  Vector spectrum_;
};

/// Ordered item triple <i, j, k>: a query that compares D_ij against D_ik.
/// i is the head item; all three indices must be distinct.
struct Triplet {
  int i = 0;
  int j = 0;
  int k = 0;

  /// Throws DimensionError unless the indices are distinct and inside [0, n).
  void validate(int n) const {
    if (i == j || i == k || j == k)
      throw DimensionError("triplet indices must be distinct: <" +
                           std::to_string(i) + "," + std::to_string(j) + "," +
                           std::to_string(k) + ">");
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n)
      throw DimensionError("triplet index out of range for n=" +
                           std::to_string(n));
  }
};

/// A triplet together with its observed +/-1 label (+1: j farther than k
/// from the head item i).
struct Comparison {
  Triplet triplet;
  int label = 1;  // +1 or -1
};

/// n x n matrix of squared Euclidean distances.  Construction validates the
/// EDM surface invariants (symmetry, zero diagonal, nonnegativity); deeper
/// cone membership is the business of project_edm / classical_mds.
class SquaredDistanceMatrix {
 public:
  SquaredDistanceMatrix() = default;

  explicit SquaredDistanceMatrix(Matrix d, double tol = 1e-12)
      : d_(std::move(d)) {
    if (d_.rows() != d_.cols())
      throw DimensionError("squared distance matrix must be square");
    const double scale = std::max(1.0, d_.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < d_.cols(); ++j) {
      if (d_(j, j) != 0.0)
        throw DimensionError("squared distance matrix must have zero diagonal");
      for (Eigen::Index i = 0; i < d_.rows(); ++i) {
        if (d_(i, j) < 0.0)
          throw DimensionError("squared distances must be nonnegative");
        if (std::abs(d_(i, j) - d_(j, i)) > tol * scale)
          throw DimensionError("squared distance matrix must be symmetric");
      }
    }
  }

  Eigen::Index n() const { return d_.rows(); }
  const Matrix& get() const { return d_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return d_(i, j); }

 private:
  Matrix d_;
};

/// Per-landmark constant shifts s (length l): the unknown offsets between
/// ranking-score estimates and true distance columns.
using ShiftVector = Vector;

}  // namespace loe
