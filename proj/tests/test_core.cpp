#include "loe/core.hpp"

#include "loe/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using loe::Matrix;
using loe::Vector;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  const loe::rng::Stream s(seed, loe::rng::hash_tag("test-matrix"));
  Matrix X(rows, cols);
  std::uint64_t t = 0;
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) X(r, c) = s.normal(t++);
  return X;
}

}  // namespace

TEST_CASE("squared_distance_matrix: single column is the 1x1 zero matrix") {
  const Matrix X = random_matrix(3, 1, 1);
  const auto D = loe::squared_distance_matrix(X);
  REQUIRE(D.n() == 1);
  CHECK(D(0, 0) == 0.0);
}

TEST_CASE("squared_distance_matrix: unit separation in d=1") {
  Matrix X(1, 2);
  X << 0.0, 1.0;
  const auto D = loe::squared_distance_matrix(X);
  CHECK(D(0, 0) == 0.0);
  CHECK(D(0, 1) == 1.0);
  CHECK(D(1, 0) == 1.0);
  CHECK(D(1, 1) == 0.0);
}

TEST_CASE("squared_distance_matrix matches the brute-force loop") {
  const Matrix X = random_matrix(2, 3, 2);
  const auto D = loe::squared_distance_matrix(X);
  const Matrix B = refs::brute_sqdist(X);
  CHECK((D.get() - B).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("squared_distance_matrix output is negative-type") {
  for (std::uint64_t seed = 3; seed < 6; ++seed) {
    const Matrix X = random_matrix(3, 8, seed);
    const auto D = loe::squared_distance_matrix(X);
    const int n = static_cast<int>(D.n());

    // Surface invariants.
    CHECK(D.get().diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((D.get() - D.get().transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(D.get().minCoeff() >= 0.0);

    // -1/2 H D H is PSD for genuine squared Euclidean distances.
    const Matrix H = loe::centering_matrix(n);
    const Matrix G = -0.5 * H * D.get() * H;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("SquaredDistanceMatrix construction rejects non-EDM surfaces") {
  Matrix bad(2, 2);

  bad << 0.0, 1.0, 2.0, 0.0;  // asymmetric
  CHECK_THROWS_AS(loe::SquaredDistanceMatrix{bad}, loe::DimensionError);

  bad << 0.5, 1.0, 1.0, 0.0;  // nonzero diagonal
  CHECK_THROWS_AS(loe::SquaredDistanceMatrix{bad}, loe::DimensionError);

  bad << 0.0, -1.0, -1.0, 0.0;  // negative entry
  CHECK_THROWS_AS(loe::SquaredDistanceMatrix{bad}, loe::DimensionError);

  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(loe::SquaredDistanceMatrix{rect}, loe::DimensionError);
}

TEST_CASE("shift_columns: zero shift is the identity") {
  const Matrix W = random_matrix(4, 4, 7);
  const Vector s = Vector::Zero(4);
  CHECK(loe::shift_columns(W, s) == W);
}

TEST_CASE("shift_columns: hand-expanded 2x2 case") {
  const double a = 1.75, b = -0.5;
  Matrix W(2, 2);
  W << 0.0, a, b, 0.0;
  Vector s(2);
  s << -b, -a;
  CHECK(loe::shift_columns(W, s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shift_columns leaves the diagonal alone and is linear in s") {
  const Matrix W = random_matrix(5, 5, 8);
  const Matrix s1 = random_matrix(5, 1, 9);
  const Matrix s2 = random_matrix(5, 1, 10);

  const Matrix shifted = loe::shift_columns(W, s1);
  CHECK((shifted.diagonal() - W.diagonal()).cwiseAbs().maxCoeff() == 0.0);

  const Matrix once = loe::shift_columns(W, s1 + s2);
  const Matrix twice = loe::shift_columns(loe::shift_columns(W, s1), s2);
  CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);

  Vector wrong(4);
  wrong.setZero();
  CHECK_THROWS_AS(loe::shift_columns(W, wrong), loe::DimensionError);
}

TEST_CASE("project_onto_V: fixed points, J, and the basis least-squares oracle") {
  const int l = 6;
  const Matrix J = loe::ones_offdiag(l);

  SUBCASE("members of V are fixed") {
    Matrix S = random_matrix(l, l, 11);
    S = ((S + S.transpose()) / 2.0).eval();
    S -= loe::sigma_offdiag(S) * J;  // now <S, J> = 0
    const Matrix P = loe::project_onto_V(S);
    CHECK((P - S).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("J projects to zero") {
    CHECK(loe::project_onto_V(J).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("matches dense least squares onto a basis of V") {
    for (std::uint64_t seed = 12; seed < 15; ++seed) {
      const Matrix X = random_matrix(l, l, seed);
      const Matrix P = loe::project_onto_V(X);
      const Matrix Q = refs::project_v_by_basis(X);
      CHECK((P - Q).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  SUBCASE("output lies in V; projection is idempotent") {
    const Matrix X = random_matrix(l, l, 15);
    const Matrix P = loe::project_onto_V(X);
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(P.cwiseProduct(J).sum()) <= 1e-10);
    CHECK((loe::project_onto_V(P) - P).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("sigma_offdiag is the mean off-diagonal entry") {
  const Matrix X = random_matrix(5, 5, 16);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) sum += X(i, j);
  CHECK(loe::sigma_offdiag(X) == doctest::Approx(sum / 20.0).epsilon(1e-12));
}

TEST_CASE("center_columns: fixed point, constant row, distance invariance") {
  SUBCASE("already-centered input is unchanged") {
    Matrix X = random_matrix(2, 6, 17);
    X = loe::center_columns(X);
    CHECK((loe::center_columns(X) - X).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(loe::is_centered(X));
  }

  SUBCASE("constant row goes to zero") {
    Matrix X(1, 2);
    X << 1.0, 1.0;
    CHECK(loe::center_columns(X).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("squared distances unchanged by centering") {
    const Matrix X = random_matrix(3, 7, 18);
    const Matrix D0 = loe::squared_distance_matrix(X).get();
    const Matrix D1 =
        loe::squared_distance_matrix(loe::center_columns(X)).get();
    CHECK((D0 - D1).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("ones_offdiag and centering_matrix have the textbook shapes") {
  const Matrix J = loe::ones_offdiag(4);
  CHECK(J.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(J.sum() == doctest::Approx(12.0));

  const Matrix H = loe::centering_matrix(4);
  CHECK((H * Matrix::Ones(4, 1)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((H * H - H).cwiseAbs().maxCoeff() <= 1e-15);
}
