#include "loe/kernels.hpp"

#include "loe/rng.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loe::kernels {

namespace {

/// log(1 + exp(-t)) without overflow for any t.
inline double log1pexp_neg(double t) {
  return t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

/// d/dt log(1 + exp(-t)) = -1 / (1 + exp(t)).
inline double dlogistic(double t) {
  return t >= 0.0 ? -std::exp(-t) / (1.0 + std::exp(-t))
                  : -1.0 / (1.0 + std::exp(t));
}

/// Loss value and derivative at t = y * (distance difference).  The hinge
/// subgradient at the kink t == 1 is taken as 0.
inline double loss_value(TripletLoss loss, double t) {
  return loss == TripletLoss::logistic ? log1pexp_neg(t)
                                       : (t < 1.0 ? 1.0 - t : 0.0);
}
inline double loss_slope(TripletLoss loss, double t) {
  return loss == TripletLoss::logistic ? dlogistic(t) : (t < 1.0 ? -1.0 : 0.0);
}

inline double triplet_diff(const Matrix& X, int i, int j, int k) {
  return (X.col(i) - X.col(j)).squaredNorm() -
         (X.col(i) - X.col(k)).squaredNorm();
}

/// Uniform triplet from T (head + unordered distinct pair avoiding it),
/// reading ordinals 3t..3t+2.
inline Triplet sample_triplet(const rng::Stream& stream, std::uint64_t t,
                              int n) {
  const int i = static_cast<int>(
      stream.uniform_int(3 * t, static_cast<std::uint64_t>(n)));
  int j = static_cast<int>(
      stream.uniform_int(3 * t + 1, static_cast<std::uint64_t>(n - 1)));
  if (j >= i) ++j;
  int k = static_cast<int>(
      stream.uniform_int(3 * t + 2, static_cast<std::uint64_t>(n - 2)));
  const int lo = std::min(i, j), hi = std::max(i, j);
  if (k >= lo) ++k;
  if (k >= hi) ++k;
  return Triplet{i, j, k};
}

inline int sign3(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

inline bool disagrees(const Matrix& X_true, const Matrix& X_hat,
                      const Triplet& t) {
  return sign3(triplet_diff(X_true, t.i, t.j, t.k)) !=
         sign3(triplet_diff(X_hat, t.i, t.j, t.k));
}

}  // namespace

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double btl_nll_grad(const PairRecords& records, const Vector& theta,
                    double lambda, Vector& grad, Workspace& ws) {
  const std::size_t m = records.size();
  const std::size_t n_chunks = (m + kChunk - 1) / kChunk;
  ws.coeff.resize(m);
  ws.partial.assign(n_chunks, 0.0);

  // Pass 1 (parallel): per-record slope coefficients, per-chunk losses.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(m, lo + kChunk);
    double acc = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      const double y = records.y[r];
      const double t = y * (theta(records.j[r]) - theta(records.k[r]));
      acc += log1pexp_neg(t);
      ws.coeff[r] = y * dlogistic(t);
    }
    ws.partial[c] = acc;
  }

  // Pass 2 (serial): chunk-ordered loss reduction and gradient scatter.
  double loss = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) loss += ws.partial[c];
  grad = lambda * theta;
  for (std::size_t r = 0; r < m; ++r) {
    grad(records.j[r]) += ws.coeff[r];
    grad(records.k[r]) -= ws.coeff[r];
  }
  return loss + 0.5 * lambda * theta.squaredNorm();
}

double triplet_nll_grad(const TripletRecords& records, const Matrix& X,
                        TripletLoss loss_kind, Matrix& grad, Workspace& ws) {
  const std::size_t m = records.size();
  const std::size_t n_chunks = (m + kChunk - 1) / kChunk;
  ws.coeff.resize(m);
  ws.partial.assign(n_chunks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(m, lo + kChunk);
    double acc = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      const double y = records.y[r];
      const double t =
          y * triplet_diff(X, records.i[r], records.j[r], records.k[r]);
      acc += loss_value(loss_kind, t);
      ws.coeff[r] = y * loss_slope(loss_kind, t);
    }
    ws.partial[c] = acc;
  }

  double loss = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) loss += ws.partial[c];
  grad.resize(X.rows(), X.cols());
  grad.setZero();
  for (std::size_t r = 0; r < m; ++r) {
    const double u = ws.coeff[r];
    if (u == 0.0) continue;  // satisfied hinge margins scatter nothing
    const int i = records.i[r], j = records.j[r], k = records.k[r];
    grad.col(i) += 2.0 * u * (X.col(k) - X.col(j));
    grad.col(j) -= 2.0 * u * (X.col(i) - X.col(j));
    grad.col(k) += 2.0 * u * (X.col(i) - X.col(k));
  }
  return loss;
}

double triplet_nll(const TripletRecords& records, const Matrix& X,
                   TripletLoss loss_kind, Workspace& ws) {
  const std::size_t m = records.size();
  const std::size_t n_chunks = (m + kChunk - 1) / kChunk;
  ws.partial.assign(n_chunks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(m, lo + kChunk);
    double acc = 0.0;
    for (std::size_t r = lo; r < hi; ++r) {
      const double y = records.y[r];
      acc += loss_value(
          loss_kind,
          y * triplet_diff(X, records.i[r], records.j[r], records.k[r]));
    }
    ws.partial[c] = acc;
  }

  double loss = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) loss += ws.partial[c];
  return loss;
}

std::uint64_t prediction_disagreements(const Matrix& X_true,
                                       const Matrix& X_hat, std::uint64_t m,
                                       std::uint64_t seed) {
  const int n = static_cast<int>(X_true.cols());
  const rng::Stream stream(seed, rng::hash_tag("prediction"));
  const std::uint64_t n_chunks = (m + kChunk - 1) / kChunk;
  std::uint64_t count = 0;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : count)
#endif
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(m, lo + kChunk);
    std::uint64_t acc = 0;
    for (std::uint64_t t = lo; t < hi; ++t)
      acc += disagrees(X_true, X_hat, sample_triplet(stream, t, n)) ? 1 : 0;
    count += acc;
  }
  return count;
}

namespace serial {

double btl_nll_grad(const PairRecords& records, const Vector& theta,
                    double lambda, Vector& grad) {
  grad = lambda * theta;
  double loss = 0.5 * lambda * theta.squaredNorm();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const double y = records.y[r];
    const double t = y * (theta(records.j[r]) - theta(records.k[r]));
    loss += log1pexp_neg(t);
    const double c = y * dlogistic(t);
    grad(records.j[r]) += c;
    grad(records.k[r]) -= c;
  }
  return loss;
}

double triplet_nll_grad(const TripletRecords& records, const Matrix& X,
                        TripletLoss loss_kind, Matrix& grad) {
  grad.resize(X.rows(), X.cols());
  grad.setZero();
  double loss = 0.0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const double y = records.y[r];
    const int i = records.i[r], j = records.j[r], k = records.k[r];
    const double t = y * triplet_diff(X, i, j, k);
    loss += loss_value(loss_kind, t);
    const double u = y * loss_slope(loss_kind, t);
    if (u == 0.0) continue;
    grad.col(i) += 2.0 * u * (X.col(k) - X.col(j));
    grad.col(j) -= 2.0 * u * (X.col(i) - X.col(j));
    grad.col(k) += 2.0 * u * (X.col(i) - X.col(k));
  }
  return loss;
}

double triplet_nll(const TripletRecords& records, const Matrix& X,
                   TripletLoss loss_kind) {
  double loss = 0.0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const double y = records.y[r];
    loss += loss_value(
        loss_kind,
        y * triplet_diff(X, records.i[r], records.j[r], records.k[r]));
  }
  return loss;
}

std::uint64_t prediction_disagreements(const Matrix& X_true,
                                       const Matrix& X_hat, std::uint64_t m,
                                       std::uint64_t seed) {
  const int n = static_cast<int>(X_true.cols());
  const rng::Stream stream(seed, rng::hash_tag("prediction"));
  std::uint64_t count = 0;
  for (std::uint64_t t = 0; t < m; ++t)
    count += disagrees(X_true, X_hat, sample_triplet(stream, t, n)) ? 1 : 0;
  return count;
}

}  // namespace serial
}  // namespace loe::kernels
