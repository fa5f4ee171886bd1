#include "loe/ranking.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace loe {

MleResult regularized_btl_mle(const ComparisonSet& omega, double lambda,
                              const MleOptions& opts) {
  if (lambda <= 0.0)
    throw DimensionError("regularized_btl_mle: lambda must be positive");
  const int n = omega.n_items;
  for (std::size_t r = 0; r < omega.records.size(); ++r) {
    const int j = omega.records.j[r], k = omega.records.k[r];
    if (j < 0 || k < 0 || j >= n || k >= n || j == k)
      throw DimensionError("regularized_btl_mle: record indices out of range");
  }

  kernels::Workspace ws;
  Vector theta = opts.init != nullptr ? *opts.init : Vector::Zero(n);
  if (theta.size() != n)
    throw DimensionError("regularized_btl_mle: init has wrong length");

  Vector grad(n), theta_next(n), grad_next(n);
  double nll = kernels::btl_nll_grad(omega.records, theta, lambda, grad, ws);

  MleResult out;
  out.converged = false;

  // Barzilai-Borwein steps keep the iteration first-order (one gradient per
  // accepted step) while adapting to the curvature spread between the data
  // term and the ridge term.  The safeguard is the non-monotone (GLL)
  // backtracking rule — sufficient decrease against the worst of the last
  // few values, not the current one — because BB steps deliberately
  // overshoot, and forcing monotone descent stalls them just above any
  // tight gradient tolerance.
  constexpr int kMemory = 10;
  std::array<double, kMemory> recent;
  recent.fill(nll);
  double step = 1.0 / std::max(lambda, 1.0);
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) <= opts.tol) {
      out.converged = true;
      break;
    }

    const double f_ref = *std::max_element(recent.begin(), recent.end());
    double trial = step;
    double nll_next = 0.0;
    for (int halved = 0;; ++halved) {
      theta_next = theta - trial * grad;
      nll_next =
          kernels::btl_nll_grad(omega.records, theta_next, lambda, grad_next, ws);
      if (nll_next <= f_ref - 1e-4 * trial * gnorm2) break;
      trial *= 0.5;
      if (halved >= 60) break;  // step underflow: accept and let tol decide
    }
    recent[static_cast<std::size_t>(it % kMemory)] = nll_next;

    // BB1 step from the accepted move.
    const Vector s = theta_next - theta;
    const Vector y = grad_next - grad;
    const double sy = s.dot(y);
    step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12)
                    : 2.0 * trial;

    theta.swap(theta_next);
    grad.swap(grad_next);
    nll = nll_next;
  }

  out.iters = it;
  out.grad_norm = grad.norm();
  out.nll = nll;
  theta.array() -= theta.mean();  // identifiability: sum(theta) = 0
  out.theta = std::move(theta);
  return out;
}

double default_lambda(int n_items, std::uint64_t m, double c_lambda) {
  if (n_items < 2 || m < 1)
    throw DimensionError("default_lambda: need n_items >= 2 and m >= 1");
  const double n = static_cast<double>(n_items);
  return c_lambda * std::sqrt(n * n * n * std::log(n) /
                              static_cast<double>(m));
}

RankingResult rank_landmark_columns(TripletOracle& oracle, int l,
                                    std::uint64_t m_total,
                                    const RankingOptions& opts) {
  const int n = oracle.n_items();
  if (l < 2 || l > n)
    throw DimensionError("rank_landmark_columns: need 2 <= l <= n");

  RankingResult out;
  out.m_per_column = m_total / static_cast<std::uint64_t>(l);
  const std::uint64_t m_col = out.m_per_column;
  if (m_col == 0)
    throw DimensionError("rank_landmark_columns: budget below one "
                         "comparison per column");
  const double threshold =
      static_cast<double>(n - 1) * std::log(static_cast<double>(n - 1));
  out.budget_warning = static_cast<double>(m_col) < threshold;
  out.lambda = default_lambda(n - 1, m_col, opts.c_lambda);

  out.R.resize(n - 1, l);
  out.columns.resize(static_cast<std::size_t>(l));
  const std::uint64_t base = oracle.reserve(m_col * static_cast<std::uint64_t>(l));
  const rng::Stream pair_stream =
      rng::Stream(opts.seed, rng::hash_tag("ranking-pairs"));

  const auto solve_column = [&](int i) {
    ColumnOracle column(oracle, i);
    ComparisonSet omega;
    omega.n_items = n - 1;
    omega.records.j.reserve(m_col);
    omega.records.k.reserve(m_col);
    omega.records.y.reserve(m_col);
    const rng::Stream pairs = pair_stream.sub(static_cast<std::uint64_t>(i));
    const std::uint64_t col_base =
        base + static_cast<std::uint64_t>(i) * m_col;
    for (std::uint64_t t = 0; t < m_col; ++t) {
      const int a = static_cast<int>(
          pairs.uniform_int(2 * t, static_cast<std::uint64_t>(n - 1)));
      int b = static_cast<int>(
          pairs.uniform_int(2 * t + 1, static_cast<std::uint64_t>(n - 2)));
      if (b >= a) ++b;
      const int j = std::min(a, b), k = std::max(a, b);
      omega.records.push_back(j, k, column.compare_at(j, k, col_base + t));
    }
    MleResult fit = regularized_btl_mle(omega, out.lambda, opts.mle);
    out.R.col(i) = fit.theta;
    fit.theta.resize(0);
    out.columns[static_cast<std::size_t>(i)] = std::move(fit);
  };

  if (opts.parallel_columns) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int i = 0; i < l; ++i) solve_column(i);
  } else {
    for (int i = 0; i < l; ++i) solve_column(i);
  }

  out.queries = m_col * static_cast<std::uint64_t>(l);
  out.all_converged = std::all_of(out.columns.begin(), out.columns.end(),
                                  [](const MleResult& r) { return r.converged; });
  return out;
}

}  // namespace loe
