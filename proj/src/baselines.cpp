#include "loe/baselines.hpp"

#include "loe/core.hpp"
#include "loe/eval.hpp"
#include "loe/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace loe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

Matrix cold_start(int d, int n, const DescentOptions& opts) {
  const double stddev = opts.init_stddev < 0.0 ? std::pow(2.0 * d, -0.25)
                                               : opts.init_stddev;
  const rng::Stream stream(opts.seed, rng::hash_tag("descent-init"));
  Matrix X(d, n);
  std::uint64_t draw = 0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < d; ++r) X(r, c) = stddev * stream.normal(draw++);
  return X;
}

/// Uniform triplet (head + distinct pair), reading ordinals 3t..3t+2.
Triplet sample_triplet(const rng::Stream& stream, std::uint64_t t, int n) {
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

/// Uniform-with-replacement subsample of `count` records, one ordinal each.
kernels::TripletRecords subsample(const kernels::TripletRecords& records,
                                  std::uint64_t count,
                                  const rng::Stream& stream) {
  kernels::TripletRecords out;
  out.i.reserve(count);
  out.j.reserve(count);
  out.k.reserve(count);
  out.y.reserve(count);
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto r =
        static_cast<std::size_t>(stream.uniform_int(t, records.size()));
    out.push_back(records.i[r], records.j[r], records.k[r], records.y[r]);
  }
  return out;
}

DescentResult descend(const TripletBatch& batch, int d, const Matrix* init,
                      const DescentOptions& opts,
                      kernels::TripletLoss loss_kind) {
  if (d < 1) throw DimensionError("descent: dimension must be positive");
  if (batch.n_items < 1)
    throw DimensionError("descent: batch must name its item count");
  const int n = batch.n_items;

  DescentResult out;
  if (init != nullptr) {
    // Warm starts are taken verbatim; the loss is translation invariant and
    // every record's gradient is zero-sum over columns, so iterates keep
    // whatever centering the init had.  The final iterate is centered once.
    if (init->rows() != d || init->cols() != n)
      throw DimensionError("descent: init must be d x n");
    out.X = *init;
  } else {
    out.X = center_columns(cold_start(d, n, opts));
  }
  if (opts.ground_truth != nullptr &&
      (opts.ground_truth->rows() != d || opts.ground_truth->cols() != n))
    throw DimensionError("descent: ground truth must be d x n");

  const bool stochastic =
      opts.minibatch > 0 && opts.minibatch < batch.records.size();
  const rng::Stream batch_stream(opts.seed, rng::hash_tag("minibatch"));

  kernels::Workspace ws;
  Matrix grad;
  Matrix candidate;

  const auto t0 = Clock::now();
  double overhead = 0.0;  // metric / measurement time kept off the clock
  const auto elapsed = [&] {
    return seconds_between(t0, Clock::now()) - overhead;
  };

  // Trace sample at the current iterate.  Full-batch descent already knows
  // the loss; minibatch steps do not, so there the full loss is recomputed
  // as measurement and its cost joins the overhead.
  const auto record = [&](double full_loss) {
    TracePoint point;
    point.seconds = elapsed();
    if (stochastic) {
      const auto m0 = Clock::now();
      full_loss = kernels::triplet_nll(batch.records, out.X, loss_kind, ws);
      overhead += seconds_between(m0, Clock::now());
    }
    point.loss = full_loss;
    if (opts.ground_truth != nullptr) {
      const auto m0 = Clock::now();
      point.error = procrustes_distance(*opts.ground_truth, out.X);
      overhead += seconds_between(m0, Clock::now());
    }
    out.trace.push_back(point);
  };

  double loss =
      kernels::triplet_nll_grad(batch.records, out.X, loss_kind, grad, ws);
  record(loss);

  double step = 1.0 / std::max(1.0, grad.norm());
  int completed = 0;    // accepted steps
  int last_traced = 0;  // `completed` value at the newest trace sample
  int flat_streak = 0;

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    if (stochastic) {
      const auto sub = subsample(
          batch.records, opts.minibatch,
          batch_stream.sub(static_cast<std::uint64_t>(iter)));
      kernels::triplet_nll_grad(sub, out.X, loss_kind, grad, ws);
      out.X -= (step / std::sqrt(static_cast<double>(iter))) * grad;
      completed = iter;
      if (iter % opts.trace_every == 0) {
        record(loss);
        last_traced = completed;
      }
      continue;
    }

    const double grad_sq = grad.squaredNorm();
    if (grad_sq == 0.0) {
      // Stationary exactly (e.g. every hinge margin satisfied).
      out.converged = true;
      out.stop_reason = "zero gradient";
      break;
    }

    // Armijo backtracking on the steepest-descent ray; an accepted step
    // doubles the trial step for the next iteration.
    double trial = step;
    double next_loss = loss;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      candidate = out.X - trial * grad;
      next_loss = kernels::triplet_nll(batch.records, candidate, loss_kind, ws);
      if (next_loss <= loss - opts.armijo * trial * grad_sq) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      out.stop_reason = "line search exhausted";
      break;
    }
    out.X.swap(candidate);
    step = 2.0 * trial;
    completed = iter;

    const double improvement =
        (loss - next_loss) / std::max(std::abs(loss), 1e-12);
    loss = kernels::triplet_nll_grad(batch.records, out.X, loss_kind, grad, ws);
    if (iter % opts.trace_every == 0) {
      record(loss);
      last_traced = completed;
    }

    flat_streak = improvement < opts.loss_rtol ? flat_streak + 1 : 0;
    if (flat_streak >= opts.patience) {
      out.converged = true;
      out.stop_reason = "loss improvement below tolerance";
      break;
    }
  }

  if (out.stop_reason.empty()) out.stop_reason = "iteration limit";
  if (last_traced != completed) record(loss);
  out.iters = completed;
  out.final_loss = out.trace.back().loss;
  out.X = center_columns(out.X);
  return out;
}

}  // namespace

DescentResult ste_nonconvex(const TripletBatch& batch, int d,
                            const Matrix* init, const DescentOptions& opts) {
  return descend(batch, d, init, opts, kernels::TripletLoss::logistic);
}

DescentResult gnmds_nonconvex(const TripletBatch& batch, int d,
                              const Matrix* init, const DescentOptions& opts) {
  return descend(batch, d, init, opts, kernels::TripletLoss::hinge);
}

TripletBatch sample_triplet_batch(TripletOracle& oracle, std::uint64_t m,
                                  std::uint64_t seed) {
  const int n = oracle.n_items();
  if (n < 3)
    throw DimensionError("sample_triplet_batch: need at least 3 items");
  TripletBatch batch;
  batch.n_items = n;
  batch.records.i.reserve(m);
  batch.records.j.reserve(m);
  batch.records.k.reserve(m);
  batch.records.y.reserve(m);
  const rng::Stream stream(seed, rng::hash_tag("triplet-batch"));
  const std::uint64_t base = oracle.reserve(m);
  for (std::uint64_t t = 0; t < m; ++t) {
    const Triplet trip = sample_triplet(stream, t, n);
    batch.records.push_back(trip.i, trip.j, trip.k,
                            oracle.compare_at(trip, base + t));
  }
  return batch;
}

WarmstartResult loe_ste_warmstart(TripletOracle& oracle, int d,
                                  std::uint64_t m_total, double epsilon,
                                  const WarmstartOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("loe_ste_warmstart: epsilon must be in (0, 1)");
  const auto m_stage1 =
      static_cast<std::uint64_t>(epsilon * static_cast<double>(m_total));
  const auto m_stage2 = static_cast<std::uint64_t>(
      (1.0 - epsilon) * static_cast<double>(m_total));

  WarmstartResult out;
  out.stage1 = loe(oracle, d, m_stage1, opts.loe);

  // Landmark-column comparisons are the wrong distribution for STE, so
  // stage 2 labels fresh uniform triplets instead of reusing them.
  const TripletBatch fresh =
      sample_triplet_batch(oracle, m_stage2, opts.loe.seed);
  out.stage2 = ste_nonconvex(fresh, d, &out.stage1.X, opts.descent);

  out.X = out.stage2.X;
  out.queries = out.stage1.queries + m_stage2;
  out.trace = out.stage2.trace;
  for (TracePoint& point : out.trace)
    point.seconds += out.stage1.seconds.total;
  return out;
}

}  // namespace loe
