#include "loe/kernels.hpp"
#include "loe/rng.hpp"
#include "loe/types.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

// Head-to-head benchmark of the OpenMP kernels against their serial
// reference twins, including the bitwise-agreement check the parallel
// design promises (chunked partials, serial chunk-ordered reduction).

namespace {

using Clock = std::chrono::steady_clock;

double time_repeated(int reps, const std::function<void()>& fn) {
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernelbench: serial vs OpenMP kernel comparison"};
  int n = 4000, d = 2, reps = 5;
  std::uint64_t m = 2000000, seed = 1;
  app.add_option("--n", n, "items");
  app.add_option("--d", d, "dimension");
  app.add_option("--m", m, "records per kernel");
  app.add_option("--reps", reps, "timing repetitions");
  app.add_option("--seed", seed, "rng seed");
  CLI11_PARSE(app, argc, argv);

  const loe::rng::Stream stream(seed, loe::rng::hash_tag("kernelbench"));

  // Synthetic inputs: random scores/points and uniform random records.
  loe::Vector theta(n);
  for (int i = 0; i < n; ++i) theta(i) = stream.sub("theta").normal(i);
  loe::Matrix X(d, n);
  for (int i = 0; i < d * n; ++i) X(i % d, i / d) = stream.sub("X").normal(i);

  loe::kernels::PairRecords pairs;
  const auto pair_stream = stream.sub("pairs");
  for (std::uint64_t t = 0; t < m; ++t) {
    const int j = static_cast<int>(pair_stream.uniform_int(3 * t, n));
    int k = static_cast<int>(pair_stream.uniform_int(3 * t + 1, n - 1));
    if (k >= j) ++k;
    pairs.push_back(j, k, pair_stream.u01(3 * t + 2) < 0.5 ? 1 : -1);
  }

  loe::kernels::TripletRecords triplets;
  const auto trip_stream = stream.sub("triplets");
  for (std::uint64_t t = 0; t < m; ++t) {
    const int i = static_cast<int>(trip_stream.uniform_int(4 * t, n));
    int j = static_cast<int>(trip_stream.uniform_int(4 * t + 1, n - 1));
    if (j >= i) ++j;
    int k = static_cast<int>(trip_stream.uniform_int(4 * t + 2, n - 2));
    const int lo = std::min(i, j), hi = std::max(i, j);
    if (k >= lo) ++k;
    if (k >= hi) ++k;
    triplets.push_back(i, j, k, trip_stream.u01(4 * t + 3) < 0.5 ? 1 : -1);
  }

  std::printf("kernelbench: n=%d d=%d m=%llu reps=%d  (OpenMP %s, %d threads)\n",
              n, d, static_cast<unsigned long long>(m), reps,
              loe::kernels::openmp_enabled() ? "on" : "off",
              loe::kernels::max_threads());

  bool all_bitwise = true;
  loe::kernels::Workspace ws;

  {
    loe::Vector g_par, g_ser;
    double v_par = 0.0, v_ser = 0.0;
    const double t_par = time_repeated(reps, [&] {
      v_par = loe::kernels::btl_nll_grad(pairs, theta, 0.5, g_par, ws);
    });
    const double t_ser = time_repeated(reps, [&] {
      v_ser = loe::kernels::serial::btl_nll_grad(pairs, theta, 0.5, g_ser);
    });
    const bool bitwise = v_par == v_ser && (g_par.array() == g_ser.array()).all();
    all_bitwise = all_bitwise && bitwise;
    std::printf("  btl_nll_grad      serial %8.4fs   openmp %8.4fs   "
                "speedup %5.2fx   bitwise %s\n",
                t_ser, t_par, t_ser / t_par, bitwise ? "yes" : "NO");
  }

  for (const auto loss : {loe::kernels::TripletLoss::logistic,
                          loe::kernels::TripletLoss::hinge}) {
    loe::Matrix g_par, g_ser;
    double v_par = 0.0, v_ser = 0.0;
    const double t_par = time_repeated(reps, [&] {
      v_par = loe::kernels::triplet_nll_grad(triplets, X, loss, g_par, ws);
    });
    const double t_ser = time_repeated(reps, [&] {
      v_ser = loe::kernels::serial::triplet_nll_grad(triplets, X, loss, g_ser);
    });
    const bool bitwise = v_par == v_ser && (g_par.array() == g_ser.array()).all();
    all_bitwise = all_bitwise && bitwise;
    std::printf("  triplet_%-9s serial %8.4fs   openmp %8.4fs   "
                "speedup %5.2fx   bitwise %s\n",
                loss == loe::kernels::TripletLoss::logistic ? "logistic"
                                                            : "hinge",
                t_ser, t_par, t_ser / t_par, bitwise ? "yes" : "NO");
  }

  {
    std::uint64_t c_par = 0, c_ser = 0;
    loe::Matrix Y = X;
    Y.array() += 0.01;
    const double t_par = time_repeated(reps, [&] {
      c_par = loe::kernels::prediction_disagreements(X, Y, m, seed);
    });
    const double t_ser = time_repeated(reps, [&] {
      c_ser = loe::kernels::serial::prediction_disagreements(X, Y, m, seed);
    });
    const bool bitwise = c_par == c_ser;
    all_bitwise = all_bitwise && bitwise;
    std::printf("  disagreements     serial %8.4fs   openmp %8.4fs   "
                "speedup %5.2fx   bitwise %s\n",
                t_ser, t_par, t_ser / t_par, bitwise ? "yes" : "NO");
  }

  std::printf("agreement: %s\n", all_bitwise ? "bitwise identical" : "MISMATCH");
  return all_bitwise ? 0 : 1;
}
