// Acceptance gate: one self-contained check per numbered criterion, each
// printing exactly one PASS/FAIL line with its measured quantities and
// runtime.  Run a single criterion with `acceptance --criterion N` (what the
// registered ctest entries do) or everything with no arguments.

#include "loe/baselines.hpp"
#include "loe/core.hpp"
#include "loe/eval.hpp"
#include "loe/harness.hpp"
#include "loe/kernels.hpp"
#include "loe/landmark.hpp"
#include "loe/lmds.hpp"
#include "loe/oracle.hpp"
#include "loe/ranking.hpp"
#include "loe/rng.hpp"
#include "loe/synthetic.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using loe::Matrix;
using loe::Vector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Matrix random_config(int d, int n, std::uint64_t seed) {
  const loe::rng::Stream s(seed, loe::rng::hash_tag("acceptance"));
  Matrix X(d, n);
  std::uint64_t t = 0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < d; ++r) X(r, c) = s.normal(t++);
  return X;
}

/// Per-column means of the off-diagonal entries of a landmark EDM.
Vector column_shifts(const Matrix& E) {
  const int l = static_cast<int>(E.cols());
  Vector s(l);
  for (int j = 0; j < l; ++j) s(j) = (E.col(j).sum() - E(j, j)) / (l - 1);
  return s;
}

/// Elapsed seconds of the first trace sample whose recorded error reaches
/// `target`, if any.
std::optional<double> first_crossing(const loe::DescentTrace& trace,
                                     double target) {
  for (const loe::TracePoint& point : trace)
    if (point.error && *point.error <= target) return point.seconds;
  return std::nullopt;
}

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// 1. Exact noiseless pipeline recovery (n=60, d=2, l=5, injected rankings)
// ---------------------------------------------------------------------------
Outcome criterion_1() {
  const int n = 60, d = 2, l = 5;
  const Matrix X = loe::generate_normal_config(n, d, 1);
  const Matrix R = loe::exact_rankings(loe::squared_distance_matrix(X), l);
  const Matrix X_hat = loe::embed_from_rankings(R, l, d);
  const double err = loe::procrustes_distance(X, X_hat);
  return {err <= 1e-6, "procrustes error " + fmt(err, "%.3e") +
                           " (threshold 1e-6) with exact rankings injected"};
}

// ---------------------------------------------------------------------------
// 2. Shift identity: lambda_2 of the centered landmark matrix equals the
//    mean off-diagonal of E* for l = d + 3, d in {2, 3, 4}
// ---------------------------------------------------------------------------
Outcome criterion_2() {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 3;
    const int l = d + 3;
    const Matrix X = random_config(d, l, 100 + static_cast<std::uint64_t>(trial));
    const Matrix E = loe::squared_distance_matrix(X).get();
    const Vector s_star = column_shifts(E);
    const double sigma_e = loe::sigma_offdiag(E);
    const Matrix W = loe::shift_columns(E, -s_star);
    const Vector sigma_star = s_star - Vector::Constant(l, sigma_e);
    worst = std::max(worst,
                     std::abs(loe::estimate_sigma_e(W, sigma_star) - sigma_e));
  }
  return {worst <= 1e-8, "max |lambda_2 - sigma_E| = " + fmt(worst, "%.3e") +
                             " over 100 configurations (threshold 1e-8)"};
}

// ---------------------------------------------------------------------------
// 3. Statistical consistency: mean Procrustes error strictly decreasing in
//    c over {10, 50, 100, 200, 400}, with err(400) <= err(10) / 3
// ---------------------------------------------------------------------------
Outcome criterion_3() {
  namespace fs = std::filesystem;
  loe::ExperimentConfig config = loe::preset("consistency");
  const fs::path out = fs::temp_directory_path() / "loe-acceptance-consistency";
  fs::remove_all(out);
  config.out = out.string();

  const loe::ExperimentReport report = loe::run_experiment(config);
  if (!report.all_ok) return {false, "at least one run failed"};

  std::map<double, std::pair<double, int>> cells;  // c -> (sum error, count)
  for (const loe::RunRecord& run : report.runs) {
    cells[run.c].first += run.metrics.procrustes;
    cells[run.c].second += 1;
  }

  std::string detail = "mean procrustes by c:";
  std::vector<double> means;
  for (const auto& [c, cell] : cells) {
    means.push_back(cell.first / cell.second);
    detail += " " + fmt(c, "%g") + ":" + fmt(means.back());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i)
    decreasing = decreasing && means[i] < means[i - 1];
  const double ratio = means.back() / means.front();
  detail += "; err(400)/err(10) = " + fmt(ratio) + " (need <= 1/3" +
            std::string(decreasing ? ", trend strictly decreasing)"
                                   : ", trend NOT monotone)");
  fs::remove_all(out);
  return {decreasing && ratio <= 1.0 / 3.0, detail};
}

// ---------------------------------------------------------------------------
// 4. Ranking rate: quadrupling the per-column budget halves the worst-case
//    column error (mean ratio over 10 seeds in [0.4, 0.65]) at n = 50
// ---------------------------------------------------------------------------
Outcome criterion_4() {
  const int n = 50, l = 5;
  const std::vector<int> landmarks = {0, 1, 2, 3, 4};
  const auto m_col = static_cast<std::uint64_t>(
      200.0 * n * std::log(static_cast<double>(n)));

  double sum_ratio = 0.0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    const Matrix X = loe::generate_normal_config(
        n, 2, static_cast<std::uint64_t>(seed), 0.5);
    const auto D = loe::squared_distance_matrix(X);

    loe::RankingOptions opts;
    opts.seed = static_cast<std::uint64_t>(seed);
    loe::BtlTripletOracle coarse_oracle(X, static_cast<std::uint64_t>(seed));
    loe::BtlTripletOracle fine_oracle(X, static_cast<std::uint64_t>(seed) + 1000);
    const auto coarse =
        loe::rank_landmark_columns(coarse_oracle, l, l * m_col, opts);
    const auto fine =
        loe::rank_landmark_columns(fine_oracle, l, 4 * l * m_col, opts);

    sum_ratio += loe::ranking_error_diagnostic(fine.R, D, landmarks) /
                 loe::ranking_error_diagnostic(coarse.R, D, landmarks);
  }
  const double mean_ratio = sum_ratio / seeds;
  return {mean_ratio >= 0.4 && mean_ratio <= 0.65,
          "mean error ratio at 4x budget = " + fmt(mean_ratio) +
              " over 10 seeds (need within [0.4, 0.65])"};
}

// ---------------------------------------------------------------------------
// 5. Computational scaling: log-log slope of LOE wall time over
//    n in {2000, 4000, 8000, 16000} at d = 2, c = 50 within [0.8, 1.3]
// ---------------------------------------------------------------------------
Outcome criterion_5() {
  // One throwaway run first so thread pools and code pages are warm.
  {
    const Matrix X = loe::generate_normal_config(500, 2, 99);
    loe::BtlTripletOracle oracle(X, 99);
    (void)loe::loe(oracle, 2, 40000, {});
  }

  std::vector<double> log_n, log_t;
  std::string detail = "seconds by n:";
  for (const int n : {2000, 4000, 8000, 16000}) {
    const Matrix X = loe::generate_normal_config(n, 2, 1);
    loe::BtlTripletOracle oracle(X, 1);
    const auto m = static_cast<std::uint64_t>(
        std::ceil(50.0 * n * std::log(static_cast<double>(n))));
    loe::LoeOptions opts;
    opts.seed = 1;
    const loe::LoeResult result = loe::loe(oracle, 2, m, opts);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_t.push_back(std::log(result.seconds.total));
    detail += " " + std::to_string(n) + ":" + fmt(result.seconds.total, "%.3f");
  }
  const double slope = fitted_slope(log_n, log_t);
  detail += "; log-log slope = " + fmt(slope) + " (need within [0.8, 1.3])";
  return {slope >= 0.8 && slope <= 1.3, detail};
}

// ---------------------------------------------------------------------------
// 6. Speed ordering: LOE finishes before cold STE first reaches LOE's final
//    error (n = 4000, d = 2, c = 200, all of 3 seeds)
// ---------------------------------------------------------------------------
Outcome criterion_6() {
  const int n = 4000, d = 2;
  const auto m = static_cast<std::uint64_t>(
      std::ceil(200.0 * n * std::log(static_cast<double>(n))));

  bool all = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Matrix X = loe::generate_normal_config(n, d, seed);

    loe::BtlTripletOracle loe_oracle(X, seed);
    loe::LoeOptions lopts;
    lopts.seed = seed;
    const loe::LoeResult direct = loe::loe(loe_oracle, d, m, lopts);
    const double t_loe = direct.seconds.total;
    const double err_loe = loe::procrustes_distance(X, direct.X);

    loe::BtlTripletOracle ste_oracle(X, seed);
    const loe::TripletBatch batch = loe::sample_triplet_batch(ste_oracle, m, seed);
    loe::DescentOptions dopts;
    dopts.seed = seed;
    dopts.max_iters = 1200;
    dopts.loss_rtol = 1e-9;
    dopts.patience = 25;
    dopts.ground_truth = &X;
    const loe::DescentResult ste = loe::ste_nonconvex(batch, d, nullptr, dopts);

    const std::optional<double> cross = first_crossing(ste.trace, err_loe);
    // No crossing counts for LOE only if STE had already spent more time.
    const bool seed_pass = cross ? t_loe < *cross
                                 : ste.trace.back().seconds > t_loe;
    all = all && seed_pass;
    detail += std::string(detail.empty() ? "" : "; ") + "seed " +
              std::to_string(seed) + ": loe " + fmt(t_loe, "%.2f") +
              "s @ err " + fmt(err_loe) + ", ste crosses at " +
              (cross ? fmt(*cross, "%.2f") + "s"
                     : "never (ran " + fmt(ste.trace.back().seconds, "%.2f") +
                           "s)");
  }
  return {all, detail};
}

// ---------------------------------------------------------------------------
// 7. Warm start: LOE-STE reaches cold STE's final error in less total time
//    and lands within 15% of it (n = 2000, d = 2, c = 50, eps = 0.3)
// ---------------------------------------------------------------------------
Outcome criterion_7() {
  const int n = 2000, d = 2;
  const double epsilon = 0.3;
  const auto m = static_cast<std::uint64_t>(
      std::ceil(50.0 * n * std::log(static_cast<double>(n))));

  bool all = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Matrix X = loe::generate_normal_config(n, d, seed);

    loe::DescentOptions dopts;
    dopts.seed = seed;
    dopts.max_iters = 800;
    dopts.loss_rtol = 1e-8;
    dopts.patience = 20;
    dopts.ground_truth = &X;

    loe::BtlTripletOracle cold_oracle(X, seed);
    const loe::TripletBatch batch =
        loe::sample_triplet_batch(cold_oracle, m, seed);
    const loe::DescentResult cold = loe::ste_nonconvex(batch, d, nullptr, dopts);
    const double t_cold = cold.trace.back().seconds;
    const double err_cold = *cold.trace.back().error;

    loe::BtlTripletOracle warm_oracle(X, seed);
    loe::WarmstartOptions wopts;
    wopts.loe.seed = seed;
    wopts.descent = dopts;
    const loe::WarmstartResult warm =
        loe::loe_ste_warmstart(warm_oracle, d, m, epsilon, wopts);
    const double err_warm = *warm.trace.back().error;
    const std::optional<double> reach = first_crossing(warm.trace, err_cold);

    const bool time_ok = reach && *reach < t_cold;
    const bool error_ok = err_warm <= 1.15 * err_cold;
    all = all && time_ok && error_ok;
    detail += std::string(detail.empty() ? "" : "; ") + "seed " +
              std::to_string(seed) + ": cold " + fmt(t_cold, "%.2f") +
              "s @ err " + fmt(err_cold) + ", warm reaches it " +
              (reach ? "at " + fmt(*reach, "%.2f") + "s" : "never") +
              ", final err ratio " + fmt(err_warm / err_cold, "%.3f");
  }
  return {all, detail + " (need crossing before cold finish and ratio <= 1.15)"};
}

// ---------------------------------------------------------------------------
// 8. Clustering purity: LOE-STE (eps = 0.5) within 0.05 of STE, both >= 0.9
//    (n = 500, d = 5, 5 clusters, flip 0.15, c = 200)
// ---------------------------------------------------------------------------
Outcome criterion_8() {
  const int n = 500, d = 5, k = 5;
  const auto m = static_cast<std::uint64_t>(
      std::ceil(200.0 * n * std::log(static_cast<double>(n))));

  double purity_ste = 0.0, purity_warm = 0.0;
  const int seeds = 3;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto data = loe::generate_clustered_config(n, d, k, 10.0, seed);

    loe::DescentOptions dopts;
    dopts.seed = seed;

    loe::FlipTripletOracle ste_oracle(data.X, seed, 0.15);
    const loe::TripletBatch batch =
        loe::sample_triplet_batch(ste_oracle, m, seed);
    const loe::DescentResult ste = loe::ste_nonconvex(batch, d, nullptr, dopts);
    purity_ste += loe::kmeans_purity(ste.X, data.labels, k, 5, 100, seed);

    loe::FlipTripletOracle warm_oracle(data.X, seed, 0.15);
    loe::WarmstartOptions wopts;
    wopts.loe.seed = seed;
    wopts.descent = dopts;
    const loe::WarmstartResult warm =
        loe::loe_ste_warmstart(warm_oracle, d, m, 0.5, wopts);
    purity_warm += loe::kmeans_purity(warm.X, data.labels, k, 5, 100, seed);
  }
  purity_ste /= seeds;
  purity_warm /= seeds;

  const bool pass = std::abs(purity_ste - purity_warm) <= 0.05 &&
                    purity_ste >= 0.9 && purity_warm >= 0.9;
  return {pass, "mean purity: ste " + fmt(purity_ste, "%.4f") + ", loe-ste " +
                    fmt(purity_warm, "%.4f") +
                    " (need both >= 0.9 and within 0.05)"};
}

// ---------------------------------------------------------------------------
// 9. Metric/solver property suite against the independent references
// ---------------------------------------------------------------------------
Outcome criterion_9() {
  std::string failures;

  // Procrustes closed form vs 2-d grid search.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Matrix A = random_config(2, 8, seed);
    const Matrix B = random_config(2, 8, seed + 40);
    const double closed = loe::procrustes_distance(A, B);
    const double grid = refs::grid_procrustes_2d(A, B, 1000000);
    if (std::abs(grid - closed) > 1e-4 || grid < closed - 1e-12)
      failures += " procrustes-grid";
  }

  // MLE vs damped-Newton reference.
  {
    Vector theta_star(4);
    theta_star << 1.2, 0.3, -0.5, -1.0;
    const loe::rng::Stream pairs(7, loe::rng::hash_tag("acc-pairs"));
    const loe::rng::Stream labels(7, loe::rng::hash_tag("acc-labels"));
    loe::ComparisonSet omega;
    omega.n_items = 4;
    refs::BtlProblem problem;
    problem.n = 4;
    problem.lambda = 0.2;
    for (std::uint64_t t = 0; t < 200; ++t) {
      const int j = static_cast<int>(pairs.uniform_int(2 * t, 4));
      int k = static_cast<int>(pairs.uniform_int(2 * t + 1, 3));
      if (k >= j) ++k;
      const double p =
          1.0 / (1.0 + std::exp(-(theta_star(j) - theta_star(k))));
      const int y = labels.u01(t) < p ? +1 : -1;
      omega.records.push_back(j, k, y);
      problem.records.push_back({j, k, y});
    }
    loe::MleOptions opts;
    opts.tol = 1e-10;
    const auto fit = loe::regularized_btl_mle(omega, problem.lambda, opts);
    const Vector reference = refs::newton_btl(problem);
    if ((fit.theta - reference).cwiseAbs().maxCoeff() > 1e-6)
      failures += " mle-newton";
  }

  // Analytic triplet gradient vs central finite differences.
  {
    const int d = 2, n = 6;
    const Matrix X = random_config(d, n, 9);
    loe::kernels::TripletRecords records;
    const loe::rng::Stream s(10, loe::rng::hash_tag("acc-triplets"));
    for (std::uint64_t t = 0; t < 150; ++t) {
      const int i = static_cast<int>(s.uniform_int(4 * t, n));
      int j = static_cast<int>(s.uniform_int(4 * t + 1, n - 1));
      if (j >= i) ++j;
      int k = static_cast<int>(s.uniform_int(4 * t + 2, n - 2));
      const int lo = std::min(i, j), hi = std::max(i, j);
      if (k >= lo) ++k;
      if (k >= hi) ++k;
      records.push_back(i, j, k, s.u01(4 * t + 3) < 0.5 ? +1 : -1);
    }
    Matrix grad;
    loe::kernels::Workspace ws;
    loe::kernels::triplet_nll_grad(records, X,
                                   loe::kernels::TripletLoss::logistic, grad,
                                   ws);
    const auto loss_at = [&](const Vector& flat) {
      const Matrix Y = Eigen::Map<const Matrix>(flat.data(), d, n);
      loe::kernels::Workspace w2;
      return loe::kernels::triplet_nll(records, Y,
                                       loe::kernels::TripletLoss::logistic, w2);
    };
    const Vector flat = Eigen::Map<const Vector>(X.data(), d * n);
    const Vector fd = refs::fd_gradient(loss_at, flat);
    const Vector analytic = Eigen::Map<const Vector>(grad.data(), d * n);
    const double rel = (analytic - fd).cwiseAbs().maxCoeff() /
                       std::max(1.0, fd.cwiseAbs().maxCoeff());
    if (rel > 1e-5) failures += " gradient-fd";
  }

  // Shift least squares vs pseudoinverse.
  for (std::uint64_t seed = 11; seed <= 13; ++seed) {
    Matrix W = random_config(6, 6, seed);
    W.diagonal().setZero();
    if ((loe::estimate_centered_shifts(W) - refs::shifts_by_pinv(W))
            .cwiseAbs()
            .maxCoeff() > 1e-10)
      failures += " lsq-pinv";
  }

  // project_onto_V idempotence and project_edm cone membership.
  for (std::uint64_t seed = 14; seed <= 16; ++seed) {
    const Matrix M = random_config(7, 7, seed);
    const Matrix P = loe::project_onto_V(M);
    if ((loe::project_onto_V(P) - P).cwiseAbs().maxCoeff() > 1e-9)
      failures += " pv-idempotence";

    const auto E = loe::project_edm(M);
    const int l = 7;
    const Matrix H = loe::centering_matrix(l);
    const Matrix G = -0.5 * H * E.get() * H;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
    if (eig.eigenvalues().minCoeff() < -1e-9 ||
        E.get().diagonal().cwiseAbs().maxCoeff() != 0.0 ||
        (E.get() - E.get().transpose()).cwiseAbs().maxCoeff() > 1e-12)
      failures += " edm-cone";
  }

  if (failures.empty())
    return {true,
            "procrustes-grid, mle-newton, gradient-fd, lsq-pinv, "
            "pv-idempotence, edm-cone all within tolerance"};
  return {false, "failing checks:" + failures};
}

// ---------------------------------------------------------------------------
// 10. Explicit non-goals: external-dataset timings and published-scale runs
// ---------------------------------------------------------------------------
Outcome criterion_10() {
  return {true,
          "excluded by design: food-dataset wall-clock comparison "
          "(9.8770 +/- 0.2566 s vs 8.0432 +/- 0.1227 s, needs the external "
          "dataset) and n = 10^6 published-scale runs; covered instead by "
          "the scaling slope (criterion 5) and desk-scale speed ordering "
          "(criterion 6)"};
}

Outcome run_criterion(int id) {
  switch (id) {
    case 1: return criterion_1();
    case 2: return criterion_2();
    case 3: return criterion_3();
    case 4: return criterion_4();
    case 5: return criterion_5();
    case 6: return criterion_6();
    case 7: return criterion_7();
    case 8: return criterion_8();
    case 9: return criterion_9();
    case 10: return criterion_10();
    default: return {false, "unknown criterion"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      selected.push_back(std::atoi(argv[++a]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (int id = 1; id <= 10; ++id) selected.push_back(id);

  bool all_pass = true;
  for (const int id : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run_criterion(id);
    } catch (const std::exception& err) {
      outcome = {false, std::string("exception: ") + err.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("criterion %d: %s — %s (runtime %.1f s)\n", id,
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str(),
                seconds);
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
