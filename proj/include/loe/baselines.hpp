#pragma once

#include "loe/kernels.hpp"
#include "loe/lmds.hpp"
#include "loe/oracle.hpp"
#include "loe/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

/// Direct-optimization baselines over the embedding matrix — STE (logistic
/// loss) and GNMDS (hinge loss) in their non-convex form — plus the
/// LOE -> STE warm-start driver.
namespace loe {

/// A batch of labeled triplets over n items.
struct TripletBatch {
  int n_items = 0;
  kernels::TripletRecords records;

  std::size_t size() const { return records.size(); }
  void add(const Comparison& c) {
    c.triplet.validate(n_items);
    records.push_back(c.triplet.i, c.triplet.j, c.triplet.k, c.label);
  }
};

/// One descent trace sample.  Timestamps are wall-clock seconds from the
/// start of the run (metric evaluation time is excluded from the clock);
/// the error field is present when ground truth was supplied.
struct TracePoint {
  double seconds = 0.0;
  double loss = 0.0;
  std::optional<double> error;
};
using DescentTrace = std::vector<TracePoint>;

/// First-order full-batch descent with backtracking line search.  The
/// paper-silent knobs (step schedule, stopping rule) are exposed here and
/// echoed into run metadata: steps double on acceptance and halve on
/// Armijo failure; the run stops after `patience` consecutive relative
/// loss improvements below loss_rtol, or at max_iters.
struct DescentOptions {
  int max_iters = 1000;
  double loss_rtol = 1e-7;
  int patience = 5;
  double armijo = 1e-4;
  std::uint64_t seed = 0;        // cold-start init stream
  double init_stddev = -1.0;     // < 0: (2d)^(-1/4), the generator's scale
  int trace_every = 1;
  const Matrix* ground_truth = nullptr;  // record Procrustes error when set
  std::uint64_t minibatch = 0;   // records per step; 0 = full batch
};

struct DescentResult {
  Matrix X;             // centered final iterate
  DescentTrace trace;
  bool converged = false;
  int iters = 0;
  double final_loss = 0.0;
  std::string stop_reason;
};

/// Minimizes sum_t log(1 + exp(-y_t (D_ij - D_ik))) over X (d x n).
/// `init` is used verbatim when supplied (warm start); otherwise the start
/// is seeded i.i.d. normal at the generator's coordinate scale.
DescentResult ste_nonconvex(const TripletBatch& batch, int d,
                            const Matrix* init = nullptr,
                            const DescentOptions& opts = {});

/// Minimizes the hinge loss sum_t max(0, 1 - y_t (D_ij - D_ik)) over X by
/// subgradient descent with the same schedule.
DescentResult gnmds_nonconvex(const TripletBatch& batch, int d,
                              const Matrix* init = nullptr,
                              const DescentOptions& opts = {});

/// Draws m uniformly random labeled triplets from the oracle (distinct
/// head/pair, uniform over the triplet set), deterministic in `seed`.
TripletBatch sample_triplet_batch(TripletOracle& oracle, std::uint64_t m,
                                  std::uint64_t seed);

struct WarmstartOptions {
  LoeOptions loe;
  DescentOptions descent;
};

struct WarmstartResult {
  Matrix X;              // final embedding (original item order)
  DescentTrace trace;    // spans both stages; stage-1 time included
  LoeResult stage1;
  DescentResult stage2;
  std::uint64_t queries = 0;
};

/// LOE-STE: stage 1 runs LOE on a budget of floor(epsilon * m_total)
/// comparisons; stage 2 runs STE on floor((1-epsilon) * m_total) fresh
/// uniformly sampled triplets, initialized at the LOE output.  Warm-start
/// triplets come from landmark columns, not the uniform distribution STE
/// needs, so they are not reused.
WarmstartResult loe_ste_warmstart(TripletOracle& oracle, int d,
                                  std::uint64_t m_total, double epsilon,
                                  const WarmstartOptions& opts = {});

}  // namespace loe
