#pragma once

#include "loe/types.hpp"

#include <cstdint>
#include <vector>

/// Synthetic point configurations for experiments, plus exact-ranking
/// injection for noiseless pipeline checks.
namespace loe {

/// n i.i.d. points with coordinate variance 1/sqrt(2d) (the benchmark
/// generator's scale), centered.  `scale` multiplies the coordinates, for
/// configs that deliberately shrink or grow the diameter.
Matrix generate_normal_config(int n, int d, std::uint64_t seed,
                              double scale = 1.0);

/// n i.i.d. points with U(0,1) coordinates, centered.
Matrix generate_uniform_config(int n, int d, std::uint64_t seed);

struct ClusteredConfig {
  Matrix X;                 // d x n, centered
  std::vector<int> labels;  // class of each point, balanced within +-1
};

/// k unit-variance Gaussian blobs whose closest pair of centers sits
/// exactly `separation` apart (separation 0 collapses all centers).
/// Labels are assigned round-robin, so class sizes differ by at most one.
ClusteredConfig generate_clustered_config(int n, int d, int k,
                                          double separation,
                                          std::uint64_t seed);

/// Exact centered ranking columns for landmarks 0..l-1 of D: column c,
/// row a holds D(a + [a >= c], c) minus the column mean — what a perfect
/// ranking stage would output.  For noiseless-injection tests.
Matrix exact_rankings(const SquaredDistanceMatrix& D, int l);

}  // namespace loe
