#pragma once

#include "loe/rng.hpp"
#include "loe/types.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

/// Triplet comparison oracles: the simulated noisy BTL oracle over a latent
/// configuration, the label-flip oracle used by the clustering experiments,
/// a permuted view used for landmark relabeling, and a loader for recorded
/// comparison datasets.
namespace loe {

/// Comparison noise link f: +1 is returned with probability f(D_ij - D_ik).
/// Both links satisfy f(0) = 1/2 and f(-t) = 1 - f(t).
enum class Link { logistic, probit };

/// f(t) for the given link: logistic 1/(1+e^-t) or probit (normal CDF).
double link_prob(Link link, double t);

/// Query interface for triplet comparisons.
///
/// Randomness is counter-based: the answer to a query is a pure function of
/// (oracle seed, query ordinal).  Sequential callers use compare(), which
/// consumes ordinals atomically; parallel callers reserve() a block of
/// ordinals up front and call compare_at(), which keeps runs reproducible
/// for any thread count as long as ordinal ranges are disjoint.
class TripletOracle {
 public:
  virtual ~TripletOracle() = default;

  /// Answer the query at an explicit ordinal; increments query_count.
  virtual int compare_at(const Triplet& t, std::uint64_t ordinal) = 0;
  /// Reserve `count` consecutive ordinals; returns the base ordinal.
  virtual std::uint64_t reserve(std::uint64_t count) = 0;
  /// Total comparisons served so far.
  virtual std::uint64_t query_count() const = 0;
  /// Number of items the oracle compares.
  virtual int n_items() const = 0;

  /// Answer the query at the next free ordinal.
  int compare(const Triplet& t) { return compare_at(t, reserve(1)); }
};

/// Common machinery for simulated oracles over a latent configuration:
/// ground-truth squared distances (held as points and derived per query to
/// avoid n x n storage, or as an explicit desk-scale matrix) plus the
/// counter-based noise stream and the atomic query accounting.
class SimulatedTripletOracle : public TripletOracle {
 public:
  /// Oracle over a latent point configuration X (d x n).
  SimulatedTripletOracle(Matrix points, std::uint64_t seed);
  /// Oracle over an explicit squared distance matrix (desk scale).
  SimulatedTripletOracle(SquaredDistanceMatrix d, std::uint64_t seed);

  int compare_at(const Triplet& t, std::uint64_t ordinal) final;
  std::uint64_t reserve(std::uint64_t count) final { return next_.fetch_add(count); }
  std::uint64_t query_count() const final { return served_.load(); }
  int n_items() const final { return n_; }

 protected:
  /// Label for the query given its distance difference D_ij - D_ik and the
  /// uniform noise stream at `ordinal`.
  virtual int label(double diff, std::uint64_t ordinal) const = 0;

  const rng::Stream& noise() const { return noise_; }

 private:
  double sqdist(int a, int b) const;

  Matrix points_;               // d x n latent configuration (lazy mode)
  SquaredDistanceMatrix dist_;  // explicit distances (desk-scale mode)
  bool lazy_ = true;
  int n_ = 0;
  rng::Stream noise_;
  std::atomic<std::uint64_t> next_{0};
  std::atomic<std::uint64_t> served_{0};
};

/// Noisy BTL oracle: returns +1 with probability f(D_ij - D_ik).
class BtlTripletOracle : public SimulatedTripletOracle {
 public:
  BtlTripletOracle(Matrix points, std::uint64_t seed,
                   Link link = Link::logistic)
      : SimulatedTripletOracle(std::move(points), seed), link_(link) {}
  BtlTripletOracle(SquaredDistanceMatrix d, std::uint64_t seed,
                   Link link = Link::logistic)
      : SimulatedTripletOracle(std::move(d), seed), link_(link) {}

  Link link() const { return link_; }

 protected:
  int label(double diff, std::uint64_t ordinal) const override;

 private:
  Link link_;
};

/// Exact comparator whose answer is flipped independently with probability
/// flip_prob (the clustering experiments' noise model, distinct from BTL).
class FlipTripletOracle : public SimulatedTripletOracle {
 public:
  FlipTripletOracle(Matrix points, std::uint64_t seed, double flip_prob)
      : SimulatedTripletOracle(std::move(points), seed),
        flip_prob_(flip_prob) {}
  FlipTripletOracle(SquaredDistanceMatrix d, std::uint64_t seed,
                    double flip_prob)
      : SimulatedTripletOracle(std::move(d), seed), flip_prob_(flip_prob) {}

  double flip_prob() const { return flip_prob_; }

 protected:
  int label(double diff, std::uint64_t ordinal) const override;

 private:
  double flip_prob_;
};

/// View of a base oracle under an item relabeling: query index a here is
/// item perm[a] of the base oracle.  Query accounting stays with the base.
class PermutedTripletOracle : public TripletOracle {
 public:
  PermutedTripletOracle(TripletOracle& base, std::vector<int> perm);

  int compare_at(const Triplet& t, std::uint64_t ordinal) override;
  std::uint64_t reserve(std::uint64_t count) override { return base_->reserve(count); }
  std::uint64_t query_count() const override { return base_->query_count(); }
  int n_items() const override { return static_cast<int>(perm_.size()); }

 private:
  TripletOracle* base_;
  std::vector<int> perm_;
};

/// The landmark's pairwise oracle O_i: compares items of [n] \ {i} by their
/// distance to item i.  Pairs use column-local 0-based indices over n-1
/// items; the image triplet re-inserts the landmark's offset.
class ColumnOracle {
 public:
  ColumnOracle(TripletOracle& base, int landmark);

  /// The base-oracle triplet behind the column pair (j, k), j < k.
  Triplet map_pair(int j, int k) const;

  int compare(int j, int k) { return base_->compare(map_pair(j, k)); }
  int compare_at(int j, int k, std::uint64_t ordinal) {
    return base_->compare_at(map_pair(j, k), ordinal);
  }

  int landmark() const { return landmark_; }
  /// Items in the column problem: n - 1.
  int n_items() const { return base_->n_items() - 1; }
  TripletOracle& base() { return *base_; }

 private:
  TripletOracle* base_;
  int landmark_;
};

/// m i.i.d. uniform draws (with replacement across draws) from the
/// unordered pairs over [0, n_items); deterministic in the stream.
std::vector<std::pair<int, int>> sample_uniform_pairs(int n_items,
                                                      std::uint64_t m,
                                                      const rng::Stream& stream);

/// Recorded comparisons loaded from a triplet file; serves as ground truth
/// for embedding recorded datasets rather than answering arbitrary queries.
class DatasetOracle {
 public:
  DatasetOracle() = default;
  DatasetOracle(std::vector<Comparison> comparisons, int n_items);

  const std::vector<Comparison>& comparisons() const { return comparisons_; }
  std::size_t size() const { return comparisons_.size(); }
  int n_items() const { return n_items_; }

  /// Column-local pairwise records for one landmark: every recorded triplet
  /// with head == landmark, with body items mapped to [0, n-2].
  std::vector<Comparison> for_landmark(int landmark) const;

 private:
  std::vector<Comparison> comparisons_;
  int n_items_ = 0;
};

/// Reads a UTF-8 CSV of `i,j,k,label` rows (1-based indices, label one of
/// +1/-1/1/-1), transparently gunzipping if needed.  Parse failures and
/// triplet-invariant violations raise ParseError naming the line.
DatasetOracle load_triplet_file(const std::string& path);

}  // namespace loe
