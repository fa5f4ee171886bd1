#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

/// Counter-based random streams.
///
/// Every random value the library draws is a pure function of
/// (seed, stream tag, ordinal).  This buys two properties that stateful
/// generators cannot offer together:
///   - bit-reproducibility of experiments regardless of thread count, as
///     long as workers consume disjoint ordinal ranges, and
///   - cheap independent substreams (landmark selection, oracle noise,
///     optimizer init, ...) without bookkeeping shared state.
///
/// The per-ordinal hash is the splitmix64 finalizer over an additive
/// golden-ratio orbit, i.e. exactly the splitmix64 sequence started at a
/// derived base point.
namespace loe::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer: a high-quality 64-bit mixing permutation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// FNV-1a hash of a short string tag, used to derive named substreams.
inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// A stateless random stream: value(ordinal) is a pure function, so any
/// number of threads may read any ordinals concurrently.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix64(seed + kGolden) ^ mix64(stream * 0xD1342543DE82EF95ull +
                                            0x2545F4914F6CDD1Dull)) {}

  /// Independent named substream (e.g. sub("labels"), sub("init")).
  Stream sub(std::string_view tag) const {
    return Stream(base_, hash_tag(tag));
  }
  /// Independent indexed substream (e.g. one per landmark column).
  Stream sub(std::uint64_t index) const {
    return Stream(base_, 0x9E6C63D0876A9A35ull + index);
  }

  /// Raw 64 random bits at the given ordinal.
  std::uint64_t bits(std::uint64_t ordinal) const {
    return mix64(base_ + (ordinal + 1) * kGolden);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double u01(std::uint64_t ordinal) const {
    return static_cast<double>(bits(ordinal) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) via multiply-shift (no modulo bias worth
  /// worrying about at n << 2^64; bounded rejection is not needed here).
  std::uint64_t uniform_int(std::uint64_t ordinal, std::uint64_t n) const {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(bits(ordinal)) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  /// Standard normal via Box-Muller; consumes ordinals 2k and 2k+1 of this
  /// stream, so keep normal-drawing streams separate from uniform users.
  double normal(std::uint64_t ordinal) const {
    // u in (0, 1] so the log is finite.
    const double u =
        (static_cast<double>(bits(2 * ordinal) >> 11) + 1.0) * 0x1.0p-53;
    const double v = u01(2 * ordinal + 1);
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::uint64_t base_;
};

/// First k entries of a seeded uniform permutation of [0, n): Fisher-Yates
/// on an index array, reading successive ordinals of `stream`.
inline std::vector<int> sample_without_replacement(int n, int k,
                                                   const Stream& stream) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const auto span = static_cast<std::uint64_t>(n - i);
    const int j =
        i + static_cast<int>(stream.uniform_int(static_cast<std::uint64_t>(i),
                                                span));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace loe::rng
