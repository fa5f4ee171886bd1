#include "loe/oracle.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string_view>
#include <utility>

namespace loe {

double link_prob(Link link, double t) {
  switch (link) {
    case Link::logistic:
      // Guarded form: never exponentiates a large positive argument.
      return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                      : std::exp(t) / (1.0 + std::exp(t));
    case Link::probit:
      return 0.5 * std::erfc(-t / std::sqrt(2.0));
  }
  return 0.5;
}

SimulatedTripletOracle::SimulatedTripletOracle(Matrix points,
                                               std::uint64_t seed)
    : points_(std::move(points)),
      lazy_(true),
      n_(static_cast<int>(points_.cols())),
      noise_(seed, rng::hash_tag("oracle")) {}

SimulatedTripletOracle::SimulatedTripletOracle(SquaredDistanceMatrix d,
                                               std::uint64_t seed)
    : dist_(std::move(d)),
      lazy_(false),
      n_(static_cast<int>(dist_.n())),
      noise_(seed, rng::hash_tag("oracle")) {}

double SimulatedTripletOracle::sqdist(int a, int b) const {
  return lazy_ ? (points_.col(a) - points_.col(b)).squaredNorm()
               : dist_(a, b);
}

int SimulatedTripletOracle::compare_at(const Triplet& t,
                                       std::uint64_t ordinal) {
  t.validate(n_);
  served_.fetch_add(1, std::memory_order_relaxed);
  return label(sqdist(t.i, t.j) - sqdist(t.i, t.k), ordinal);
}

int BtlTripletOracle::label(double diff, std::uint64_t ordinal) const {
  return noise().u01(ordinal) < link_prob(link_, diff) ? +1 : -1;
}

int FlipTripletOracle::label(double diff, std::uint64_t ordinal) const {
  const int exact = diff > 0.0 ? +1 : -1;
  return noise().u01(ordinal) < flip_prob_ ? -exact : exact;
}

PermutedTripletOracle::PermutedTripletOracle(TripletOracle& base,
                                             std::vector<int> perm)
    : base_(&base), perm_(std::move(perm)) {
  if (static_cast<int>(perm_.size()) > base.n_items())
    throw DimensionError("permutation longer than the base oracle's items");
}

int PermutedTripletOracle::compare_at(const Triplet& t,
                                      std::uint64_t ordinal) {
  t.validate(n_items());
  const Triplet mapped{perm_[static_cast<std::size_t>(t.i)],
                       perm_[static_cast<std::size_t>(t.j)],
                       perm_[static_cast<std::size_t>(t.k)]};
  return base_->compare_at(mapped, ordinal);
}

ColumnOracle::ColumnOracle(TripletOracle& base, int landmark)
    : base_(&base), landmark_(landmark) {
  if (landmark < 0 || landmark >= base.n_items())
    throw DimensionError("landmark index out of range");
}

Triplet ColumnOracle::map_pair(int j, int k) const {
  if (!(0 <= j && j < k && k < n_items()))
    throw DimensionError("column pair must satisfy 0 <= j < k < n-1");
  // Re-insert the landmark's slot: a -> a + 1{a >= landmark}.
  const int bj = j + (j >= landmark_ ? 1 : 0);
  const int bk = k + (k >= landmark_ ? 1 : 0);
  return Triplet{landmark_, bj, bk};
}

std::vector<std::pair<int, int>> sample_uniform_pairs(
    int n_items, std::uint64_t m, const rng::Stream& stream) {
  if (n_items < 2) throw DimensionError("need at least two items to pair");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(m);
  for (std::uint64_t t = 0; t < m; ++t) {
    const int a = static_cast<int>(
        stream.uniform_int(2 * t, static_cast<std::uint64_t>(n_items)));
    int b = static_cast<int>(stream.uniform_int(
        2 * t + 1, static_cast<std::uint64_t>(n_items - 1)));
    if (b >= a) ++b;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  return pairs;
}

DatasetOracle::DatasetOracle(std::vector<Comparison> comparisons, int n_items)
    : comparisons_(std::move(comparisons)), n_items_(n_items) {
  for (const Comparison& c : comparisons_) c.triplet.validate(n_items_);
}

std::vector<Comparison> DatasetOracle::for_landmark(int landmark) const {
  std::vector<Comparison> out;
  for (const Comparison& c : comparisons_) {
    if (c.triplet.i != landmark) continue;
    // Collapse the landmark's slot: a -> a - 1{a > landmark}.
    const int j = c.triplet.j - (c.triplet.j > landmark ? 1 : 0);
    const int k = c.triplet.k - (c.triplet.k > landmark ? 1 : 0);
    out.push_back(Comparison{Triplet{landmark, j, k}, c.label});
  }
  return out;
}

namespace {

/// Reads a whole file through zlib (gzip files are inflated; plain files
/// pass through unchanged).
std::string read_maybe_gzipped(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw ParseError(path + ": cannot open");
  std::string content;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0)
    content.append(buf, static_cast<std::size_t>(got));
  const bool bad = got < 0;
  gzclose(f);
  if (bad) throw ParseError(path + ": read/decompress error");
  return content;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

long parse_long(std::string_view field, const std::string& path, long line) {
  const std::string text{trim(field)};
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ParseError(path + ":" + std::to_string(line) +
                     ": expected integer, got '" + text + "'");
  return value;
}

}  // namespace

DatasetOracle load_triplet_file(const std::string& path) {
  const std::string content = read_maybe_gzipped(path);
  std::vector<Comparison> comparisons;
  int max_item = 0;

  std::size_t pos = 0;
  long line_no = 0;
  while (pos <= content.size()) {
    const std::size_t eol = content.find('\n', pos);
    const std::size_t end = eol == std::string::npos ? content.size() : eol;
    std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (eol == std::string::npos) break;
      continue;
    }

    std::array<std::string_view, 4> fields;
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = line.find(',', start);
      if (f < 3 && comma == std::string_view::npos)
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": expected 4 comma-separated fields");
      if (f == 3 && comma != std::string_view::npos)
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": expected 4 comma-separated fields");
      fields[static_cast<std::size_t>(f)] =
          line.substr(start, comma - start);
      start = comma + 1;
    }

    const long i = parse_long(fields[0], path, line_no);
    const long j = parse_long(fields[1], path, line_no);
    const long k = parse_long(fields[2], path, line_no);
    const long label = parse_long(fields[3], path, line_no);
    if (i < 1 || j < 1 || k < 1)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": item indices are 1-based and positive");
    if (label != 1 && label != -1)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": label must be +1 or -1");
    const Triplet t{static_cast<int>(i - 1), static_cast<int>(j - 1),
                    static_cast<int>(k - 1)};
    if (t.i == t.j || t.i == t.k || t.j == t.k)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": triplet indices must be distinct");
    max_item = std::max({max_item, t.i + 1, t.j + 1, t.k + 1});
    comparisons.push_back(Comparison{t, static_cast<int>(label)});
    if (eol == std::string::npos) break;
  }
  return DatasetOracle(std::move(comparisons), max_item);
}

}  // namespace loe
