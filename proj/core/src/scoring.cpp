#include "tlx/scoring.hpp"

#include <algorithm>
#include <bitset>
#include <random>
#include <string>

namespace tlx {

namespace {

std::string pair_name(const DimensionPair& p) {
  return "(" + std::string(dimension_key(p.a)) + ", " + std::string(dimension_key(p.b)) + ")";
}

std::vector<DimensionPair> enumerate_pairs() {
  std::vector<DimensionPair> pairs;
  pairs.reserve(kPairCount);
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    for (std::size_t j = i + 1; j < kDimensionCount; ++j) {
      pairs.push_back({kAllDimensions[i], kAllDimensions[j]});
    }
  }
  return pairs;
}

// Uniform draw in [0, bound) by rejection; unlike uniform_int_distribution the
// sequence is identical on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::string_view error_code(ScoringErrc errc) noexcept {
  switch (errc) {
    case ScoringErrc::OutOfRange: return "rating_out_of_range";
    case ScoringErrc::MissingDimension: return "missing_dimension";
    case ScoringErrc::DuplicateDimension: return "duplicate_dimension";
    case ScoringErrc::SameDimensionPair: return "invalid_pair";
    case ScoringErrc::DuplicatePair: return "duplicate_pair";
    case ScoringErrc::MissingPair: return "missing_pair";
    case ScoringErrc::InvalidChoice: return "invalid_choice";
    case ScoringErrc::InvalidWeights: return "invalid_weights";
  }
  return "validation_error";
}

RatingSheet RatingSheet::from_values(const std::array<int, kDimensionCount>& values) {
  std::array<RatingEntry, kDimensionCount> entries{};
  for (std::size_t i = 0; i < kDimensionCount; ++i) entries[i] = {kAllDimensions[i], values[i]};
  return validate_ratings(entries);
}

RatingSheet validate_ratings(std::span<const RatingEntry> entries) {
  std::bitset<kDimensionCount> seen;
  PerDimension<int> ratings;
  for (const auto& e : entries) {
    const std::string key(dimension_key(e.dimension));
    if (seen.test(index_of(e.dimension))) {
      throw ScoringError(ScoringErrc::DuplicateDimension, "duplicate rating for " + key);
    }
    if (e.value < kMinRating || e.value > kMaxRating) {
      throw ScoringError(ScoringErrc::OutOfRange,
                         "rating for " + key + " out of range [0, 100]: " + std::to_string(e.value));
    }
    seen.set(index_of(e.dimension));
    ratings[e.dimension] = e.value;
  }
  for (Dimension d : kAllDimensions) {
    if (!seen.test(index_of(d))) {
      throw ScoringError(ScoringErrc::MissingDimension,
                         "missing rating for " + std::string(dimension_key(d)));
    }
  }
  return RatingSheet(ratings);
}

DimensionPair DimensionPair::of(Dimension x, Dimension y) {
  if (x == y) {
    throw ScoringError(ScoringErrc::SameDimensionPair,
                       "pair must name two different dimensions, got " +
                           std::string(dimension_key(x)) + " twice");
  }
  return x < y ? DimensionPair{x, y} : DimensionPair{y, x};
}

std::size_t DimensionPair::index() const noexcept {
  // Row-major offset into the strict upper triangle of a 6x6 matrix.
  const std::size_t i = index_of(a);
  const std::size_t j = index_of(b);
  return i * kDimensionCount - i * (i + 1) / 2 + (j - i - 1);
}

const std::vector<DimensionPair>& all_pairs() {
  static const std::vector<DimensionPair> pairs = enumerate_pairs();
  return pairs;
}

ComparisonSchedule comparison_schedule(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComparisonSchedule schedule{seed, {}};
  schedule.items.reserve(kPairCount);
  for (const auto& p : all_pairs()) schedule.items.push_back({p, false});
  for (std::size_t i = schedule.items.size() - 1; i > 0; --i) {
    std::swap(schedule.items[i], schedule.items[bounded(rng, i + 1)]);
  }
  for (auto& item : schedule.items) item.side_flip = (rng() & 1U) != 0;
  return schedule;
}

ComparisonSet ComparisonSet::validate(std::vector<ComparisonChoice> choices) {
  std::bitset<kPairCount> seen;
  for (const auto& c : choices) {
    const auto pair = DimensionPair::of(c.pair.a, c.pair.b);
    if (seen.test(pair.index())) {
      throw ScoringError(ScoringErrc::DuplicatePair, "pair " + pair_name(pair) + " appears twice");
    }
    if (!pair.contains(c.chosen)) {
      throw ScoringError(ScoringErrc::InvalidChoice,
                         "choice " + std::string(dimension_key(c.chosen)) + " is not in pair " +
                             pair_name(pair));
    }
    seen.set(pair.index());
  }
  for (const auto& p : all_pairs()) {
    if (!seen.test(p.index())) {
      throw ScoringError(ScoringErrc::MissingPair, "pair " + pair_name(p) + " is missing");
    }
  }
  for (auto& c : choices) c.pair = DimensionPair::of(c.pair.a, c.pair.b);
  return ComparisonSet(std::move(choices));
}

WeightVector WeightVector::from_values(const std::array<int, kDimensionCount>& values) {
  int total = 0;
  for (int w : values) {
    if (w < 0 || w > kMaxWeight) {
      throw ScoringError(ScoringErrc::InvalidWeights, "weight out of range [0, 5]");
    }
    total += w;
  }
  if (total != kWeightTotal) {
    throw ScoringError(ScoringErrc::InvalidWeights,
                       "weights must sum to 15, got " + std::to_string(total));
  }
  return WeightVector(PerDimension<int>(values));
}

WeightVector derive_weights(const ComparisonSet& set) noexcept {
  PerDimension<int> tally;
  for (const auto& c : set.choices()) ++tally[c.chosen];
  // A complete round robin of 6 yields a valid score sequence by construction.
  return WeightVector::from_values(tally.values());
}

WeightVector derive_weights(std::vector<ComparisonChoice> choices) {
  return derive_weights(ComparisonSet::validate(std::move(choices)));
}

double weighted_workload(const RatingSheet& sheet, const WeightVector& weights) noexcept {
  int sum = 0;
  for (Dimension d : kAllDimensions) sum += sheet[d] * weights[d];
  return static_cast<double>(sum) / kWeightTotal;
}

double raw_workload(const RatingSheet& sheet) noexcept {
  int sum = 0;
  for (int r : sheet.values()) sum += r;
  return static_cast<double>(sum) / static_cast<double>(kDimensionCount);
}

WorkloadResult compute_result(const RatingSheet& sheet, const ComparisonSet& set) noexcept {
  const WeightVector weights = derive_weights(set);
  PerDimension<int> adjusted;
  for (Dimension d : kAllDimensions) adjusted[d] = sheet[d] * weights[d];
  return {sheet, weights, adjusted, weighted_workload(sheet, weights), raw_workload(sheet)};
}

}  // namespace tlx
