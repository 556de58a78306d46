#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tlx/dimension.hpp"

namespace tlx {

inline constexpr int kMinRating = 0;
inline constexpr int kMaxRating = 100;
inline constexpr std::size_t kPairCount = 15;  // C(6,2)
inline constexpr int kWeightTotal = 15;
inline constexpr int kMaxWeight = 5;

enum class ScoringErrc {
  OutOfRange,
  MissingDimension,
  DuplicateDimension,
  SameDimensionPair,
  DuplicatePair,
  MissingPair,
  InvalidChoice,
  InvalidWeights,
};

/// Machine-readable code used on the wire, e.g. "rating_out_of_range".
std::string_view error_code(ScoringErrc errc) noexcept;

class ScoringError : public std::runtime_error {
 public:
  ScoringError(ScoringErrc errc, std::string message)
      : std::runtime_error(std::move(message)), errc_(errc) {}

  ScoringErrc errc() const noexcept { return errc_; }

 private:
  ScoringErrc errc_;
};

struct RatingEntry {
  Dimension dimension;
  int value;
};

/// Six validated ratings in [0, 100]. Only obtainable through validation.
class RatingSheet {
 public:
  static RatingSheet from_values(const std::array<int, kDimensionCount>& values);

  int operator[](Dimension d) const noexcept { return ratings_[d]; }
  const PerDimension<int>& values() const noexcept { return ratings_; }

  friend bool operator==(const RatingSheet&, const RatingSheet&) = default;

 private:
  explicit RatingSheet(const PerDimension<int>& r) : ratings_(r) {}
  friend RatingSheet validate_ratings(std::span<const RatingEntry> entries);

  PerDimension<int> ratings_;
};

/// Unordered pair, canonicalized so that a precedes b.
struct DimensionPair {
  Dimension a;
  Dimension b;

  /// Throws ScoringError(SameDimensionPair) when x == y.
  static DimensionPair of(Dimension x, Dimension y);

  bool contains(Dimension d) const noexcept { return d == a || d == b; }
  std::size_t index() const noexcept;  // position in all_pairs()

  friend auto operator<=>(const DimensionPair&, const DimensionPair&) = default;
};

struct ComparisonChoice {
  DimensionPair pair;
  Dimension chosen;

  friend bool operator==(const ComparisonChoice&, const ComparisonChoice&) = default;
};

/// Fifteen choices covering each unordered pair once. Submission order is kept.
class ComparisonSet {
 public:
  /// Throws DuplicatePair, MissingPair or InvalidChoice.
  static ComparisonSet validate(std::vector<ComparisonChoice> choices);

  const std::vector<ComparisonChoice>& choices() const noexcept { return choices_; }

  friend bool operator==(const ComparisonSet&, const ComparisonSet&) = default;

 private:
  explicit ComparisonSet(std::vector<ComparisonChoice> c) : choices_(std::move(c)) {}
  std::vector<ComparisonChoice> choices_;
};

/// Tally of wins per dimension; sums to 15, entries in [0, 5].
class WeightVector {
 public:
  /// Throws InvalidWeights when the invariants do not hold.
  static WeightVector from_values(const std::array<int, kDimensionCount>& values);

  int operator[](Dimension d) const noexcept { return weights_[d]; }
  const PerDimension<int>& values() const noexcept { return weights_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  explicit WeightVector(const PerDimension<int>& w) : weights_(w) {}
  PerDimension<int> weights_;
};

struct WorkloadResult {
  RatingSheet ratings;
  WeightVector weights;
  PerDimension<int> adjusted;
  double weighted_score;
  double raw_score;

  friend bool operator==(const WorkloadResult&, const WorkloadResult&) = default;
};

struct ScheduleItem {
  DimensionPair pair;
  bool side_flip;  // true: present pair.b on the left

  friend bool operator==(const ScheduleItem&, const ScheduleItem&) = default;
};

struct ComparisonSchedule {
  std::uint64_t seed;
  std::vector<ScheduleItem> items;

  friend bool operator==(const ComparisonSchedule&, const ComparisonSchedule&) = default;
};

/// The 15 canonical pairs in lexicographic canonical order.
const std::vector<DimensionPair>& all_pairs();

/// Seeded permutation of all_pairs() with an independent side flip per item.
ComparisonSchedule comparison_schedule(std::uint64_t seed);

RatingSheet validate_ratings(std::span<const RatingEntry> entries);

WeightVector derive_weights(const ComparisonSet& set) noexcept;
WeightVector derive_weights(std::vector<ComparisonChoice> choices);

double weighted_workload(const RatingSheet& sheet, const WeightVector& weights) noexcept;
double raw_workload(const RatingSheet& sheet) noexcept;

WorkloadResult compute_result(const RatingSheet& sheet, const ComparisonSet& set) noexcept;

}  // namespace tlx
