#include "tlx/scoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"

namespace tlx {
namespace {

using testkit::dim;
using testkit::kWorkedRank;
using testkit::kWorkedRatings;
using testkit::kWorkedWeights;
using testkit::to_choices;

ScoringErrc errc_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ScoringError& e) {
    return e.errc();
  }
  ADD_FAILURE() << "expected ScoringError";
  return ScoringErrc::InvalidWeights;
}

TEST(Dimensions, CanonicalOrderAndAnchors) {
  EXPECT_EQ(dimension_key(Dimension::MentalDemand), "mental");
  EXPECT_EQ(dimension_key(Dimension::Frustration), "frustration");
  EXPECT_EQ(dimension_info(Dimension::Performance).low_anchor, "Good");
  EXPECT_EQ(dimension_info(Dimension::Performance).high_anchor, "Poor");
  EXPECT_EQ(dimension_info(Dimension::Effort).low_anchor, "Low");
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    EXPECT_EQ(index_of(kAllDimensions[i]), i);
    EXPECT_EQ(dimension_from_key(dimension_key(kAllDimensions[i])), kAllDimensions[i]);
  }
  EXPECT_FALSE(dimension_from_key("Mental").has_value());
}

TEST(AllPairs, FifteenLexicographicPairs) {
  const auto& pairs = all_pairs();
  ASSERT_EQ(pairs.size(), 15u);
  EXPECT_EQ(pairs.front(), (DimensionPair{Dimension::MentalDemand, Dimension::PhysicalDemand}));
  EXPECT_EQ(pairs.back(), (DimensionPair{Dimension::Effort, Dimension::Frustration}));
  EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end()));
  EXPECT_EQ(std::set<DimensionPair>(pairs.begin(), pairs.end()).size(), 15u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_NE(pairs[i].a, pairs[i].b);
    EXPECT_EQ(pairs[i].index(), i);
  }
  EXPECT_EQ(all_pairs(), pairs);
}

TEST(DimensionPairTest, CanonicalizesAndRejectsSelfPair) {
  EXPECT_EQ(DimensionPair::of(Dimension::Effort, Dimension::MentalDemand),
            (DimensionPair{Dimension::MentalDemand, Dimension::Effort}));
  EXPECT_EQ(errc_of([] { DimensionPair::of(Dimension::Effort, Dimension::Effort); }),
            ScoringErrc::SameDimensionPair);
}

TEST(Schedule, DeterministicPermutationOfAllPairs) {
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 42ull, 0xFFFFFFFFFFFFFFFFull}) {
    const auto s = comparison_schedule(seed);
    EXPECT_EQ(s.seed, seed);
    EXPECT_EQ(s, comparison_schedule(seed));
    std::vector<DimensionPair> pairs;
    for (const auto& item : s.items) pairs.push_back(item.pair);
    std::sort(pairs.begin(), pairs.end());
    EXPECT_EQ(pairs, all_pairs());
  }
}

TEST(Schedule, SeedsOneAndTwo) {
  // No distinctness claim for a specific pair of seeds; both must be valid.
  const auto one = comparison_schedule(1);
  const auto two = comparison_schedule(2);
  EXPECT_EQ(one.items.size(), 15u);
  EXPECT_EQ(two.items.size(), 15u);
}

TEST(Schedule, FrozenSequenceForSeedOne) {
  // Guards cross-platform reproducibility: mt19937_64 output is standardized.
  const auto s = comparison_schedule(1);
  std::mt19937_64 rng(1);
  std::vector<int> order(15);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 14; i > 0; --i) {
    const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    std::swap(order[i], order[x % bound]);
  }
  for (int i = 0; i < 15; ++i) {
    EXPECT_EQ(s.items[i].pair, all_pairs()[order[i]]);
    EXPECT_EQ(s.items[i].side_flip, (rng() & 1) != 0);
  }
}

TEST(Schedule, SideFlipsVaryAcrossSeeds) {
  int flips = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& item : comparison_schedule(seed).items) flips += item.side_flip;
  }
  EXPECT_GT(flips, 500);
  EXPECT_LT(flips, 1000);
}

TEST(ValidateRatings, BoundariesAndErrors) {
  EXPECT_NO_THROW(RatingSheet::from_values({0, 0, 0, 0, 0, 0}));
  EXPECT_NO_THROW(RatingSheet::from_values({100, 100, 100, 100, 100, 100}));
  EXPECT_EQ(errc_of([] { RatingSheet::from_values({101, 0, 0, 0, 0, 0}); }), ScoringErrc::OutOfRange);
  EXPECT_EQ(errc_of([] { RatingSheet::from_values({0, 0, 0, 0, 0, -1}); }), ScoringErrc::OutOfRange);

  std::vector<RatingEntry> missing;
  for (int i = 0; i < 5; ++i) missing.push_back({dim(i), 50});
  try {
    validate_ratings(missing);
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.errc(), ScoringErrc::MissingDimension);
    EXPECT_NE(std::string(e.what()).find("frustration"), std::string::npos);
  }

  auto dup = missing;
  dup.push_back({Dimension::MentalDemand, 10});
  EXPECT_EQ(errc_of([&] { validate_ratings(dup); }), ScoringErrc::DuplicateDimension);

  // Any integer is accepted; step size is a presentation concern.
  const auto sheet = RatingSheet::from_values({1, 2, 3, 97, 98, 99});
  EXPECT_EQ(sheet[Dimension::Performance], 97);
}

TEST(DeriveWeights, TransitiveTournamentGivesScoreSequence) {
  const auto w = derive_weights(to_choices(testkit::ranked_tournament({0, 1, 2, 3, 4, 5})));
  EXPECT_EQ(w.values().values(), (std::array<int, 6>{5, 4, 3, 2, 1, 0}));
}

TEST(DeriveWeights, WorkedExample) {
  const auto w = derive_weights(to_choices(testkit::ranked_tournament(kWorkedRank)));
  EXPECT_EQ(w.values().values(), kWorkedWeights);
}

TEST(DeriveWeights, RejectsMalformedSets) {
  auto choices = to_choices(testkit::ranked_tournament(kWorkedRank));

  auto duplicate = choices;
  duplicate.push_back({DimensionPair::of(Dimension::MentalDemand, Dimension::Effort), Dimension::Effort});
  EXPECT_EQ(errc_of([&] { derive_weights(duplicate); }), ScoringErrc::DuplicatePair);

  auto short_set = choices;
  short_set.pop_back();
  EXPECT_EQ(errc_of([&] { derive_weights(short_set); }), ScoringErrc::MissingPair);

  auto invalid = choices;
  for (Dimension d : kAllDimensions) {
    if (!invalid[0].pair.contains(d)) {
      invalid[0].chosen = d;
      break;
    }
  }
  EXPECT_EQ(errc_of([&] { derive_weights(invalid); }), ScoringErrc::InvalidChoice);

  EXPECT_EQ(errc_of([] { derive_weights(std::vector<ComparisonChoice>{}); }), ScoringErrc::MissingPair);
}

TEST(DeriveWeights, CanonicalizesSubmittedPairsButKeepsOrder) {
  auto raw = testkit::ranked_tournament(kWorkedRank);
  std::reverse(raw.begin(), raw.end());
  for (auto& c : raw) std::swap(c[0], c[1]);
  const auto set = ComparisonSet::validate(to_choices(raw));
  ASSERT_EQ(set.choices().size(), 15u);
  EXPECT_EQ(set.choices().front().pair, (DimensionPair{Dimension::Effort, Dimension::Frustration}));
  for (const auto& c : set.choices()) EXPECT_LT(c.pair.a, c.pair.b);
}

TEST(DeriveWeights, RandomTournamentsMatchTallyOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto raw = testkit::random_tournament(rng);
    const auto w = derive_weights(to_choices(raw));
    EXPECT_EQ(w.values().values(), testkit::tally_oracle(raw));
    EXPECT_EQ(std::accumulate(w.values().begin(), w.values().end(), 0), 15);
    for (int x : w.values()) {
      EXPECT_GE(x, 0);
      EXPECT_LE(x, 5);
    }
  }
}

TEST(WeightVectorTest, EnforcesInvariants) {
  EXPECT_NO_THROW(WeightVector::from_values({5, 4, 3, 2, 1, 0}));
  EXPECT_NO_THROW(WeightVector::from_values({3, 3, 3, 2, 2, 2}));  // ties are legal
  EXPECT_EQ(errc_of([] { WeightVector::from_values({6, 4, 3, 2, 0, 0}); }), ScoringErrc::InvalidWeights);
  EXPECT_EQ(errc_of([] { WeightVector::from_values({5, 4, 3, 2, 1, 1}); }), ScoringErrc::InvalidWeights);
}

TEST(WeightedWorkload, WorkedExample) {
  const auto sheet = RatingSheet::from_values(kWorkedRatings);
  const auto weights = WeightVector::from_values(kWorkedWeights);
  EXPECT_DOUBLE_EQ(weighted_workload(sheet, weights), 875.0 / 15.0);
  EXPECT_NEAR(weighted_workload(sheet, weights), 58.3333333333, 1e-9);
}

TEST(WeightedWorkload, ConstantAndZeroRatings) {
  const auto weights = WeightVector::from_values({1, 4, 0, 5, 2, 3});
  EXPECT_EQ(weighted_workload(RatingSheet::from_values({50, 50, 50, 50, 50, 50}), weights), 50.0);
  EXPECT_EQ(weighted_workload(RatingSheet::from_values({0, 0, 0, 0, 0, 0}), weights), 0.0);
}

TEST(WeightedWorkload, InvariantUnderConsistentRelabeling) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ratings = testkit::random_ratings(rng);
    const auto weights = testkit::tally_oracle(testkit::random_tournament(rng));
    std::array<int, 6> perm = {0, 1, 2, 3, 4, 5};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::array<int, 6> r2{}, w2{};
    for (int i = 0; i < 6; ++i) {
      r2[perm[i]] = ratings[i];
      w2[perm[i]] = weights[i];
    }
    EXPECT_EQ(weighted_workload(RatingSheet::from_values(ratings), WeightVector::from_values(weights)),
              weighted_workload(RatingSheet::from_values(r2), WeightVector::from_values(w2)));
  }
}

TEST(WeightedWorkload, MonotoneInEachRating) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    auto ratings = testkit::random_ratings(rng);
    const auto weights = WeightVector::from_values(testkit::tally_oracle(testkit::random_tournament(rng)));
    const int d = static_cast<int>(rng() % 6);
    if (ratings[d] == 100) ratings[d] = 99;
    const double before = weighted_workload(RatingSheet::from_values(ratings), weights);
    ++ratings[d];
    const double after = weighted_workload(RatingSheet::from_values(ratings), weights);
    if (weights[dim(d)] > 0) {
      EXPECT_GT(after, before);
    } else {
      EXPECT_EQ(after, before);
    }
  }
}

TEST(RawWorkload, Examples) {
  EXPECT_EQ(raw_workload(RatingSheet::from_values({100, 100, 100, 100, 100, 100})), 100.0);
  EXPECT_EQ(raw_workload(RatingSheet::from_values(kWorkedRatings)), 50.0);
  EXPECT_EQ(raw_workload(RatingSheet::from_values({0, 0, 0, 0, 0, 0})), 0.0);
}

TEST(ComputeResult, WorkedExample) {
  const auto result = compute_result(RatingSheet::from_values(kWorkedRatings),
                                     ComparisonSet::validate(to_choices(testkit::ranked_tournament(kWorkedRank))));
  EXPECT_NEAR(result.weighted_score, 58.3333333333, 1e-9);
  EXPECT_EQ(result.raw_score, 50.0);
  EXPECT_EQ(result.adjusted[Dimension::MentalDemand], 165);
  EXPECT_EQ(result.adjusted.values(), (std::array<int, 6>{165, 30, 90, 350, 240, 0}));
}

TEST(ComputeResult, ConstantRatingsWithTransitiveChoices) {
  const auto result = compute_result(RatingSheet::from_values({50, 50, 50, 50, 50, 50}),
                                     ComparisonSet::validate(to_choices(testkit::ranked_tournament({0, 1, 2, 3, 4, 5}))));
  EXPECT_EQ(result.weighted_score, 50.0);
  EXPECT_EQ(result.raw_score, 50.0);
}

TEST(ComputeResult, AdjustedEqualsRatingTimesWeight) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ratings = testkit::random_ratings(rng);
    const auto raw = testkit::random_tournament(rng);
    const auto result = compute_result(RatingSheet::from_values(ratings), ComparisonSet::validate(to_choices(raw)));
    const auto weights = testkit::tally_oracle(raw);
    for (int d = 0; d < 6; ++d) EXPECT_EQ(result.adjusted[dim(d)], ratings[d] * weights[d]);
    EXPECT_GE(result.weighted_score, 0.0);
    EXPECT_LE(result.weighted_score, 100.0);
    EXPECT_EQ(result.weighted_score, testkit::weighted_oracle(ratings, weights));
    EXPECT_EQ(result.raw_score, testkit::raw_oracle(ratings));
  }
}

}  // namespace
}  // namespace tlx
