#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlx/json_codec.hpp"
#include "tlx/records.hpp"

namespace tlx {

inline constexpr int kExportFormatVersion = 1;

inline constexpr std::string_view kCsvHeader =
    "experiment_id,participant_id,completed_at,"
    "rating_mental,rating_physical,rating_temporal,rating_performance,rating_effort,"
    "rating_frustration,"
    "weight_mental,weight_physical,weight_temporal,weight_performance,weight_effort,"
    "weight_frustration,"
    "adjusted_mental,adjusted_physical,adjusted_temporal,adjusted_performance,adjusted_effort,"
    "adjusted_frustration,"
    "weighted_score,raw_score";

inline constexpr std::size_t kCsvColumnCount = 23;

struct SampleStat {
  std::optional<double> mean;  // absent when n == 0
  std::optional<double> sd;    // sample (n - 1) SD, absent when n < 2

  friend bool operator==(const SampleStat&, const SampleStat&) = default;
};

struct ExperimentSummary {
  std::size_t n_complete = 0;
  PerDimension<SampleStat> ratings;
  PerDimension<SampleStat> weights;
  PerDimension<SampleStat> adjusted;
  SampleStat weighted_score;
  SampleStat raw_score;

  friend bool operator==(const ExperimentSummary&, const ExperimentSummary&) = default;
};

/// Ordered by completed_at, then participant_id.
std::vector<StoredResult> sorted_by_completion(std::span<const StoredResult> results);

SampleStat sample_stat(std::vector<double> values);

ExperimentSummary summarize(std::span<const StoredResult> results);

Json summary_json(const ExperimentSummary& summary);

/// UTF-8, LF endings, header plus one row per result in completion order.
std::string to_csv(std::span<const StoredResult> results);

/// {format_version, experiment, results: [...]} with two-space indentation and a final newline.
std::string to_json(const ExperimentRecord& experiment, std::span<const StoredResult> results);

}  // namespace tlx
