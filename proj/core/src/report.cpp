#include "tlx/report.hpp"

#include <algorithm>
#include <cmath>

#include "tlx/decimal.hpp"

namespace tlx {

namespace {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Json stat_json(const SampleStat& s) {
  return {{"mean", s.mean ? Json(round2(*s.mean)) : Json()},
          {"sd", s.sd ? Json(round2(*s.sd)) : Json()}};
}

Json per_dimension_stats_json(const PerDimension<SampleStat>& stats) {
  Json out = Json::object();
  for (Dimension d : kAllDimensions) out[std::string(dimension_key(d))] = stat_json(stats[d]);
  return out;
}

}  // namespace

std::vector<StoredResult> sorted_by_completion(std::span<const StoredResult> results) {
  std::vector<StoredResult> out(results.begin(), results.end());
  std::stable_sort(out.begin(), out.end(), [](const StoredResult& x, const StoredResult& y) {
    if (x.completed_at != y.completed_at) return x.completed_at < y.completed_at;
    return x.participant_id < y.participant_id;
  });
  return out;
}

SampleStat sample_stat(std::vector<double> values) {
  SampleStat stat;
  if (values.empty()) return stat;
  // Fixed accumulation order makes the result independent of input order.
  std::sort(values.begin(), values.end());
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : values) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  stat.mean = mean;
  if (n >= 2) stat.sd = std::sqrt(m2 / static_cast<double>(n - 1));
  return stat;
}

ExperimentSummary summarize(std::span<const StoredResult> results) {
  ExperimentSummary summary;
  summary.n_complete = results.size();

  const auto collect = [&](auto&& extract) {
    std::vector<double> values;
    values.reserve(results.size());
    for (const auto& r : results) values.push_back(static_cast<double>(extract(r)));
    return sample_stat(std::move(values));
  };

  for (Dimension d : kAllDimensions) {
    summary.ratings[d] = collect([d](const StoredResult& r) { return r.result.ratings[d]; });
    summary.weights[d] = collect([d](const StoredResult& r) { return r.result.weights[d]; });
    summary.adjusted[d] = collect([d](const StoredResult& r) { return r.result.adjusted[d]; });
  }
  summary.weighted_score = collect([](const StoredResult& r) { return r.result.weighted_score; });
  summary.raw_score = collect([](const StoredResult& r) { return r.result.raw_score; });
  return summary;
}

Json summary_json(const ExperimentSummary& summary) {
  return {{"n_complete", summary.n_complete},
          {"ratings", per_dimension_stats_json(summary.ratings)},
          {"weights", per_dimension_stats_json(summary.weights)},
          {"adjusted", per_dimension_stats_json(summary.adjusted)},
          {"weighted_score", stat_json(summary.weighted_score)},
          {"raw_score", stat_json(summary.raw_score)}};
}

std::string to_csv(std::span<const StoredResult> results) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : sorted_by_completion(results)) {
    out += csv_field(r.experiment_id);
    out += ',';
    out += csv_field(r.participant_id);
    out += ',';
    out += format_rfc3339(r.completed_at);
    for (const auto* series : {&r.result.ratings.values(), &r.result.weights.values(), &r.result.adjusted}) {
      for (int v : *series) {
        out += ',';
        out += std::to_string(v);
      }
    }
    out += ',';
    out += format_fixed2(r.result.weighted_score);
    out += ',';
    out += format_fixed2(r.result.raw_score);
    out += '\n';
  }
  return out;
}

std::string to_json(const ExperimentRecord& experiment, std::span<const StoredResult> results) {
  Json rows = Json::array();
  for (const auto& r : sorted_by_completion(results)) rows.push_back(stored_result_json(r));
  const Json doc = {{"format_version", kExportFormatVersion},
                    {"experiment", experiment_json(experiment)},
                    {"results", std::move(rows)}};
  return doc.dump(2) + "\n";
}

}  // namespace tlx
