#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tlx/records.hpp"
#include "tlx/scoring.hpp"

namespace tlx {

using Json = nlohmann::ordered_json;

/// Malformed wire payload (wrong JSON shape, unknown dimension key, non-integer rating).
class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json per_dimension_json(const PerDimension<int>& values);
Json ratings_json(const RatingSheet& sheet);
Json comparisons_json(const ComparisonSet& set);
Json workload_result_json(const WorkloadResult& result);
Json stored_result_json(const StoredResult& stored);
Json experiment_json(const ExperimentRecord& record);
Json participant_json(const ParticipantRecord& record);  // never includes the session token
Json schedule_json(const ComparisonSchedule& schedule);
Json dimensions_json();

// Accepts {"mental": 55, ...} or [{"dimension": "mental", "value": 55}, ...].
// Only the array form can carry a duplicate, which validate_ratings then rejects.
std::vector<RatingEntry> parse_rating_entries(const nlohmann::json& body);

// [{"a": "mental", "b": "physical", "chosen": "mental"}, ...]
std::vector<ComparisonChoice> parse_choices(const nlohmann::json& body);

PerDimension<int> parse_per_dimension(const nlohmann::json& body);

ExperimentRecord parse_experiment(const nlohmann::json& body);

/// Recomputes the result from ratings and comparisons and rejects the record
/// if the serialized scores or tallies disagree.
StoredResult parse_stored_result(const nlohmann::json& body, const std::string& experiment_id);

}  // namespace tlx
