#include "tlx/json_codec.hpp"

#include <algorithm>
#include <limits>

#include "tlx/decimal.hpp"

namespace tlx {

namespace {

Dimension dimension_field(const nlohmann::json& body, const char* name) {
  if (!body.contains(name) || !body.at(name).is_string()) {
    throw CodecError(std::string("expected string field '") + name + "'");
  }
  const auto key = body.at(name).get<std::string>();
  const auto d = dimension_from_key(key);
  if (!d) throw CodecError("unknown dimension '" + key + "'");
  return *d;
}

int integer_value(const nlohmann::json& v, std::string_view what) {
  if (!v.is_number_integer()) throw CodecError(std::string(what) + " must be an integer");
  if (v.is_number_unsigned()) {
    return static_cast<int>(std::min<std::uint64_t>(v.get<std::uint64_t>(),
                                                    std::numeric_limits<int>::max()));
  }
  const auto raw = v.get<std::int64_t>();
  return static_cast<int>(std::clamp<std::int64_t>(raw, std::numeric_limits<int>::min(),
                                                   std::numeric_limits<int>::max()));
}

const nlohmann::json& field(const nlohmann::json& body, const char* name) {
  if (!body.is_object() || !body.contains(name)) {
    throw CodecError(std::string("missing field '") + name + "'");
  }
  return body.at(name);
}

std::string string_field(const nlohmann::json& body, const char* name) {
  const auto& v = field(body, name);
  if (!v.is_string()) throw CodecError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Json per_dimension_json(const PerDimension<int>& values) {
  Json out = Json::object();
  for (Dimension d : kAllDimensions) out[std::string(dimension_key(d))] = values[d];
  return out;
}

Json ratings_json(const RatingSheet& sheet) { return per_dimension_json(sheet.values()); }

Json comparisons_json(const ComparisonSet& set) {
  Json out = Json::array();
  for (const auto& c : set.choices()) {
    out.push_back({{"a", dimension_key(c.pair.a)},
                   {"b", dimension_key(c.pair.b)},
                   {"chosen", dimension_key(c.chosen)}});
  }
  return out;
}

Json workload_result_json(const WorkloadResult& result) {
  return {{"ratings", ratings_json(result.ratings)},
          {"weights", per_dimension_json(result.weights.values())},
          {"adjusted", per_dimension_json(result.adjusted)},
          {"weighted_score", round2(result.weighted_score)},
          {"raw_score", round2(result.raw_score)}};
}

Json stored_result_json(const StoredResult& stored) {
  return {{"participant_id", stored.participant_id},
          {"completed_at", format_rfc3339(stored.completed_at)},
          {"ratings", ratings_json(stored.ratings)},
          {"comparisons", comparisons_json(stored.comparisons)},
          {"weights", per_dimension_json(stored.result.weights.values())},
          {"adjusted", per_dimension_json(stored.result.adjusted)},
          {"weighted_score", round2(stored.result.weighted_score)},
          {"raw_score", round2(stored.result.raw_score)}};
}

Json experiment_json(const ExperimentRecord& record) {
  return {{"experiment_id", record.experiment_id},
          {"name", record.name},
          {"created_at", format_rfc3339(record.created_at)},
          {"join_code", record.join_code},
          {"status", to_string(record.status)}};
}

Json participant_json(const ParticipantRecord& record) {
  Json out = {{"participant_id", record.participant_id},
              {"experiment_id", record.experiment_id},
              {"state", to_string(record.state)},
              {"created_at", format_rfc3339(record.created_at)}};
  out["completed_at"] = record.completed_at ? Json(format_rfc3339(*record.completed_at)) : Json();
  return out;
}

Json schedule_json(const ComparisonSchedule& schedule) {
  Json items = Json::array();
  for (const auto& item : schedule.items) {
    const Dimension left = item.side_flip ? item.pair.b : item.pair.a;
    const Dimension right = item.side_flip ? item.pair.a : item.pair.b;
    items.push_back({{"a", dimension_key(item.pair.a)},
                     {"b", dimension_key(item.pair.b)},
                     {"side_flip", item.side_flip},
                     {"left", dimension_key(left)},
                     {"right", dimension_key(right)}});
  }
  return {{"seed", std::to_string(schedule.seed)}, {"items", std::move(items)}};
}

Json dimensions_json() {
  Json out = Json::array();
  for (Dimension d : kAllDimensions) {
    const auto& info = dimension_info(d);
    out.push_back({{"key", info.key},
                   {"title", info.title},
                   {"description", info.description},
                   {"low_anchor", info.low_anchor},
                   {"high_anchor", info.high_anchor}});
  }
  return out;
}

std::vector<RatingEntry> parse_rating_entries(const nlohmann::json& body) {
  std::vector<RatingEntry> entries;
  if (body.is_object()) {
    for (const auto& [key, value] : body.items()) {
      const auto d = dimension_from_key(key);
      if (!d) throw CodecError("unknown dimension '" + key + "'");
      entries.push_back({*d, integer_value(value, "rating")});
    }
  } else if (body.is_array()) {
    for (const auto& item : body) {
      if (!item.is_object()) throw CodecError("rating entries must be objects");
      entries.push_back({dimension_field(item, "dimension"), integer_value(field(item, "value"), "rating")});
    }
  } else {
    throw CodecError("ratings must be an object or an array");
  }
  return entries;
}

std::vector<ComparisonChoice> parse_choices(const nlohmann::json& body) {
  if (!body.is_array()) throw CodecError("choices must be an array");
  std::vector<ComparisonChoice> choices;
  choices.reserve(body.size());
  for (const auto& item : body) {
    if (!item.is_object()) throw CodecError("choice entries must be objects");
    const auto a = dimension_field(item, "a");
    const auto b = dimension_field(item, "b");
    const auto chosen = dimension_field(item, "chosen");
    choices.push_back({DimensionPair::of(a, b), chosen});
  }
  return choices;
}

PerDimension<int> parse_per_dimension(const nlohmann::json& body) {
  if (!body.is_object() || body.size() != kDimensionCount) {
    throw CodecError("expected an object with the six dimension keys");
  }
  PerDimension<int> out;
  for (Dimension d : kAllDimensions) {
    out[d] = integer_value(field(body, std::string(dimension_key(d)).c_str()), "value");
  }
  return out;
}

ExperimentRecord parse_experiment(const nlohmann::json& body) {
  ExperimentRecord record;
  record.experiment_id = string_field(body, "experiment_id");
  record.name = string_field(body, "name");
  record.join_code = string_field(body, "join_code");
  try {
    record.created_at = parse_rfc3339(string_field(body, "created_at"));
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
  const auto status = experiment_status_from_string(string_field(body, "status"));
  if (!status) throw CodecError("unknown experiment status");
  record.status = *status;
  return record;
}

StoredResult parse_stored_result(const nlohmann::json& body, const std::string& experiment_id) {
  const auto sheet = validate_ratings(parse_rating_entries(field(body, "ratings")));
  const auto set = ComparisonSet::validate(parse_choices(field(body, "comparisons")));
  const auto result = compute_result(sheet, set);

  if (parse_per_dimension(field(body, "weights")) != result.weights.values() ||
      parse_per_dimension(field(body, "adjusted")) != result.adjusted) {
    throw CodecError("stored tallies do not match the recorded comparisons");
  }
  const auto& weighted = field(body, "weighted_score");
  const auto& raw = field(body, "raw_score");
  if (!weighted.is_number() || !raw.is_number() ||
      weighted.get<double>() != round2(result.weighted_score) ||
      raw.get<double>() != round2(result.raw_score)) {
    throw CodecError("stored scores do not match the recorded inputs");
  }

  Timestamp completed_at;
  try {
    completed_at = parse_rfc3339(string_field(body, "completed_at"));
  } catch (const std::invalid_argument& e) {
    throw CodecError(e.what());
  }
  return {experiment_id, string_field(body, "participant_id"), sheet, set, result, completed_at};
}

}  // namespace tlx
