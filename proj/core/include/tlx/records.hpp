#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tlx/scoring.hpp"
#include "tlx/timestamp.hpp"

namespace tlx {

enum class ExperimentStatus { Open, Closed };

/// Created -> RatingsSubmitted -> Complete, never backwards.
enum class SessionState { Created, RatingsSubmitted, Complete };

std::string_view to_string(ExperimentStatus s) noexcept;
std::string_view to_string(SessionState s) noexcept;
std::optional<ExperimentStatus> experiment_status_from_string(std::string_view s) noexcept;
std::optional<SessionState> session_state_from_string(std::string_view s) noexcept;

struct ExperimentRecord {
  std::string experiment_id;
  std::string name;
  Timestamp created_at;
  std::string join_code;
  ExperimentStatus status = ExperimentStatus::Open;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

struct ParticipantRecord {
  std::string participant_id;
  std::string experiment_id;
  std::string session_token;
  std::uint64_t schedule_seed = 0;
  SessionState state = SessionState::Created;
  Timestamp created_at;
  std::optional<Timestamp> completed_at;

  friend bool operator==(const ParticipantRecord&, const ParticipantRecord&) = default;
};

struct StoredResult {
  std::string experiment_id;
  std::string participant_id;
  RatingSheet ratings;
  ComparisonSet comparisons;
  WorkloadResult result;
  Timestamp completed_at;

  friend bool operator==(const StoredResult&, const StoredResult&) = default;
};

}  // namespace tlx
