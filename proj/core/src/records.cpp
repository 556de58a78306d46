#include "tlx/records.hpp"

namespace tlx {

std::string_view to_string(ExperimentStatus s) noexcept {
  return s == ExperimentStatus::Open ? "open" : "closed";
}

std::string_view to_string(SessionState s) noexcept {
  switch (s) {
    case SessionState::Created: return "created";
    case SessionState::RatingsSubmitted: return "ratings_submitted";
    case SessionState::Complete: return "complete";
  }
  return "created";
}

std::optional<ExperimentStatus> experiment_status_from_string(std::string_view s) noexcept {
  if (s == "open") return ExperimentStatus::Open;
  if (s == "closed") return ExperimentStatus::Closed;
  return std::nullopt;
}

std::optional<SessionState> session_state_from_string(std::string_view s) noexcept {
  if (s == "created") return SessionState::Created;
  if (s == "ratings_submitted") return SessionState::RatingsSubmitted;
  if (s == "complete") return SessionState::Complete;
  return std::nullopt;
}

}  // namespace tlx
