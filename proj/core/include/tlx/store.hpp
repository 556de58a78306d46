#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tlx/records.hpp"
#include "tlx/scoring.hpp"
#include "tlx/timestamp.hpp"

namespace tlx {

inline constexpr int kStoreFormatVersion = 1;
inline constexpr std::size_t kMaxExperimentNameLength = 200;

enum class StoreErrc {
  UnknownExperiment,
  UnknownParticipant,
  UnknownJoinCode,
  ExperimentClosed,
  WrongState,
  ConflictingResubmission,
  InvalidName,
  StorageFailure,
};

std::string_view error_code(StoreErrc errc) noexcept;

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrc errc, std::string message)
      : std::runtime_error(std::move(message)), errc_(errc) {}

  StoreErrc errc() const noexcept { return errc_; }

 private:
  StoreErrc errc_;
};

struct StoreOptions {
  Clock clock = utc_now;
  // Test hook: runs after the temp file is written and synced, before the
  // rename that commits it. Throwing from here leaves the temp file behind and
  // the committed state untouched, which is what a crash at that point does.
  std::function<void(const std::filesystem::path& temp_file)> before_commit;
};

/// File-backed store: one line-delimited JSON file per experiment under the
/// data directory, replaced atomically (temp file + fsync + rename) on every
/// mutation. Mutations are serialized per experiment; readers share.
class ExperimentStore {
 public:
  /// Loads every committed experiment file; leftover temp files are removed.
  explicit ExperimentStore(std::filesystem::path data_dir, StoreOptions options = {});
  ~ExperimentStore();

  ExperimentStore(const ExperimentStore&) = delete;
  ExperimentStore& operator=(const ExperimentStore&) = delete;

  ExperimentRecord create_experiment(std::string_view name);
  /// Idempotent: closing a closed experiment returns it unchanged.
  ExperimentRecord close_experiment(std::string_view experiment_id);

  ParticipantRecord add_participant(std::string_view experiment_id);
  /// add_participant on the open experiment holding `join_code`.
  ParticipantRecord join(std::string_view join_code);

  ParticipantRecord save_ratings(std::string_view participant_id, std::span<const RatingEntry> entries);
  ParticipantRecord save_ratings(std::string_view participant_id, const RatingSheet& sheet);

  StoredResult save_comparisons(std::string_view participant_id, std::vector<ComparisonChoice> choices);
  StoredResult save_comparisons(std::string_view participant_id, const ComparisonSet& set);

  std::vector<ExperimentRecord> list_experiments() const;
  ExperimentRecord get_experiment(std::string_view experiment_id) const;
  std::vector<ParticipantRecord> list_participants(std::string_view experiment_id) const;
  ParticipantRecord get_participant(std::string_view participant_id) const;
  /// Constant-time token check; false for unknown participants.
  bool verify_session(std::string_view participant_id, std::string_view token) const;
  /// Throws WrongState when the participant has not completed.
  StoredResult get_result(std::string_view participant_id) const;
  /// Complete sessions only, in completion order.
  std::vector<StoredResult> list_results(std::string_view experiment_id) const;

  const std::filesystem::path& data_dir() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tlx
