#include "tlx/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "tlx/decimal.hpp"
#include "tlx/ids.hpp"
#include "tlx/json_codec.hpp"

namespace tlx {

namespace fs = std::filesystem;

std::string_view error_code(StoreErrc errc) noexcept {
  switch (errc) {
    case StoreErrc::UnknownExperiment: return "unknown_experiment";
    case StoreErrc::UnknownParticipant: return "unknown_participant";
    case StoreErrc::UnknownJoinCode: return "unknown_join_code";
    case StoreErrc::ExperimentClosed: return "experiment_closed";
    case StoreErrc::WrongState: return "wrong_state";
    case StoreErrc::ConflictingResubmission: return "conflicting_resubmission";
    case StoreErrc::InvalidName: return "invalid_name";
    case StoreErrc::StorageFailure: return "storage_failure";
  }
  return "storage_failure";
}

namespace {

constexpr std::string_view kFileExtension = ".jsonl";
constexpr std::string_view kTempSuffix = ".tmp";

[[noreturn]] void storage_failure(const std::string& what) {
  throw StoreError(StoreErrc::StorageFailure, what + ": " + std::strerror(errno));
}

// Code points, or nullopt for malformed UTF-8 or control characters.
std::optional<std::size_t> visible_length(std::string_view text) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    if (c < 0x20 || c == 0x7F) return std::nullopt;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    else return std::nullopt;
    if (i + len > text.size()) return std::nullopt;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return std::nullopt;
    }
    i += len;
    ++count;
  }
  return count;
}

void validate_name(std::string_view name) {
  const auto length = visible_length(name);
  if (!length) throw StoreError(StoreErrc::InvalidName, "experiment name is not valid text");
  if (name.find_first_not_of(' ') == std::string_view::npos) {
    throw StoreError(StoreErrc::InvalidName, "experiment name must not be empty");
  }
  if (*length > kMaxExperimentNameLength) {
    throw StoreError(StoreErrc::InvalidName, "experiment name exceeds 200 characters");
  }
}

void write_all(int fd, std::string_view bytes, const fs::path& path) {
  while (!bytes.empty()) {
    const ssize_t n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_failure("write " + path.string());
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_directory(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) storage_failure("open " + dir.string());
  const int rc = ::fsync(fd);
  ::close(fd);
  if (rc != 0) storage_failure("fsync " + dir.string());
}

struct ParticipantEntry {
  ParticipantRecord record;
  std::optional<RatingSheet> ratings;
  std::optional<StoredResult> result;
};

std::string participant_line(const ParticipantEntry& entry) {
  const auto& p = entry.record;
  Json line = {{"record", "participant"},
               {"participant_id", p.participant_id},
               {"session_token", p.session_token},
               {"schedule_seed", p.schedule_seed},
               {"state", to_string(p.state)},
               {"created_at", format_rfc3339(p.created_at)}};
  line["completed_at"] = p.completed_at ? Json(format_rfc3339(*p.completed_at)) : Json();
  line["ratings"] = entry.ratings ? ratings_json(*entry.ratings) : Json();
  if (entry.result) {
    const auto& r = *entry.result;
    line["comparisons"] = comparisons_json(r.comparisons);
    line["weights"] = per_dimension_json(r.result.weights.values());
    line["adjusted"] = per_dimension_json(r.result.adjusted);
    line["weighted_score"] = round2(r.result.weighted_score);
    line["raw_score"] = round2(r.result.raw_score);
  }
  return line.dump();
}

std::string experiment_line(const ExperimentRecord& record) {
  Json line = {{"record", "experiment"}, {"format_version", kStoreFormatVersion}};
  const auto fields = experiment_json(record);
  for (const auto& [k, v] : fields.items()) line[k] = v;
  return line.dump();
}

}  // namespace

struct ExperimentStore::Impl {
  struct Slot {
    mutable std::shared_mutex mutex;
    ExperimentRecord record;
    std::string header_line;
    std::vector<ParticipantEntry> participants;  // insertion order
    std::vector<std::string> lines;              // serialized participants, parallel
    std::unordered_map<std::string, std::size_t> by_id;
  };
  using SlotPtr = std::shared_ptr<Slot>;

  fs::path dir;
  StoreOptions options;

  mutable std::shared_mutex index_mutex;
  std::unordered_map<std::string, SlotPtr> experiments;
  std::unordered_map<std::string, SlotPtr> participants;  // participant_id -> owning slot
  std::unordered_map<std::string, SlotPtr> open_codes;    // join_code -> open experiment

  fs::path file_for(const std::string& experiment_id) const {
    return dir / (experiment_id + std::string(kFileExtension));
  }

  void write_atomically(const fs::path& target, std::string_view bytes) const {
    fs::path temp = target;
    temp += kTempSuffix;
    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) storage_failure("open " + temp.string());
    try {
      write_all(fd, bytes, temp);
      if (::fsync(fd) != 0) storage_failure("fsync " + temp.string());
    } catch (...) {
      ::close(fd);
      ::unlink(temp.c_str());
      throw;
    }
    if (::close(fd) != 0) {
      ::unlink(temp.c_str());
      storage_failure("close " + temp.string());
    }
    if (options.before_commit) options.before_commit(temp);
    if (::rename(temp.c_str(), target.c_str()) != 0) {
      ::unlink(temp.c_str());
      storage_failure("rename " + temp.string());
    }
    sync_directory(dir);
  }

  // Writes the experiment file as it would look with `header` and with the
  // participant at `replace_at` (or a new one when replace_at == size) set to
  // `new_line`. Nothing in memory changes.
  void persist(const Slot& slot, const std::string& header, std::size_t replace_at,
               const std::string* new_line) const {
    std::string content = header;
    content += '\n';
    for (std::size_t i = 0; i < slot.lines.size(); ++i) {
      content += (new_line && i == replace_at) ? *new_line : slot.lines[i];
      content += '\n';
    }
    if (new_line && replace_at == slot.lines.size()) {
      content += *new_line;
      content += '\n';
    }
    write_atomically(file_for(slot.record.experiment_id), content);
  }

  SlotPtr find_experiment(std::string_view id) const {
    std::shared_lock lock(index_mutex);
    const auto it = experiments.find(std::string(id));
    if (it == experiments.end()) {
      throw StoreError(StoreErrc::UnknownExperiment, "unknown experiment " + std::string(id));
    }
    return it->second;
  }

  SlotPtr find_participant_slot(std::string_view id) const {
    std::shared_lock lock(index_mutex);
    const auto it = participants.find(std::string(id));
    if (it == participants.end()) {
      throw StoreError(StoreErrc::UnknownParticipant, "unknown participant " + std::string(id));
    }
    return it->second;
  }

  // Caller holds slot.mutex.
  static std::size_t position(const Slot& slot, std::string_view id) {
    const auto it = slot.by_id.find(std::string(id));
    if (it == slot.by_id.end()) {
      // Reserved in the index but not yet committed.
      throw StoreError(StoreErrc::UnknownParticipant, "unknown participant " + std::string(id));
    }
    return it->second;
  }

  ParticipantRecord add_to(const SlotPtr& slot) {
    std::unique_lock slot_lock(slot->mutex);
    if (slot->record.status == ExperimentStatus::Closed) {
      throw StoreError(StoreErrc::ExperimentClosed,
                       "experiment " + slot->record.experiment_id + " is closed");
    }

    ParticipantEntry entry;
    {
      std::unique_lock lock(index_mutex);
      do {
        entry.record.participant_id = random_id();
      } while (participants.contains(entry.record.participant_id));
      participants.emplace(entry.record.participant_id, slot);
    }
    entry.record.experiment_id = slot->record.experiment_id;
    entry.record.session_token = random_token(32);
    entry.record.schedule_seed = random_seed();
    entry.record.state = SessionState::Created;
    entry.record.created_at = options.clock();

    std::string line = participant_line(entry);
    try {
      persist(*slot, slot->header_line, slot->lines.size(), &line);
    } catch (...) {
      std::unique_lock lock(index_mutex);
      participants.erase(entry.record.participant_id);
      throw;
    }
    slot->by_id.emplace(entry.record.participant_id, slot->participants.size());
    slot->participants.push_back(entry);
    slot->lines.push_back(std::move(line));
    return entry.record;
  }

  void load_file(const fs::path& path);
};

void ExperimentStore::Impl::load_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) storage_failure("open " + path.string());

  auto slot = std::make_shared<Slot>();
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto doc = nlohmann::json::parse(line);
      const auto kind = doc.at("record").get<std::string>();
      if (line_no == 1) {
        if (kind != "experiment" || doc.at("format_version").get<int>() != kStoreFormatVersion) {
          throw CodecError("unsupported header");
        }
        slot->record = parse_experiment(doc);
        slot->header_line = line;
        continue;
      }
      if (kind != "participant") throw CodecError("unexpected record kind " + kind);

      ParticipantEntry entry;
      auto& p = entry.record;
      p.participant_id = doc.at("participant_id").get<std::string>();
      p.experiment_id = slot->record.experiment_id;
      p.session_token = doc.at("session_token").get<std::string>();
      p.schedule_seed = doc.at("schedule_seed").get<std::uint64_t>();
      const auto state = session_state_from_string(doc.at("state").get<std::string>());
      if (!state) throw CodecError("unknown session state");
      p.state = *state;
      p.created_at = parse_rfc3339(doc.at("created_at").get<std::string>());
      if (!doc.at("completed_at").is_null()) {
        p.completed_at = parse_rfc3339(doc.at("completed_at").get<std::string>());
      }
      if (!doc.at("ratings").is_null()) {
        entry.ratings = validate_ratings(parse_rating_entries(doc.at("ratings")));
      }
      if (p.state == SessionState::Complete) {
        if (!p.completed_at) throw CodecError("complete participant without completed_at");
        entry.result = parse_stored_result(doc, p.experiment_id);
        if (!entry.ratings || !(*entry.ratings == entry.result->ratings)) {
          throw CodecError("result ratings disagree with saved ratings");
        }
      } else if (doc.contains("comparisons") || p.completed_at ||
                 (p.state == SessionState::RatingsSubmitted) != entry.ratings.has_value()) {
        throw CodecError("participant fields inconsistent with state");
      }
      slot->by_id.emplace(p.participant_id, slot->participants.size());
      slot->participants.push_back(std::move(entry));
      slot->lines.push_back(line);
    }
  } catch (const StoreError&) {
    throw;
  } catch (const std::exception& e) {
    throw StoreError(StoreErrc::StorageFailure, "corrupt experiment file " + path.string() +
                                                    " line " + std::to_string(line_no) + ": " + e.what());
  }
  if (slot->header_line.empty()) {
    throw StoreError(StoreErrc::StorageFailure, "empty experiment file " + path.string());
  }
  if (path.stem().string() != slot->record.experiment_id) {
    throw StoreError(StoreErrc::StorageFailure, "file name does not match experiment id: " + path.string());
  }

  experiments.emplace(slot->record.experiment_id, slot);
  for (const auto& entry : slot->participants) {
    if (!participants.emplace(entry.record.participant_id, slot).second) {
      throw StoreError(StoreErrc::StorageFailure, "duplicate participant id " + entry.record.participant_id);
    }
  }
  if (slot->record.status == ExperimentStatus::Open &&
      !open_codes.emplace(slot->record.join_code, slot).second) {
    throw StoreError(StoreErrc::StorageFailure, "duplicate open join code " + slot->record.join_code);
  }
}

ExperimentStore::ExperimentStore(fs::path data_dir, StoreOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->dir = std::move(data_dir);
  impl_->options = std::move(options);
  if (!impl_->options.clock) impl_->options.clock = utc_now;

  std::error_code ec;
  fs::create_directories(impl_->dir, ec);
  if (ec) throw StoreError(StoreErrc::StorageFailure, "cannot create " + impl_->dir.string() + ": " + ec.message());

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(impl_->dir)) {
    if (!e.is_regular_file()) continue;
    const auto& path = e.path();
    if (path.extension() == kTempSuffix) {
      // Uncommitted write from an interrupted process.
      fs::remove(path, ec);
    } else if (path.extension() == kFileExtension) {
      files.push_back(path);
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) impl_->load_file(f);
}

ExperimentStore::~ExperimentStore() = default;

const fs::path& ExperimentStore::data_dir() const noexcept { return impl_->dir; }

ExperimentRecord ExperimentStore::create_experiment(std::string_view name) {
  validate_name(name);
  auto slot = std::make_shared<Impl::Slot>();
  std::unique_lock lock(impl_->index_mutex);
  auto& record = slot->record;
  do {
    record.experiment_id = random_id();
  } while (impl_->experiments.contains(record.experiment_id));
  do {
    record.join_code = random_join_code();
  } while (impl_->open_codes.contains(record.join_code));
  record.name = std::string(name);
  record.created_at = impl_->options.clock();
  record.status = ExperimentStatus::Open;
  slot->header_line = experiment_line(record);

  impl_->persist(*slot, slot->header_line, 0, nullptr);
  impl_->experiments.emplace(record.experiment_id, slot);
  impl_->open_codes.emplace(record.join_code, slot);
  return record;
}

ExperimentRecord ExperimentStore::close_experiment(std::string_view experiment_id) {
  auto slot = impl_->find_experiment(experiment_id);
  std::unique_lock slot_lock(slot->mutex);
  if (slot->record.status == ExperimentStatus::Closed) return slot->record;

  ExperimentRecord updated = slot->record;
  updated.status = ExperimentStatus::Closed;
  std::string header = experiment_line(updated);
  impl_->persist(*slot, header, 0, nullptr);

  slot->record = updated;
  slot->header_line = std::move(header);
  std::unique_lock lock(impl_->index_mutex);
  impl_->open_codes.erase(updated.join_code);
  return updated;
}

ParticipantRecord ExperimentStore::add_participant(std::string_view experiment_id) {
  return impl_->add_to(impl_->find_experiment(experiment_id));
}

ParticipantRecord ExperimentStore::join(std::string_view join_code) {
  Impl::SlotPtr open;
  std::vector<Impl::SlotPtr> all;
  {
    std::shared_lock lock(impl_->index_mutex);
    const auto it = impl_->open_codes.find(std::string(join_code));
    if (it != impl_->open_codes.end()) {
      open = it->second;
    } else {
      for (const auto& [id, s] : impl_->experiments) all.push_back(s);
    }
  }
  if (open) return impl_->add_to(open);
  // Index lock released: slot locks are never taken while holding it.
  for (const auto& s : all) {
    std::shared_lock slot_lock(s->mutex);
    if (s->record.join_code == join_code) {
      throw StoreError(StoreErrc::ExperimentClosed, "experiment " + s->record.experiment_id + " is closed");
    }
  }
  throw StoreError(StoreErrc::UnknownJoinCode, "unknown join code");
}

ParticipantRecord ExperimentStore::save_ratings(std::string_view participant_id,
                                                std::span<const RatingEntry> entries) {
  impl_->find_participant_slot(participant_id);
  return save_ratings(participant_id, validate_ratings(entries));
}

ParticipantRecord ExperimentStore::save_ratings(std::string_view participant_id, const RatingSheet& sheet) {
  auto slot = impl_->find_participant_slot(participant_id);
  std::unique_lock slot_lock(slot->mutex);
  const std::size_t pos = Impl::position(*slot, participant_id);
  const auto& current = slot->participants[pos];

  if (current.record.state != SessionState::Created) {
    if (current.ratings && *current.ratings == sheet) return current.record;
    if (current.record.state == SessionState::RatingsSubmitted) {
      throw StoreError(StoreErrc::ConflictingResubmission, "ratings were already submitted with different values");
    }
    throw StoreError(StoreErrc::WrongState, "session is already complete");
  }

  ParticipantEntry updated = current;
  updated.ratings = sheet;
  updated.record.state = SessionState::RatingsSubmitted;
  std::string line = participant_line(updated);
  impl_->persist(*slot, slot->header_line, pos, &line);

  slot->participants[pos] = std::move(updated);
  slot->lines[pos] = std::move(line);
  return slot->participants[pos].record;
}

StoredResult ExperimentStore::save_comparisons(std::string_view participant_id,
                                               std::vector<ComparisonChoice> choices) {
  impl_->find_participant_slot(participant_id);
  return save_comparisons(participant_id, ComparisonSet::validate(std::move(choices)));
}

StoredResult ExperimentStore::save_comparisons(std::string_view participant_id, const ComparisonSet& set) {
  auto slot = impl_->find_participant_slot(participant_id);
  std::unique_lock slot_lock(slot->mutex);
  const std::size_t pos = Impl::position(*slot, participant_id);
  const auto& current = slot->participants[pos];

  switch (current.record.state) {
    case SessionState::Created:
      throw StoreError(StoreErrc::WrongState, "ratings must be submitted before comparisons");
    case SessionState::Complete:
      if (current.result->comparisons == set) return *current.result;
      throw StoreError(StoreErrc::ConflictingResubmission, "comparisons were already submitted with different choices");
    case SessionState::RatingsSubmitted:
      break;
  }

  ParticipantEntry updated = current;
  const Timestamp now = impl_->options.clock();
  updated.record.state = SessionState::Complete;
  updated.record.completed_at = now;
  updated.result = StoredResult{current.record.experiment_id, current.record.participant_id,
                                *current.ratings, set, compute_result(*current.ratings, set), now};
  std::string line = participant_line(updated);
  impl_->persist(*slot, slot->header_line, pos, &line);

  slot->participants[pos] = std::move(updated);
  slot->lines[pos] = std::move(line);
  return *slot->participants[pos].result;
}

std::vector<ExperimentRecord> ExperimentStore::list_experiments() const {
  std::vector<Impl::SlotPtr> slots;
  {
    std::shared_lock lock(impl_->index_mutex);
    for (const auto& [id, slot] : impl_->experiments) slots.push_back(slot);
  }
  std::vector<ExperimentRecord> out;
  out.reserve(slots.size());
  for (const auto& slot : slots) {
    std::shared_lock slot_lock(slot->mutex);
    out.push_back(slot->record);
  }
  std::sort(out.begin(), out.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.experiment_id < b.experiment_id;
  });
  return out;
}

ExperimentRecord ExperimentStore::get_experiment(std::string_view experiment_id) const {
  auto slot = impl_->find_experiment(experiment_id);
  std::shared_lock slot_lock(slot->mutex);
  return slot->record;
}

std::vector<ParticipantRecord> ExperimentStore::list_participants(std::string_view experiment_id) const {
  auto slot = impl_->find_experiment(experiment_id);
  std::shared_lock slot_lock(slot->mutex);
  std::vector<ParticipantRecord> out;
  out.reserve(slot->participants.size());
  for (const auto& p : slot->participants) out.push_back(p.record);
  return out;
}

ParticipantRecord ExperimentStore::get_participant(std::string_view participant_id) const {
  auto slot = impl_->find_participant_slot(participant_id);
  std::shared_lock slot_lock(slot->mutex);
  return slot->participants[Impl::position(*slot, participant_id)].record;
}

bool ExperimentStore::verify_session(std::string_view participant_id, std::string_view token) const {
  try {
    return constant_time_equal(get_participant(participant_id).session_token, token);
  } catch (const StoreError&) {
    return false;
  }
}

StoredResult ExperimentStore::get_result(std::string_view participant_id) const {
  auto slot = impl_->find_participant_slot(participant_id);
  std::shared_lock slot_lock(slot->mutex);
  const auto& entry = slot->participants[Impl::position(*slot, participant_id)];
  if (!entry.result) throw StoreError(StoreErrc::WrongState, "session is not complete");
  return *entry.result;
}

std::vector<StoredResult> ExperimentStore::list_results(std::string_view experiment_id) const {
  auto slot = impl_->find_experiment(experiment_id);
  std::vector<StoredResult> out;
  {
    std::shared_lock slot_lock(slot->mutex);
    for (const auto& p : slot->participants) {
      if (p.result) out.push_back(*p.result);
    }
  }
  std::sort(out.begin(), out.end(), [](const StoredResult& a, const StoredResult& b) {
    return a.completed_at != b.completed_at ? a.completed_at < b.completed_at
                                            : a.participant_id < b.participant_id;
  });
  return out;
}

}  // namespace tlx
