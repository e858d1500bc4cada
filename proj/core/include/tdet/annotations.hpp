#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tdet {

inline constexpr int kNumEventClasses = 17;
inline constexpr int kBackgroundClass = 17;
inline constexpr int kNumClasses = 18;

struct GameTime {
  int half = 1;
  int seconds = 0;

  friend bool operator==(const GameTime&, const GameTime&) = default;
};

/// Parses "H - MM:SS". Minutes may exceed 59 (stoppage time).
GameTime parse_game_time(std::string_view text);
std::string format_game_time(int half, int seconds);

/// Ordered list of the 17 event class names; index order fixes model output
/// indexing and index 17 is background.
///
/// Lookups are insensitive to case and treat '-' and ' ' alike, so
/// "Shots-off target" and "Shots off target" name the same class.
class ClassVocabulary {
 public:
  explicit ClassVocabulary(std::vector<std::string> names);

  static ClassVocabulary soccernet_v2();
  static ClassVocabulary from_json(std::string_view json);
  std::string to_json() const;

  std::optional<int> index_of(std::string_view label) const;
  const std::string& name(int index) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  int size() const noexcept { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> keys_;
};

std::string canonical_label(std::string_view label);

struct EventAnnotation {
  std::string game_id;
  int half = 1;
  int time_s = 0;
  std::string label;
  int class_index = -1;  // -1 when the label is not in the vocabulary
};

struct ReplayAnnotation {
  std::string game_id;
  int half = 1;
  int replay_start_s = 0;
  int replay_end_s = 0;
  int event_time_s = 0;
  std::string event_label;
  int class_index = -1;

  int interval_s() const noexcept { return replay_end_s - event_time_s; }
};

struct LabelFile {
  std::vector<EventAnnotation> events;
  std::vector<ReplayAnnotation> replays;
  std::vector<std::string> unknown_labels;
};

/// Reads the "annotations" array (events) and the optional "replays" array.
/// In strict mode an unknown label raises a vocabulary error; otherwise the
/// entry is kept with class_index -1 and its label listed in unknown_labels.
/// Strict mode also rejects replays that end before their start or their event.
LabelFile parse_labels(std::string_view json, const std::string& game_id,
                       const ClassVocabulary& vocabulary, bool strict = false);

std::string events_to_json(const std::vector<EventAnnotation>& events);
std::string replays_to_json(const std::vector<ReplayAnnotation>& replays);

}  // namespace tdet
