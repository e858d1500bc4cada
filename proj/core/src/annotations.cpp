#include "tdet/annotations.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdio>

#include "tdet/error.hpp"

namespace tdet {

using nlohmann::json;

namespace {

int parse_uint(std::string_view s, std::string_view whole) {
  if (s.empty()) throw Error(ErrorKind::parse, "bad game time '" + std::string(whole) + "'");
  int v = 0;
  for (const char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorKind::parse, "bad game time '" + std::string(whole) + "'");
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

std::string string_field(const json& entry, const char* key) {
  const auto it = entry.find(key);
  if (it == entry.end() || !it->is_string()) {
    throw Error(ErrorKind::parse, std::string("annotation entry lacks string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

GameTime parse_game_time(std::string_view text) {
  const auto dash = text.find(" - ");
  const auto colon = text.rfind(':');
  if (dash == std::string_view::npos || colon == std::string_view::npos || colon < dash) {
    throw Error(ErrorKind::parse, "bad game time '" + std::string(text) + "'");
  }
  const int half = parse_uint(text.substr(0, dash), text);
  const int minutes = parse_uint(text.substr(dash + 3, colon - dash - 3), text);
  const auto sec_text = text.substr(colon + 1);
  const int seconds = parse_uint(sec_text, text);
  if (sec_text.size() != 2 || seconds > 59) {
    throw Error(ErrorKind::parse, "bad seconds field in '" + std::string(text) + "'");
  }
  if (half != 1 && half != 2) {
    throw Error(ErrorKind::domain, "half must be 1 or 2 in '" + std::string(text) + "'");
  }
  return {half, minutes * 60 + seconds};
}

std::string format_game_time(int half, int seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d - %02d:%02d", half, seconds / 60, seconds % 60);
  return buf;
}

std::string canonical_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (const char c : label) {
    out.push_back(c == '-' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

ClassVocabulary::ClassVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (static_cast<int>(names_.size()) != kNumEventClasses) {
    throw Error(ErrorKind::vocabulary, "class vocabulary must list exactly 17 names, got " +
                                           std::to_string(names_.size()));
  }
  for (const auto& n : names_) {
    auto key = canonical_label(n);
    for (const auto& k : keys_) {
      if (k == key) throw Error(ErrorKind::vocabulary, "duplicate class name '" + n + "'");
    }
    keys_.push_back(std::move(key));
  }
}

ClassVocabulary ClassVocabulary::soccernet_v2() {
  return ClassVocabulary({"Penalty", "Kick-off", "Goal", "Substitution", "Offside",
                          "Shots on target", "Shots off target", "Clearance", "Ball out of play",
                          "Throw-in", "Foul", "Indirect free-kick", "Direct free-kick", "Corner",
                          "Yellow card", "Red card", "Yellow->red card"});
}

ClassVocabulary ClassVocabulary::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("class vocabulary: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::parse, "class vocabulary must be a JSON array");
  std::vector<std::string> names;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(ErrorKind::parse, "class vocabulary entries must be strings");
    names.push_back(v.get<std::string>());
  }
  return ClassVocabulary(std::move(names));
}

std::string ClassVocabulary::to_json() const { return json(names_).dump(2) + "\n"; }

std::optional<int> ClassVocabulary::index_of(std::string_view label) const {
  const auto key = canonical_label(label);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return static_cast<int>(i);
  }
  return std::nullopt;
}

const std::string& ClassVocabulary::name(int index) const {
  if (index < 0 || index >= size()) {
    throw Error(ErrorKind::domain, "class index " + std::to_string(index) + " out of range");
  }
  return names_[static_cast<std::size_t>(index)];
}

LabelFile parse_labels(std::string_view text, const std::string& game_id,
                       const ClassVocabulary& vocabulary, bool strict) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("label file: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::parse, "label file must be a JSON object");

  LabelFile out;
  auto resolve = [&](const std::string& label) {
    const auto idx = vocabulary.index_of(label);
    if (idx) return *idx;
    if (strict) throw Error(ErrorKind::vocabulary, "unknown label '" + label + "'");
    out.unknown_labels.push_back(label);
    return -1;
  };

  const auto ann = j.find("annotations");
  const auto rep = j.find("replays");
  if (ann == j.end() && rep == j.end()) {
    throw Error(ErrorKind::parse, "label file has neither 'annotations' nor 'replays'");
  }
  if (ann != j.end()) {
    if (!ann->is_array()) throw Error(ErrorKind::parse, "'annotations' must be an array");
    for (const auto& entry : *ann) {
      const auto gt = parse_game_time(string_field(entry, "gameTime"));
      EventAnnotation ev;
      ev.game_id = game_id;
      ev.half = gt.half;
      ev.time_s = gt.seconds;
      ev.label = string_field(entry, "label");
      ev.class_index = resolve(ev.label);
      out.events.push_back(std::move(ev));
    }
  }
  if (rep != j.end()) {
    if (!rep->is_array()) throw Error(ErrorKind::parse, "'replays' must be an array");
    for (const auto& entry : *rep) {
      const auto start = parse_game_time(string_field(entry, "start"));
      const auto end = parse_game_time(string_field(entry, "end"));
      const auto event = parse_game_time(string_field(entry, "event"));
      if (start.half != end.half || start.half != event.half) {
        throw Error(ErrorKind::domain, "replay start, end and event must share a half");
      }
      ReplayAnnotation r;
      r.game_id = game_id;
      r.half = start.half;
      r.replay_start_s = start.seconds;
      r.replay_end_s = end.seconds;
      r.event_time_s = event.seconds;
      // Anomalous entries are kept unless strict; replay_stats counts them.
      if (strict && r.replay_start_s > r.replay_end_s) {
        throw Error(ErrorKind::domain, "replay start must not follow its end");
      }
      if (strict && r.event_time_s > r.replay_end_s) {
        throw Error(ErrorKind::domain, "replayed event lies after the replay end");
      }
      r.event_label = string_field(entry, "label");
      r.class_index = resolve(r.event_label);
      out.replays.push_back(std::move(r));
    }
  }
  return out;
}

std::string events_to_json(const std::vector<EventAnnotation>& events) {
  json arr = json::array();
  for (const auto& e : events) {
    arr.push_back({{"gameTime", format_game_time(e.half, e.time_s)}, {"label", e.label}});
  }
  return json{{"annotations", arr}}.dump(2) + "\n";
}

std::string replays_to_json(const std::vector<ReplayAnnotation>& replays) {
  json arr = json::array();
  for (const auto& r : replays) {
    arr.push_back({{"start", format_game_time(r.half, r.replay_start_s)},
                   {"end", format_game_time(r.half, r.replay_end_s)},
                   {"event", format_game_time(r.half, r.event_time_s)},
                   {"label", r.event_label}});
  }
  return json{{"replays", arr}}.dump(2) + "\n";
}

}  // namespace tdet
