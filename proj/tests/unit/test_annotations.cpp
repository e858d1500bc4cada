#include <gtest/gtest.h>

#include "tdet/annotations.hpp"
#include "tdet/error.hpp"

namespace {

using tdet::ErrorKind;

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const tdet::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::io;
}

const tdet::ClassVocabulary& vocab() {
  static const tdet::ClassVocabulary v = tdet::ClassVocabulary::soccernet_v2();
  return v;
}

TEST(GameTime, ParsesStandardAndStoppageTime) {
  EXPECT_EQ(tdet::parse_game_time("1 - 12:34"), (tdet::GameTime{1, 754}));
  EXPECT_EQ(tdet::parse_game_time("2 - 00:00"), (tdet::GameTime{2, 0}));
  EXPECT_EQ(tdet::parse_game_time("1 - 90:07"), (tdet::GameTime{1, 5407}));
}

TEST(GameTime, FormatsInverse) {
  for (int s : {0, 59, 754, 5407}) {
    EXPECT_EQ(tdet::parse_game_time(tdet::format_game_time(2, s)), (tdet::GameTime{2, s}));
  }
}

TEST(GameTime, Errors) {
  EXPECT_EQ(kind_of([] { tdet::parse_game_time("3 - 00:10"); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { tdet::parse_game_time("1-00:10"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { tdet::parse_game_time("1 - 00:61"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { tdet::parse_game_time("garbage"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { tdet::parse_game_time(""); }), ErrorKind::parse);
}

TEST(Vocabulary, DefaultOrderAndLookups) {
  EXPECT_EQ(vocab().size(), 17);
  EXPECT_EQ(vocab().index_of("Penalty"), 0);
  EXPECT_EQ(vocab().index_of("Goal"), 2);
  EXPECT_EQ(vocab().index_of("Shots-off target"), vocab().index_of("Shots off target"));
  EXPECT_EQ(vocab().index_of("foul"), 10);
  EXPECT_FALSE(vocab().index_of("Handball").has_value());
  const auto back = tdet::ClassVocabulary::from_json(vocab().to_json());
  EXPECT_EQ(back.names(), vocab().names());
}

TEST(Vocabulary, RejectsWrongSizeAndDuplicates) {
  EXPECT_EQ(kind_of([] { tdet::ClassVocabulary({"a", "b"}); }), ErrorKind::vocabulary);
  auto names = vocab().names();
  names[1] = "goal";
  EXPECT_EQ(kind_of([&] { tdet::ClassVocabulary{names}; }), ErrorKind::vocabulary);
}

TEST(Labels, SingleEvent) {
  const auto f = tdet::parse_labels(R"({"annotations":[{"gameTime":"1 - 12:34","label":"Goal"}]})", "g",
                                    vocab());
  ASSERT_EQ(f.events.size(), 1u);
  EXPECT_EQ(f.events[0].half, 1);
  EXPECT_EQ(f.events[0].time_s, 754);
  EXPECT_EQ(f.events[0].label, "Goal");
  EXPECT_EQ(f.events[0].class_index, 2);
  EXPECT_EQ(f.events[0].game_id, "g");
  EXPECT_TRUE(f.replays.empty());
}

TEST(Labels, EmptyAnnotations) {
  const auto f = tdet::parse_labels(R"({"annotations":[]})", "g", vocab());
  EXPECT_TRUE(f.events.empty());
  EXPECT_TRUE(f.replays.empty());
}

TEST(Labels, ReplayInterval) {
  const auto f = tdet::parse_labels(
      R"({"replays":[{"start":"1 - 10:00","end":"1 - 10:20","event":"1 - 09:30","label":"Foul"}]})", "g",
      vocab());
  ASSERT_EQ(f.replays.size(), 1u);
  EXPECT_EQ(f.replays[0].interval_s(), 50);
  EXPECT_EQ(f.replays[0].replay_start_s, 600);
  EXPECT_EQ(f.replays[0].class_index, 10);
}

TEST(Labels, AnomalousReplayKeptUnlessStrict) {
  const char* json =
      R"({"replays":[{"start":"1 - 10:00","end":"1 - 10:20","event":"1 - 10:30","label":"Foul"}]})";
  const auto f = tdet::parse_labels(json, "g", vocab());
  ASSERT_EQ(f.replays.size(), 1u);
  EXPECT_EQ(f.replays[0].interval_s(), -10);
  EXPECT_EQ(kind_of([&] { tdet::parse_labels(json, "g", vocab(), true); }), ErrorKind::domain);
}

TEST(Labels, UnknownLabels) {
  const char* json = R"({"annotations":[{"gameTime":"2 - 01:00","label":"Handball"}]})";
  const auto f = tdet::parse_labels(json, "g", vocab());
  ASSERT_EQ(f.events.size(), 1u);
  EXPECT_EQ(f.events[0].class_index, -1);
  EXPECT_EQ(f.unknown_labels, std::vector<std::string>{"Handball"});
  EXPECT_EQ(kind_of([&] { tdet::parse_labels(json, "g", vocab(), true); }), ErrorKind::vocabulary);
}

TEST(Labels, MalformedJson) {
  EXPECT_EQ(kind_of([] { tdet::parse_labels("{", "g", vocab()); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { tdet::parse_labels("[]", "g", vocab()); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { tdet::parse_labels(R"({"annotations":[{"label":"Goal"}]})", "g", vocab()); }),
            ErrorKind::parse);
}

TEST(Labels, WriteThenParse) {
  std::vector<tdet::EventAnnotation> events = {{"g", 1, 754, "Goal", 2}, {"g", 2, 5, "Foul", 10}};
  const auto f = tdet::parse_labels(tdet::events_to_json(events), "g", vocab());
  ASSERT_EQ(f.events.size(), 2u);
  EXPECT_EQ(f.events[1].half, 2);
  EXPECT_EQ(f.events[1].time_s, 5);
  std::vector<tdet::ReplayAnnotation> replays = {{"g", 1, 100, 110, 60, "Goal", 2}};
  const auto r = tdet::parse_labels(tdet::replays_to_json(replays), "g", vocab());
  ASSERT_EQ(r.replays.size(), 1u);
  EXPECT_EQ(r.replays[0].interval_s(), 50);
}

}  // namespace
