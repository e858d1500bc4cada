#include <gtest/gtest.h>

#include <set>

#include "tdet/snippets.hpp"

namespace {

tdet::FeatureSequence ramp(int length, int dim) {
  tdet::FeatureSequence f;
  f.game_id = "g";
  f.data.resize(length, dim);
  for (int t = 0; t < length; ++t) {
    for (int j = 0; j < dim; ++j) f.data(t, j) = static_cast<float>(t * 10 + j + 1);
  }
  f.source_dims = {dim};
  return f;
}

tdet::EventAnnotation event(int t, int cls) { return {"g", 1, t, "", cls}; }

TEST(Snippets, CentredOnEvent) {
  const auto f = ramp(200, 3);
  const auto ds = tdet::build_snippet_dataset(f, {event(100, 2)}, 5, 0.0, 1);
  ASSERT_EQ(ds.snippets.size(), 1u);
  const auto& s = ds.snippets[0];
  EXPECT_EQ(s.target_class, 2);
  EXPECT_EQ(s.center_s, 100);
  ASSERT_EQ(s.features.rows(), 5);
  EXPECT_EQ(s.features, f.data.middleRows(98, 5));
}

TEST(Snippets, ZeroPadsAtStart) {
  const auto f = ramp(200, 3);
  const auto ds = tdet::build_snippet_dataset(f, {event(1, 4)}, 5, 0.0, 1);
  ASSERT_EQ(ds.snippets.size(), 1u);
  const auto& x = ds.snippets[0].features;
  EXPECT_TRUE(x.row(0).isZero());
  EXPECT_EQ(x.bottomRows(4), f.data.topRows(4));
}

TEST(Snippets, BalancedBackground) {
  const auto f = ramp(2000, 2);
  std::vector<tdet::EventAnnotation> events;
  for (int k = 0; k < 17; ++k) events.push_back(event(50 + 100 * k, k));
  const auto ds = tdet::build_snippet_dataset(f, events, 5, 1.0, 7);
  ASSERT_EQ(ds.snippets.size(), 34u);
  int background = 0;
  std::set<int> centres;
  for (const auto& s : ds.snippets) {
    if (s.target_class != tdet::kBackgroundClass) continue;
    ++background;
    centres.insert(s.center_s);
    for (const auto& e : events) EXPECT_GT(std::abs(e.time_s - s.center_s), 5);
  }
  EXPECT_EQ(background, 17);
  EXPECT_EQ(centres.size(), 17u);
}

TEST(Snippets, OutOfRangeEventsSkipped) {
  const auto ds = tdet::build_snippet_dataset(ramp(50, 2), {event(60, 1), event(10, 1)}, 5, 0.0, 1);
  EXPECT_EQ(ds.snippets.size(), 1u);
  EXPECT_EQ(ds.skipped_events, 1u);
}

TEST(Snippets, BackgroundOnlyWithoutEvents) {
  const auto ds = tdet::build_snippet_dataset(ramp(100, 2), {}, 5, 1.0, 3);
  EXPECT_EQ(ds.snippets.size(), 20u);
  for (const auto& s : ds.snippets) EXPECT_EQ(s.target_class, tdet::kBackgroundClass);
}

TEST(Snippets, ExtractWindowPadsBothEnds) {
  const auto f = ramp(3, 1);
  const auto w = tdet::extract_window(f.data, -2, 7);
  ASSERT_EQ(w.rows(), 7);
  EXPECT_EQ(w(0, 0), 0.0f);
  EXPECT_EQ(w(2, 0), 1.0f);
  EXPECT_EQ(w(4, 0), 21.0f);
  EXPECT_EQ(w(6, 0), 0.0f);
}

}  // namespace
