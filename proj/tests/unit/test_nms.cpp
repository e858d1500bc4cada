#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tdet/nms.hpp"

namespace {

using tdet::SpotPrediction;

TEST(Nms, KeepsSeparatedPeaks) {
  const std::vector<SpotPrediction> in = {{"g", 1, 10, 0, 0.9}, {"g", 1, 15, 0, 0.8}, {"g", 1, 40, 0, 0.7}};
  const auto out = tdet::nms_1d(in, 20);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].time_s, 10);
  EXPECT_EQ(out[1].time_s, 40);
}

TEST(Nms, EmptyInput) { EXPECT_TRUE(tdet::nms_1d({}, 20).empty()); }

TEST(Nms, GroupsAreIndependent) {
  const std::vector<SpotPrediction> in = {{"g", 1, 10, 0, 0.9}, {"g", 1, 11, 1, 0.5}, {"g", 2, 10, 0, 0.4},
                                          {"h", 1, 12, 0, 0.3}};
  EXPECT_EQ(tdet::nms_1d(in, 20).size(), 4u);
}

TEST(Nms, ConfidenceTieKeepsEarlierTime) {
  const std::vector<SpotPrediction> in = {{"g", 1, 30, 0, 0.5}, {"g", 1, 20, 0, 0.5}};
  const auto out = tdet::nms_1d(in, 20);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].time_s, 20);
}

TEST(Nms, MatchesGreedyOracle) {
  tdet::Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto in = tdet::oracle::random_spots(rng, 50);
    const int window = static_cast<int>(rng.uniform_int(0, 30));
    const auto got = tdet::nms_1d(in, window);
    const auto want = tdet::oracle::greedy_nms(in, window);
    ASSERT_EQ(tdet::oracle::sorted_by_time(got), tdet::oracle::sorted_by_time(want)) << trial;
  }
}

TEST(Nms, Idempotent) {
  tdet::Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto once = tdet::nms_1d(tdet::oracle::random_spots(rng, 50), 20);
    EXPECT_EQ(tdet::nms_1d(once, 20), once);
  }
}

}  // namespace
