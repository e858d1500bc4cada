#include <gtest/gtest.h>

#include "tdet/error.hpp"
#include "tdet/synth.hpp"

namespace {

const tdet::ClassVocabulary& vocab() {
  static const tdet::ClassVocabulary v = tdet::ClassVocabulary::soccernet_v2();
  return v;
}

TEST(Synth, NoiselessSingleEvent) {
  tdet::SynthConfig c;
  c.length_s = 120;
  c.dim = 4;
  c.num_classes = 1;
  c.noise_sigma = 0.0;
  c.replay_fraction = 0.0;
  c.fixed_events = {{50, 0}};
  const auto h = tdet::synth_generate(c, 1, vocab());
  const auto dirs = tdet::synth_class_directions(4, 1, 0);
  for (int t = 0; t < 120; ++t) {
    const Eigen::RowVectorXd row = h.features.data.row(t).cast<double>();
    if (t >= 48 && t <= 52) {
      const double amp = 1.0 - std::abs(t - 50) / 3.0;
      EXPECT_TRUE(row.isApprox(amp * dirs.row(0), 1e-6)) << t;
    } else {
      EXPECT_TRUE(row.isZero()) << t;
    }
  }
  ASSERT_EQ(h.events.size(), 1u);
  EXPECT_EQ(h.events[0].time_s, 50);
  EXPECT_EQ(h.events[0].label, "Foul");
}

TEST(Synth, Deterministic) {
  tdet::SynthConfig c;
  const auto a = tdet::synth_generate(c, 9, vocab());
  const auto b = tdet::synth_generate(c, 9, vocab());
  EXPECT_EQ(a.features.data, b.features.data);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) EXPECT_EQ(a.events[i].time_s, b.events[i].time_s);
  ASSERT_EQ(a.replays.size(), b.replays.size());
  const auto other = tdet::synth_generate(c, 10, vocab());
  EXPECT_NE(a.features.data, other.features.data);
}

TEST(Synth, ConstantDelay) {
  tdet::SynthConfig c;
  c.length_s = 900;
  c.min_event_gap_s = 50;
  c.delay_min_s = 40;
  c.delay_max_s = 40;
  const auto h = tdet::synth_generate(c, 3, vocab());
  ASSERT_EQ(h.replays.size(), h.events.size());
  for (const auto& r : h.replays) {
    EXPECT_EQ(r.interval_s(), 40);
    EXPECT_LT(r.event_time_s, r.replay_start_s);
  }
}

TEST(Synth, TooDenseFailsPlacement) {
  tdet::SynthConfig c;
  c.length_s = 100;
  c.events_per_class = 10;
  c.replay_fraction = 0.0;
  try {
    tdet::synth_generate(c, 1, vocab());
    FAIL();
  } catch (const tdet::Error& e) {
    EXPECT_EQ(e.kind(), tdet::ErrorKind::placement);
  }
}

TEST(Synth, DirectionsOrthonormal) {
  const auto d = tdet::synth_class_directions(16, 5, 42);
  EXPECT_TRUE((d * d.transpose()).isIdentity(1e-12));
}

TEST(Synth, MatchedFilterPeaksAtEvents) {
  tdet::SynthConfig c;
  c.replay_fraction = 0.0;
  const auto h = tdet::synth_generate(c, 5, vocab());
  const auto dirs = tdet::synth_class_directions(c.dim, c.num_classes, c.pattern_seed);
  const auto& x = h.features.data;
  for (const auto& e : h.events) {
    int cls = 0;
    while (tdet::synth_class_to_vocab(cls) != e.class_index) ++cls;
    int best = -1;
    double best_score = -1e9;
    for (int t = e.time_s - 8; t <= e.time_s + 8; ++t) {
      double s = 0.0;
      for (int d = -2; d <= 2; ++d) {
        const int r = t + d;
        if (r < 0 || r >= x.rows()) continue;
        s += tdet::synth_bump_amplitude(d) * x.row(r).cast<double>().dot(dirs.row(cls));
      }
      if (s > best_score) {
        best_score = s;
        best = t;
      }
    }
    EXPECT_NEAR(best, e.time_s, 1);
  }
}

}  // namespace
