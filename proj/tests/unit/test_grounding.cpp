#include <gtest/gtest.h>

#include <cmath>

#include "tdet/grounding.hpp"
#include "tdet/synth.hpp"

namespace {

tdet::FeatureSequence random_features(tdet::Rng& rng, int T, int D) {
  tdet::FeatureSequence f;
  f.game_id = "g";
  f.data.resize(T, D);
  for (int i = 0; i < f.data.size(); ++i) f.data.data()[i] = static_cast<float>(rng.normal());
  f.source_dims = {D};
  return f;
}

tdet::ReplayAnnotation replay(int event, int start, int end) { return {"g", 1, start, end, event, "Goal", 2}; }

tdet::GroundingModel zero_model(int dim) {
  auto m = tdet::make_grounding_model(tdet::grounding_encoder_config(dim), 1);
  m.params.set_zero();
  return m;
}

TEST(GroundingSampling, PairsRespectContainment) {
  tdet::Rng rng(1);
  const auto f = random_features(rng, 400, 4);
  for (int trial = 0; trial < 500; ++trial) {
    const int start = static_cast<int>(rng.uniform_int(1, 390));
    const int end = start + static_cast<int>(rng.uniform_int(1, 9));
    const int event = static_cast<int>(rng.uniform_int(std::max(0, start - 130), start + 2));
    const auto pairs = tdet::sample_grounding_pairs(replay(event, start, end), f, rng);
    const int lo = std::max(0, start - 120);
    const int s_max = std::max(lo, start - 30);
    const bool inside = event >= lo && event < start;
    bool coverable = false, any_negative = false;
    for (int s = lo; s <= s_max; ++s) {
      const bool c = event >= s && event < s + 30;
      coverable = coverable || c;
      any_negative = any_negative || !c;
    }
    if (!inside || !coverable) {
      EXPECT_TRUE(pairs.skipped) << trial;
      continue;
    }
    ASSERT_FALSE(pairs.skipped) << pairs.reason;
    int pos = 0, neg = 0;
    for (const auto& s : pairs.samples) {
      EXPECT_GE(s.candidate_start_s, lo);
      EXPECT_LE(s.candidate_start_s, s_max);
      EXPECT_EQ(s.candidate.rows(), 30);
      EXPECT_EQ(s.replay.rows(), 30);
      const bool contains = event >= s.candidate_start_s && event < s.candidate_start_s + 30;
      if (s.label == 1) {
        ++pos;
        EXPECT_TRUE(contains);
        ASSERT_TRUE(s.offset_target.has_value());
        EXPECT_DOUBLE_EQ(*s.offset_target, (event - s.candidate_start_s) / 30.0);
        EXPECT_GE(*s.offset_target, 0.0);
        EXPECT_LT(*s.offset_target, 1.0);
      } else {
        ++neg;
        EXPECT_FALSE(contains);
        EXPECT_FALSE(s.offset_target.has_value());
      }
    }
    EXPECT_EQ(pos, 4);
    EXPECT_EQ(neg, any_negative ? 4 : 0);
  }
}

TEST(GroundingSampling, EventFortySecondsBeforeStart) {
  tdet::Rng rng(2);
  const auto f = random_features(rng, 300, 4);
  const auto pairs = tdet::sample_grounding_pairs(replay(160, 200, 206), f, rng);
  ASSERT_FALSE(pairs.skipped);
  int pos = 0;
  for (const auto& s : pairs.samples) {
    if (s.label != 1) continue;
    ++pos;
    EXPECT_LE(s.candidate_start_s, 160);
    EXPECT_GT(s.candidate_start_s + 30, 160);
  }
  EXPECT_EQ(pos, 4);
}

TEST(GroundingSampling, ChunkAtEventHasZeroOffset) {
  tdet::Rng rng(3);
  const auto f = random_features(rng, 300, 4);
  // Only one positive start (the earliest window start) contains the event.
  const auto pairs = tdet::sample_grounding_pairs(replay(80, 200, 206), f, rng);
  ASSERT_FALSE(pairs.skipped);
  for (const auto& s : pairs.samples) {
    if (s.label != 1) continue;
    EXPECT_EQ(s.candidate_start_s, 80);
    EXPECT_EQ(*s.offset_target, 0.0);
  }
}

TEST(GroundingSampling, ReplayClipIsPaddedToLength) {
  tdet::Rng rng(4);
  const auto f = random_features(rng, 100, 3);
  const auto clip = tdet::replay_clip(f, replay(10, 50, 55), 30);
  ASSERT_EQ(clip.rows(), 30);
  EXPECT_EQ(clip.topRows(5), f.data.middleRows(50, 5));
  EXPECT_TRUE(clip.bottomRows(25).isZero());
  EXPECT_EQ(tdet::replay_clip(f, replay(10, 20, 80), 30), f.data.middleRows(20, 30));
}

TEST(Grounding, ZeroModelGivesHalf) {
  tdet::Rng rng(5);
  const auto f = random_features(rng, 300, 6);
  const auto m = zero_model(6);
  const auto pairs = tdet::sample_grounding_pairs(replay(160, 200, 206), f, rng);
  for (const auto& s : pairs.samples) {
    const auto out = tdet::ground_forward(m, s);
    EXPECT_EQ(out.prob, 0.5);
    EXPECT_EQ(out.offset, 0.0);
  }
}

TEST(Grounding, EvalIsDeterministic) {
  tdet::Rng rng(6);
  const auto f = random_features(rng, 300, 6);
  const auto m = tdet::make_grounding_model(tdet::grounding_encoder_config(6), 2);
  const auto pairs = tdet::sample_grounding_pairs(replay(160, 200, 206), f, rng);
  const auto a = tdet::ground_forward(m, pairs.samples[0]);
  const auto b = tdet::ground_forward(m, pairs.samples[0]);
  EXPECT_EQ(a.prob, b.prob);
  EXPECT_EQ(a.offset, b.offset);
}

TEST(GroundLoss, BceAndOffsetTerms) {
  tdet::GroundingSample pos;
  pos.label = 1;
  pos.offset_target = 0.25;
  EXPECT_NEAR(tdet::ground_loss({0.5, 0.25}, pos), std::log(2.0), 1e-15);
  EXPECT_NEAR(tdet::ground_loss({0.5, 0.75}, pos, 2.0), std::log(2.0) + 2.0 * 0.25, 1e-15);
  tdet::GroundingSample neg;
  neg.label = 0;
  EXPECT_EQ(tdet::ground_loss({0.3, 0.1}, neg), tdet::ground_loss({0.3, 0.9}, neg));
  EXPECT_NEAR(tdet::ground_loss({0.3, 0.9}, neg), -std::log(0.7), 1e-15);
}

TEST(GroundLoss, ClampsSaturatedProbabilities) {
  tdet::GroundingSample pos;
  pos.label = 1;
  pos.offset_target = 0.0;
  EXPECT_NEAR(tdet::ground_loss({0.0, 0.0}, pos), -std::log(tdet::kProbClamp), 1e-9);
  EXPECT_TRUE(std::isfinite(tdet::ground_loss({1.0, 0.0}, pos)));
  tdet::GroundingSample neg;
  neg.label = 0;
  EXPECT_NEAR(tdet::ground_loss({1.0, 0.0}, neg), -std::log(tdet::kProbClamp), 1e-6);
}

TEST(GroundingInference, NineteenCandidatesOverFullWindow) {
  tdet::Rng rng(7);
  const auto f = random_features(rng, 400, 6);
  const auto m = tdet::make_grounding_model(tdet::grounding_encoder_config(6), 3);
  const auto preds = tdet::infer_grounding(m, {"g", 1, 200, 210}, f, 5);
  ASSERT_EQ(preds.size(), 19u);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int s = 80 + 5 * static_cast<int>(i);
    EXPECT_GE(preds[i].time_s, s);
    EXPECT_LE(preds[i].time_s, s + 30);
    EXPECT_GT(preds[i].confidence, 0.0);
    EXPECT_LT(preds[i].confidence, 1.0);
  }
}

TEST(GroundingInference, WindowClippedAtZero) {
  tdet::Rng rng(8);
  const auto f = random_features(rng, 400, 6);
  const auto m = zero_model(6);
  EXPECT_TRUE(tdet::infer_grounding(m, {"g", 1, 0, 10}, f).empty());
  const auto preds = tdet::infer_grounding(m, {"g", 1, 45, 50}, f, 5);
  ASSERT_EQ(preds.size(), 4u);
  EXPECT_EQ(preds.front().time_s, 0);
  EXPECT_EQ(preds.back().time_s, 15);
  EXPECT_EQ(tdet::infer_grounding(m, {"g", 1, 10, 20}, f, 5).size(), 1u);
}

TEST(Grounding, PassesGradientCheck) {
  auto cfg = tdet::grounding_encoder_config(6);
  auto m = tdet::make_grounding_model(cfg, 4);
  EXPECT_LT(tdet::grounding_grad_check(m, 64, 1e-5, 5).max_relative_error, 1e-5);
}

std::vector<tdet::ReplayEpisode> toy_episodes() {
  tdet::SynthConfig c;
  c.length_s = 600;
  c.dim = 8;
  c.num_classes = 2;
  c.events_per_class = 2;
  c.min_event_gap_s = 100;
  std::vector<tdet::ReplayEpisode> eps;
  for (std::uint64_t s = 0; s < 2; ++s) {
    auto h = tdet::synth_generate(c, s, tdet::ClassVocabulary::soccernet_v2());
    auto f = std::make_shared<const tdet::FeatureSequence>(std::move(h.features));
    for (const auto& r : h.replays) eps.push_back({r, f});
  }
  return eps;
}

tdet::GroundingModel toy_model() {
  auto cfg = tdet::grounding_encoder_config(8);
  cfg.num_layers = 1;
  cfg.model_dim = 16;
  cfg.hidden_dim = 32;
  return tdet::make_grounding_model(cfg, 5);
}

TEST(GroundingTraining, LossDecreasesAndIsReproducible) {
  tdet::EpisodeSplits splits;
  splits.train = toy_episodes();
  tdet::GroundingTrainSpec spec;
  spec.epochs = 12;
  spec.batch_size = 8;
  spec.lr = 1e-3;
  spec.seed = 3;
  const auto a = tdet::train_grounding(splits, spec, toy_model());
  ASSERT_EQ(a.history.train_loss.size(), 12u);
  EXPECT_LT(a.history.train_loss.back(), a.history.train_loss.front());
  const auto b = tdet::train_grounding(splits, spec, toy_model());
  const auto vocab = tdet::ClassVocabulary::soccernet_v2().names();
  EXPECT_EQ(tdet::serialize_checkpoint(a.model.to_checkpoint(vocab, a.optimizer)),
            tdet::serialize_checkpoint(b.model.to_checkpoint(vocab, b.optimizer)));
}

TEST(GroundingTraining, EmptyAndMissingValidation) {
  tdet::GroundingTrainSpec spec;
  EXPECT_THROW(tdet::train_grounding({}, spec, toy_model()), tdet::Error);
  tdet::EpisodeSplits splits;
  splits.train = toy_episodes();
  spec.mode = tdet::TrainMode::regular;
  try {
    tdet::train_grounding(splits, spec, toy_model());
    FAIL();
  } catch (const tdet::Error& e) {
    EXPECT_EQ(e.kind(), tdet::ErrorKind::split);
  }
}

}  // namespace
