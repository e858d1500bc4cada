#include <gtest/gtest.h>

#include "tdet/spotting.hpp"
#include "tdet/synth.hpp"

namespace {

using tdet::MatrixD;

tdet::FeatureSequence random_features(tdet::Rng& rng, int T, int D) {
  tdet::FeatureSequence f;
  f.game_id = "g";
  f.data.resize(T, D);
  for (int i = 0; i < f.data.size(); ++i) f.data.data()[i] = static_cast<float>(rng.normal());
  f.source_dims = {D};
  return f;
}

tdet::SpottingModel zero_model(tdet::SpottingHead head) {
  auto m = tdet::make_spotting_model(head, 6, 8, 1);
  m.params.set_zero();
  return m;
}

TEST(Spotting, ZeroModelIsUniform) {
  tdet::Rng rng(1);
  for (auto head : {tdet::SpottingHead::transformer, tdet::SpottingHead::netvlad}) {
    const auto m = zero_model(head);
    const auto p = tdet::spot_forward(m, MatrixD(random_features(rng, 8, 6).data.cast<double>()));
    ASSERT_EQ(p.size(), 18);
    for (int j = 0; j < 18; ++j) EXPECT_NEAR(p(j), 1.0 / 18.0, 1e-15);
  }
}

TEST(Spotting, ThresholdOneYieldsNothing) {
  tdet::Rng rng(2);
  const auto m = zero_model(tdet::SpottingHead::transformer);
  EXPECT_TRUE(tdet::spot_game(m, random_features(rng, 60, 6), 8, 20, 1.0).empty());
}

TEST(Spotting, ScoreSeriesShapeAndShortInput) {
  tdet::Rng rng(3);
  const auto m = tdet::make_spotting_model(tdet::SpottingHead::transformer, 6, 7, 4);
  const auto s = tdet::spot_score_series(m, random_features(rng, 40, 6), 7);
  EXPECT_EQ(s.rows(), 40);
  EXPECT_EQ(s.cols(), 18);
  for (int r = 0; r < 40; ++r) EXPECT_NEAR(s.row(r).sum(), 1.0, 1e-5);
  EXPECT_EQ(tdet::spot_score_series(m, random_features(rng, 3, 6), 7).rows(), 3);
}

TEST(Spotting, SelectIgnoresBackgroundAndAppliesNms) {
  MatrixD s = MatrixD::Zero(50, 18);
  s.col(17).setConstant(0.9);
  s(10, 3) = 0.6;
  s(12, 3) = 0.7;
  s(40, 3) = 0.2;
  s(10, 4) = 0.3;
  const auto out = tdet::select_spots(s, "g", 2, 0.25, 20);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].time_s, 10);
  EXPECT_EQ(out[0].class_index, 4);
  EXPECT_EQ(out[1].time_s, 12);
  EXPECT_EQ(out[1].half, 2);
}

TEST(Spotting, MonotoneRescalingKeepsSelection) {
  tdet::Rng rng(4);
  MatrixD s(80, 18);
  for (int i = 0; i < s.size(); ++i) s.data()[i] = rng.uniform();
  const auto a = tdet::select_spots(s, "g", 1, 0.5, 10);
  const MatrixD sq = s.array().square();
  auto b = tdet::select_spots(sq, "g", 1, 0.25, 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].time_s, b[i].time_s);
    EXPECT_EQ(a[i].class_index, b[i].class_index);
  }
}

TEST(Spotting, HeadsPassGradientCheck) {
  auto t = tdet::make_spotting_model(tdet::SpottingHead::transformer, 8, 7, 5);
  EXPECT_LT(tdet::spotting_grad_check(t, 7, 64, 1e-5, 6).max_relative_error, 1e-5);
  auto n = tdet::make_netvlad_spotter({8, 4, 18}, 8, 7);
  EXPECT_LT(tdet::spotting_grad_check(n, 8, 64, 1e-5, 8).max_relative_error, 1e-5);
}

struct ToyData {
  tdet::ChunkSplits splits;
  tdet::SynthHalf half;
};

ToyData toy_data() {
  tdet::SynthConfig c;
  c.length_s = 300;
  c.dim = 8;
  c.num_classes = 2;
  c.events_per_class = 3;
  c.replay_fraction = 0.0;
  ToyData d;
  d.half = tdet::synth_generate(c, 3, tdet::ClassVocabulary::soccernet_v2());
  d.splits.train = tdet::make_chunks(d.half.features, d.half.events, 7, 7);
  return d;
}

tdet::TrainSpec toy_spec() {
  tdet::TrainSpec s;
  s.epochs = 4;
  s.batch_size = 8;
  s.seed = 11;
  return s;
}

tdet::EncoderConfig toy_encoder() {
  auto e = tdet::spotting_encoder_config(8);
  e.num_layers = 1;
  e.model_dim = 16;
  e.hidden_dim = 32;
  return e;
}

TEST(SpottingTraining, LossDecreases) {
  const auto d = toy_data();
  auto spec = toy_spec();
  spec.epochs = 15;
  const auto r = tdet::train_spotting(d.splits, spec, tdet::make_transformer_spotter(toy_encoder(), 7, 2));
  ASSERT_EQ(r.history.train_loss.size(), 15u);
  EXPECT_LT(r.history.train_loss.back(), r.history.train_loss.front());
  EXPECT_EQ(r.history.selected_epoch, 15);
}

TEST(SpottingTraining, BitReproducible) {
  const auto d = toy_data();
  const auto init = tdet::make_transformer_spotter(toy_encoder(), 7, 2);
  const auto a = tdet::train_spotting(d.splits, toy_spec(), init);
  const auto b = tdet::train_spotting(d.splits, toy_spec(), init);
  const auto vocab = tdet::ClassVocabulary::soccernet_v2().names();
  EXPECT_EQ(tdet::serialize_checkpoint(a.model.to_checkpoint(vocab, a.optimizer)),
            tdet::serialize_checkpoint(b.model.to_checkpoint(vocab, b.optimizer)));
}

TEST(SpottingTraining, RegularModeSelectsBestValidationEpoch) {
  auto d = toy_data();
  d.splits.valid = d.splits.train;
  auto spec = toy_spec();
  spec.mode = tdet::TrainMode::regular;
  const auto r = tdet::train_spotting(d.splits, spec, tdet::make_transformer_spotter(toy_encoder(), 7, 2));
  ASSERT_EQ(r.history.valid_loss.size(), 4u);
  const auto best = std::min_element(r.history.valid_loss.begin(), r.history.valid_loss.end());
  EXPECT_EQ(r.history.selected_epoch, static_cast<int>(best - r.history.valid_loss.begin()) + 1);
}

TEST(SpottingTraining, EmptyDatasetRejected) {
  try {
    tdet::train_spotting({}, toy_spec(), tdet::SpottingHead::transformer);
    FAIL();
  } catch (const tdet::Error& e) {
    EXPECT_EQ(e.kind(), tdet::ErrorKind::empty_dataset);
  }
}

TEST(SpottingTraining, NoiselessEventIsFound) {
  tdet::SynthConfig c;
  c.length_s = 200;
  c.dim = 8;
  c.num_classes = 1;
  c.noise_sigma = 0.0;
  c.replay_fraction = 0.0;
  c.fixed_events = {{50, 0}};
  const auto vocab = tdet::ClassVocabulary::soccernet_v2();
  std::vector<tdet::Chunk> train;
  for (int s = 0; s < 6; ++s) {
    c.fixed_events = {{30 + 25 * s, 0}};
    const auto h = tdet::synth_generate(c, static_cast<std::uint64_t>(s), vocab);
    for (auto& ch : tdet::make_chunks(h.features, h.events, 7, 1)) train.push_back(std::move(ch));
  }
  auto spec = toy_spec();
  spec.epochs = 20;
  spec.batch_size = 32;
  spec.lr = 1e-3;
  spec.mixup_alpha = 0.0;
  const auto r = tdet::train_spotting({train, {}, {}}, spec, tdet::make_transformer_spotter(toy_encoder(), 7, 3));
  c.fixed_events = {{50, 0}};
  const auto test = tdet::synth_generate(c, 99, vocab);
  const auto preds = tdet::spot_game(r.model, test.features, 7, 20, 0.5);
  ASSERT_EQ(preds.size(), 1u);
  EXPECT_NEAR(preds[0].time_s, 50, 2);
  EXPECT_EQ(preds[0].class_index, test.events[0].class_index);
}

}  // namespace
