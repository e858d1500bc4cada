#include "tdet/spotting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tdet/snippets.hpp"

namespace tdet {

using nlohmann::json;

std::string to_string(TrainMode mode) { return mode == TrainMode::ultra ? "ultra" : "regular"; }
std::string to_string(SpottingHead head) {
  return head == SpottingHead::transformer ? "transformer" : "netvlad";
}
TrainMode parse_train_mode(const std::string& text) {
  if (text == "ultra") return TrainMode::ultra;
  if (text == "regular") return TrainMode::regular;
  throw Error(ErrorKind::parse, "unknown training mode '" + text + "'");
}
SpottingHead parse_spotting_head(const std::string& text) {
  if (text == "transformer") return SpottingHead::transformer;
  if (text == "netvlad") return SpottingHead::netvlad;
  throw Error(ErrorKind::parse, "unknown spotting head '" + text + "'");
}

TrainSpec TrainSpec::defaults(SpottingHead head, TrainMode mode) {
  TrainSpec s;
  s.mode = mode;
  if (head == SpottingHead::netvlad) {
    s.lr = 1e-4;
    s.epochs = 40;
  } else {
    s.lr = 5e-4;
    s.epochs = 50;
  }
  return s;
}

EncoderConfig spotting_encoder_config(int input_dim) {
  EncoderConfig c;
  c.num_layers = 3;
  c.num_heads = 4;
  c.model_dim = 64;
  c.hidden_dim = 256;
  c.input_dim = input_dim;
  c.output_dim = kNumClasses;
  c.dropout_p = 0.1;
  return c;
}

SpottingModel make_transformer_spotter(const EncoderConfig& config, int chunk_size_s,
                                       std::uint64_t seed) {
  if (config.output_dim != kNumClasses) {
    throw Error(ErrorKind::shape, "spotting transformer must produce 18 outputs");
  }
  SpottingModel m;
  m.head = SpottingHead::transformer;
  m.encoder = config;
  Rng rng(seed);
  m.params = init_encoder_params(config, rng);
  m.chunk_size_s = chunk_size_s;
  return m;
}

SpottingModel make_netvlad_spotter(const NetVladConfig& config, int chunk_size_s,
                                   std::uint64_t seed) {
  if (config.output_dim != kNumClasses) {
    throw Error(ErrorKind::shape, "spotting NetVLAD head must produce 18 outputs");
  }
  SpottingModel m;
  m.head = SpottingHead::netvlad;
  m.netvlad = config;
  Rng rng(seed);
  m.params = init_netvlad_params(config, rng);
  m.chunk_size_s = chunk_size_s;
  return m;
}

SpottingModel make_spotting_model(SpottingHead head, int input_dim, int chunk_size_s,
                                  std::uint64_t seed) {
  if (head == SpottingHead::transformer) {
    return make_transformer_spotter(spotting_encoder_config(input_dim), chunk_size_s, seed);
  }
  NetVladConfig c;
  c.input_dim = input_dim;
  return make_netvlad_spotter(c, chunk_size_s, seed);
}

Checkpoint SpottingModel::to_checkpoint(const std::vector<std::string>& vocabulary,
                                        const std::optional<AdamState>& optimizer) const {
  Checkpoint ck;
  ck.vocabulary = vocabulary;
  ck.params = params;
  ck.optimizer = optimizer;
  if (head == SpottingHead::transformer) {
    ck.head = "spotting_transformer";
    ck.config = {{"encoder", encoder_config_to_json(encoder)}, {"chunk_size_s", chunk_size_s}};
  } else {
    ck.head = "spotting_netvlad";
    ck.config = {{"netvlad",
                  {{"input_dim", netvlad.input_dim},
                   {"clusters", netvlad.clusters},
                   {"output_dim", netvlad.output_dim}}},
                 {"chunk_size_s", chunk_size_s}};
  }
  return ck;
}

SpottingModel SpottingModel::from_checkpoint(const Checkpoint& ck) {
  SpottingModel m;
  try {
    m.chunk_size_s = ck.config.at("chunk_size_s").get<int>();
    if (ck.head == "spotting_transformer") {
      m.head = SpottingHead::transformer;
      m.encoder = encoder_config_from_json(ck.config.at("encoder"));
      const Params expected = make_encoder_params(m.encoder);
      if (!expected.same_shape(ck.params)) {
        throw Error(ErrorKind::format, "checkpoint tensors do not match the encoder config");
      }
    } else if (ck.head == "spotting_netvlad") {
      m.head = SpottingHead::netvlad;
      const auto& j = ck.config.at("netvlad");
      m.netvlad.input_dim = j.at("input_dim").get<int>();
      m.netvlad.clusters = j.at("clusters").get<int>();
      m.netvlad.output_dim = j.at("output_dim").get<int>();
      if (!make_netvlad_params(m.netvlad).same_shape(ck.params)) {
        throw Error(ErrorKind::format, "checkpoint tensors do not match the NetVLAD config");
      }
    } else {
      throw Error(ErrorKind::format, "checkpoint head '" + ck.head + "' is not a spotting head");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("spotting checkpoint config: ") + e.what());
  }
  m.params = ck.params;
  return m;
}

namespace {

template <class Scalar>
RowVector<Scalar> head_logits(const SpottingModel& m, const ParamSet<Scalar>& params,
                              const Matrix<Scalar>& x, bool train, Rng* rng,
                              EncoderCache* enc_cache, NetVladCache* nv_cache) {
  if (m.head == SpottingHead::transformer) {
    return encoder_forward<Scalar>(params, m.encoder, x, {}, train, rng, enc_cache);
  }
  return netvlad_forward<Scalar>(params, m.netvlad, x, nv_cache);
}

RowVectorD softmax(const RowVectorD& logits) {
  RowVectorD p = logits;
  softmax_rows_inplace(p);
  return p;
}

double mean_loss(const SpottingModel& m, const std::vector<Chunk>& chunks) {
  if (chunks.empty()) return 0.0;
  double total = 0.0;
  for (const auto& c : chunks) {
    total += spotting_loss(m, c.features.cast<double>(), c.target, false, nullptr, nullptr);
  }
  return total / static_cast<double>(chunks.size());
}

}  // namespace

double spotting_loss(const SpottingModel& m, const MatrixD& x, const RowVectorD& target,
                     bool train_mode, Rng* rng, Params* grads) {
  if (target.size() != kNumClasses) throw Error(ErrorKind::shape, "spotting target must be 18-dim");
  EncoderCache enc;
  NetVladCache nv;
  const RowVectorD logits = head_logits<double>(m, m.params, x, train_mode, rng,
                                                grads ? &enc : nullptr, grads ? &nv : nullptr);
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  const double mass = target.sum();
  const double loss = lse * mass - target.dot(logits);
  if (grads) {
    const RowVectorD p = (logits.array() - lse).exp().matrix();
    const RowVectorD up = p * mass - target;
    if (m.head == SpottingHead::transformer) {
      encoder_backward(m.params, enc, up, *grads);
    } else {
      netvlad_backward(m.params, nv, up, *grads);
    }
  }
  return loss;
}

RowVectorD spot_forward(const SpottingModel& m, const MatrixD& x) {
  return softmax(head_logits<double>(m, m.params, x, false, nullptr, nullptr, nullptr));
}

RowVectorD spot_forward(const SpottingModel& m, const Chunk& chunk) {
  return spot_forward(m, chunk.features.cast<double>());
}

SpottingTrainResult train_spotting(const ChunkSplits& splits, const TrainSpec& spec,
                                   SpottingModel model) {
  if (spec.epochs < 1 || spec.batch_size < 1 || !(spec.lr > 0)) {
    throw Error(ErrorKind::domain, "training needs epochs >= 1, batch >= 1 and lr > 0");
  }
  std::vector<const Chunk*> pool;
  const auto add = [&](const std::vector<Chunk>& v) {
    for (const auto& c : v) pool.push_back(&c);
  };
  add(splits.train);
  if (spec.mode == TrainMode::ultra) {
    add(splits.valid);
    add(splits.test);
  } else if (splits.valid.empty()) {
    throw Error(ErrorKind::split, "regular mode needs a non-empty validation split");
  }
  if (pool.empty()) throw Error(ErrorKind::empty_dataset, "no training chunks");
  for (const auto* c : pool) {
    if (c->features.cols() != model.input_dim()) {
      throw Error(ErrorKind::shape, "chunk width does not match the model input");
    }
  }

  Rng rng(derive_seed(spec.seed, 0x7261696eULL));
  AdamState opt = AdamState::for_params(model.params);
  const AdamConfig adam{spec.lr};
  Params grads = model.params.zeros_like();
  SpottingTrainResult result{model, opt, {}};
  double best_valid = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> partner = order;
  for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    if (spec.mixup_alpha > 0) std::shuffle(partner.begin(), partner.end(), rng.engine());
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(spec.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(spec.batch_size));
      grads.set_zero();
      for (std::size_t i = b; i < e; ++i) {
        const Chunk& a = *pool[order[i]];
        double loss;
        if (spec.mixup_alpha > 0) {
          const Chunk mixed = mixup(a, *pool[partner[i]], spec.mixup_alpha, rng);
          loss = spotting_loss(model, mixed.features.cast<double>(), mixed.target, true, &rng, &grads);
        } else {
          loss = spotting_loss(model, a.features.cast<double>(), a.target, true, &rng, &grads);
        }
        epoch_loss += loss;
      }
      grads *= 1.0 / static_cast<double>(e - b);
      adam_step(model.params, grads, opt, adam);
    }
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

    if (spec.mode == TrainMode::regular) {
      const double v = mean_loss(model, splits.valid);
      result.history.valid_loss.push_back(v);
      if (v < best_valid) {
        best_valid = v;
        result.model = model;
        result.optimizer = opt;
        result.history.selected_epoch = epoch;
      }
    }
  }
  if (spec.mode == TrainMode::ultra) {
    result.model = std::move(model);
    result.optimizer = std::move(opt);
    result.history.selected_epoch = spec.epochs;
  }
  result.model.chunk_size_s = spec.chunk_size_s;
  return result;
}

SpottingTrainResult train_spotting(const ChunkSplits& splits, const TrainSpec& spec,
                                   SpottingHead head) {
  const std::vector<Chunk>* any = !splits.train.empty() ? &splits.train
                                  : !splits.valid.empty() ? &splits.valid
                                                          : &splits.test;
  if (any->empty()) throw Error(ErrorKind::empty_dataset, "no training chunks");
  const int dim = static_cast<int>(any->front().features.cols());
  return train_spotting(splits, spec,
                        make_spotting_model(head, dim, spec.chunk_size_s, derive_seed(spec.seed, 1)));
}

MatrixD spot_score_series(const SpottingModel& m, const FeatureSequence& features,
                          int chunk_size_s) {
  if (features.dim() != m.input_dim()) {
    throw Error(ErrorKind::shape, "feature width does not match the model input");
  }
  const ParamSet<float> params = m.params.cast<float>();
  const int rows = chunk_size_s * features.fps;
  const int T = features.length();
  MatrixD scores(T, kNumClasses);
  for (int c = 0; c < T; ++c) {
    const MatrixF window = extract_window(features.data, c - rows / 2, rows);
    RowVector<float> logits = head_logits<float>(m, params, window, false, nullptr, nullptr, nullptr);
    softmax_rows_inplace(logits);
    scores.row(c) = logits.cast<double>();
  }
  return scores;
}

std::vector<SpotPrediction> select_spots(const MatrixD& scores, const std::string& game_id,
                                         int half, double threshold, int nms_window_s) {
  std::vector<SpotPrediction> candidates;
  const int classes = std::min<int>(static_cast<int>(scores.cols()), kNumEventClasses);
  for (Eigen::Index t = 0; t < scores.rows(); ++t) {
    for (int k = 0; k < classes; ++k) {
      const double s = scores(t, k);
      if (s >= threshold) {
        candidates.push_back({game_id, half, static_cast<int>(t), k, std::clamp(s, 0.0, 1.0)});
      }
    }
  }
  return nms_1d(candidates, nms_window_s);
}

std::vector<SpotPrediction> spot_game(const SpottingModel& model, const FeatureSequence& features,
                                      int chunk_size_s, int nms_window_s, double threshold) {
  return select_spots(spot_score_series(model, features, chunk_size_s), features.game_id,
                      features.half, threshold, nms_window_s);
}

GradCheckReport spotting_grad_check(SpottingModel& model, int length, int trials, double h,
                                    std::uint64_t seed) {
  Rng rng(seed);
  MatrixD x(length, model.input_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  RowVectorD target(kNumClasses);
  for (int k = 0; k < kNumClasses; ++k) target(k) = rng.uniform(0.1, 1.0);
  target /= target.sum();
  const SpottingModel* self = &model;
  const LossFunction loss = [&](const Params& p, Params* grads) {
    if (&p == &self->params) return spotting_loss(*self, x, target, false, nullptr, grads);
    SpottingModel probe = *self;
    probe.params = p;
    return spotting_loss(probe, x, target, false, nullptr, grads);
  };
  return grad_check(model.params, loss, trials, h, derive_seed(seed, 2));
}

}  // namespace tdet
