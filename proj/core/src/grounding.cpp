#include "tdet/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tdet/snippets.hpp"

namespace tdet {

using nlohmann::json;

MatrixF replay_clip(const FeatureSequence& features, const ReplayAnnotation& replay, int length) {
  const int rows = std::max(0, (replay.replay_end_s - replay.replay_start_s) * features.fps);
  MatrixF clip = extract_window(features.data, replay.replay_start_s * features.fps,
                                std::min(rows, length));
  if (clip.rows() == length) return clip;
  MatrixF out = MatrixF::Zero(length, features.dim());
  out.topRows(clip.rows()) = clip;
  return out;
}

namespace {

struct Window {
  int lo = 0;     // earliest chunk start
  int s_max = 0;  // latest chunk start
  int hi = 0;     // replay start
};

Window candidate_window(int replay_start_s, const GroundingSampling& s) {
  Window w;
  w.hi = replay_start_s;
  w.lo = std::max(0, replay_start_s - s.window_s);
  w.s_max = std::max(w.lo, replay_start_s - s.chunk_s);
  return w;
}

}  // namespace

GroundingPairs sample_grounding_pairs(const ReplayAnnotation& replay,
                                      const FeatureSequence& features, Rng& rng,
                                      const GroundingSampling& sampling) {
  GroundingPairs out;
  if (sampling.chunk_s < 1 || sampling.window_s < sampling.chunk_s) {
    throw Error(ErrorKind::domain, "grounding window must hold at least one chunk");
  }
  const Window w = candidate_window(replay.replay_start_s, sampling);
  const int e = replay.event_time_s;
  if (e < w.lo || e >= w.hi) {
    out.skipped = true;
    out.reason = "event outside the candidate window";
    return out;
  }
  const int fps = features.fps;
  const MatrixF clip = replay_clip(features, replay, sampling.replay_len_s * fps);
  const auto make = [&](int start, bool positive) {
    GroundingSample s;
    s.candidate = extract_window(features.data, start * fps, sampling.chunk_s * fps);
    s.replay = clip;
    s.label = positive ? 1 : 0;
    if (positive) s.offset_target = static_cast<double>(e - start) / sampling.chunk_s;
    s.candidate_start_s = start;
    return s;
  };

  const int pos_lo = std::max(e - sampling.chunk_s + 1, w.lo);
  const int pos_hi = std::min(e, w.s_max);
  if (pos_lo > pos_hi) {
    out.skipped = true;
    out.reason = "no candidate chunk contains the event";
    return out;
  }
  for (int i = 0; i < sampling.positives; ++i) {
    out.samples.push_back(make(rng.uniform_int(pos_lo, pos_hi), true));
  }
  std::vector<int> negatives;
  for (int s = w.lo; s <= w.s_max; ++s) {
    if (e < s || e >= s + sampling.chunk_s) negatives.push_back(s);
  }
  if (!negatives.empty()) {
    for (int i = 0; i < sampling.negatives; ++i) {
      const int k = rng.uniform_int(0, static_cast<int>(negatives.size()) - 1);
      out.samples.push_back(make(negatives[static_cast<std::size_t>(k)], false));
    }
  }
  return out;
}

EncoderConfig grounding_encoder_config(int input_dim) {
  EncoderConfig c;
  c.num_layers = 4;
  c.num_heads = 4;
  c.model_dim = 32;
  c.hidden_dim = 128;
  c.input_dim = input_dim;
  c.output_dim = 2;
  c.dropout_p = 0.1;
  c.num_segments = 2;
  return c;
}

GroundingModel make_grounding_model(const EncoderConfig& config, std::uint64_t seed,
                                    const GroundingSampling& sampling) {
  if (config.output_dim != 2 || config.num_segments != 2) {
    throw Error(ErrorKind::shape, "grounding encoder needs 2 outputs and 2 segments");
  }
  GroundingModel m;
  m.encoder = config;
  m.sampling = sampling;
  Rng rng(seed);
  m.params = init_encoder_params(config, rng);
  return m;
}

Checkpoint GroundingModel::to_checkpoint(const std::vector<std::string>& vocabulary,
                                         const std::optional<AdamState>& optimizer) const {
  Checkpoint ck;
  ck.head = "grounding_transformer";
  ck.vocabulary = vocabulary;
  ck.params = params;
  ck.optimizer = optimizer;
  ck.config = {{"encoder", encoder_config_to_json(encoder)},
               {"sampling",
                {{"chunk_s", sampling.chunk_s},
                 {"window_s", sampling.window_s},
                 {"positives", sampling.positives},
                 {"negatives", sampling.negatives},
                 {"replay_len_s", sampling.replay_len_s}}}};
  return ck;
}

GroundingModel GroundingModel::from_checkpoint(const Checkpoint& ck) {
  if (ck.head != "grounding_transformer") {
    throw Error(ErrorKind::format, "checkpoint head '" + ck.head + "' is not a grounding head");
  }
  GroundingModel m;
  try {
    m.encoder = encoder_config_from_json(ck.config.at("encoder"));
    const auto& s = ck.config.at("sampling");
    m.sampling.chunk_s = s.at("chunk_s").get<int>();
    m.sampling.window_s = s.at("window_s").get<int>();
    m.sampling.positives = s.at("positives").get<int>();
    m.sampling.negatives = s.at("negatives").get<int>();
    m.sampling.replay_len_s = s.at("replay_len_s").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, std::string("grounding checkpoint config: ") + e.what());
  }
  if (m.encoder.output_dim != 2 || m.encoder.num_segments != 2) {
    throw Error(ErrorKind::format, "grounding checkpoint encoder has the wrong output layout");
  }
  if (!make_encoder_params(m.encoder).same_shape(ck.params)) {
    throw Error(ErrorKind::format, "checkpoint tensors do not match the encoder config");
  }
  m.params = ck.params;
  return m;
}

MatrixD grounding_input(const MatrixF& candidate, const MatrixF& replay, std::vector<int>& segments) {
  if (candidate.cols() != replay.cols()) {
    throw Error(ErrorKind::shape, "candidate and replay widths differ");
  }
  MatrixD x(candidate.rows() + replay.rows(), candidate.cols());
  x.topRows(candidate.rows()) = candidate.cast<double>();
  x.bottomRows(replay.rows()) = replay.cast<double>();
  segments.assign(static_cast<std::size_t>(x.rows()), 1);
  std::fill_n(segments.begin(), candidate.rows(), 0);
  return x;
}

GroundingOutput ground_forward(const GroundingModel& model, const GroundingSample& sample) {
  std::vector<int> seg;
  const MatrixD x = grounding_input(sample.candidate, sample.replay, seg);
  const RowVectorD z = encoder_forward<double>(model.params, model.encoder, x, seg);
  return {sigmoid(z(0)), z(1)};
}

double ground_loss(const GroundingOutput& prediction, const GroundingSample& sample,
                   double offset_weight) {
  const double p = std::clamp(prediction.prob, kProbClamp, 1.0 - kProbClamp);
  const double y = sample.label ? 1.0 : 0.0;
  double loss = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  if (sample.label && sample.offset_target) {
    const double d = prediction.offset - *sample.offset_target;
    loss += offset_weight * d * d;
  }
  return loss;
}

double grounding_sample_loss(const GroundingModel& model, const GroundingSample& sample,
                             double offset_weight, bool train_mode, Rng* rng, Params* grads) {
  std::vector<int> seg;
  const MatrixD x = grounding_input(sample.candidate, sample.replay, seg);
  EncoderCache cache;
  const RowVectorD z = encoder_forward<double>(model.params, model.encoder, x, seg, train_mode, rng,
                                               grads ? &cache : nullptr);
  const GroundingOutput out{sigmoid(z(0)), z(1)};
  const double loss = ground_loss(out, sample, offset_weight);
  if (grads) {
    RowVectorD up = RowVectorD::Zero(2);
    const double y = sample.label ? 1.0 : 0.0;
    if (out.prob > kProbClamp && out.prob < 1.0 - kProbClamp) up(0) = out.prob - y;
    if (sample.label && sample.offset_target) {
      up(1) = 2.0 * offset_weight * (out.offset - *sample.offset_target);
    }
    encoder_backward(model.params, cache, up, *grads);
  }
  return loss;
}

namespace {

std::vector<GroundingSample> draw_pairs(const std::vector<const ReplayEpisode*>& episodes,
                                        const GroundingSampling& sampling, Rng& rng,
                                        std::size_t* skipped) {
  std::vector<GroundingSample> out;
  for (const auto* ep : episodes) {
    GroundingPairs p = sample_grounding_pairs(ep->replay, *ep->features, rng, sampling);
    if (p.skipped && skipped) ++*skipped;
    for (auto& s : p.samples) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

GroundingTrainResult train_grounding(const EpisodeSplits& splits, const GroundingTrainSpec& spec,
                                     GroundingModel model) {
  if (spec.epochs < 1 || spec.batch_size < 1 || !(spec.lr > 0)) {
    throw Error(ErrorKind::domain, "training needs epochs >= 1, batch >= 1 and lr > 0");
  }
  std::vector<const ReplayEpisode*> pool;
  const auto add = [&](const std::vector<ReplayEpisode>& v) {
    for (const auto& e : v) pool.push_back(&e);
  };
  add(splits.train);
  if (spec.mode == TrainMode::ultra) {
    add(splits.valid);
    add(splits.test);
  } else if (splits.valid.empty()) {
    throw Error(ErrorKind::split, "regular mode needs a non-empty validation split");
  }
  if (pool.empty()) throw Error(ErrorKind::empty_dataset, "no training replays");
  for (const auto* e : pool) {
    if (!e->features) throw Error(ErrorKind::consistency, "replay episode without features");
    if (e->features->dim() != model.encoder.input_dim) {
      throw Error(ErrorKind::shape, "feature width does not match the model input");
    }
  }

  Rng rng(derive_seed(spec.seed, 0x67726e64ULL));
  std::vector<GroundingSample> valid;
  if (spec.mode == TrainMode::regular) {
    std::vector<const ReplayEpisode*> vp;
    for (const auto& e : splits.valid) vp.push_back(&e);
    Rng vrng(derive_seed(spec.seed, 0x76616c64ULL));
    valid = draw_pairs(vp, model.sampling, vrng, nullptr);
  }

  AdamState opt = AdamState::for_params(model.params);
  const AdamConfig adam{spec.lr};
  Params grads = model.params.zeros_like();
  GroundingTrainResult result{model, opt, {}, 0};
  double best_valid = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
    std::size_t skipped = 0;
    std::vector<GroundingSample> samples = draw_pairs(pool, model.sampling, rng, &skipped);
    if (epoch == 1) result.skipped_replays = skipped;
    if (samples.empty()) throw Error(ErrorKind::empty_dataset, "no replay produced training pairs");
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(spec.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(spec.batch_size));
      grads.set_zero();
      for (std::size_t i = b; i < e; ++i) {
        epoch_loss += grounding_sample_loss(model, samples[order[i]], spec.offset_weight, true, &rng,
                                            &grads);
      }
      grads *= 1.0 / static_cast<double>(e - b);
      adam_step(model.params, grads, opt, adam);
    }
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(samples.size()));

    if (spec.mode == TrainMode::regular) {
      double v = 0.0;
      for (const auto& s : valid) {
        v += grounding_sample_loss(model, s, spec.offset_weight, false, nullptr, nullptr);
      }
      v = valid.empty() ? 0.0 : v / static_cast<double>(valid.size());
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
  return result;
}

std::vector<GroundingPrediction> infer_grounding(const GroundingModel& model,
                                                 const ReplayQuery& query,
                                                 const FeatureSequence& features, int stride_s) {
  if (stride_s < 1) throw Error(ErrorKind::domain, "grounding stride must be >= 1");
  if (features.dim() != model.encoder.input_dim) {
    throw Error(ErrorKind::shape, "feature width does not match the model input");
  }
  const GroundingSampling& sp = model.sampling;
  const int fps = features.fps;
  ReplayAnnotation r;
  r.replay_start_s = query.start_s;
  r.replay_end_s = query.end_s;
  const MatrixF clip = replay_clip(features, r, sp.replay_len_s * fps);
  const ParamSet<float> params = model.params.cast<float>();
  const Window w = candidate_window(query.start_s, sp);

  std::vector<GroundingPrediction> out;
  if (w.hi <= w.lo) return out;
  std::vector<int> seg;
  MatrixF x(sp.chunk_s * fps + clip.rows(), features.dim());
  x.bottomRows(clip.rows()) = clip;
  seg.assign(static_cast<std::size_t>(x.rows()), 1);
  std::fill_n(seg.begin(), sp.chunk_s * fps, 0);
  for (int s = w.lo; s <= w.s_max; s += stride_s) {
    x.topRows(sp.chunk_s * fps) = extract_window(features.data, s * fps, sp.chunk_s * fps);
    const RowVector<float> z = encoder_forward<float>(params, model.encoder, x, seg);
    const double prob = sigmoid(static_cast<double>(z(0)));
    const double off = std::clamp(static_cast<double>(z(1)), 0.0, 1.0);
    const int t = s + static_cast<int>(std::lround(sp.chunk_s * off));
    out.push_back({query.game_id, query.half, t, prob});
  }
  return out;
}

GradCheckReport grounding_grad_check(GroundingModel& model, int trials, double h,
                                     std::uint64_t seed, double offset_weight) {
  Rng rng(seed);
  const int d = model.encoder.input_dim;
  const auto random = [&](int rows) {
    MatrixF m(rows, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.normal());
    return m;
  };
  GroundingSample sample;
  sample.candidate = random(model.sampling.chunk_s);
  sample.replay = random(model.sampling.replay_len_s);
  sample.label = 1;
  sample.offset_target = rng.uniform();
  const GroundingModel* self = &model;
  const LossFunction loss = [&](const Params& p, Params* grads) {
    if (&p == &self->params) {
      return grounding_sample_loss(*self, sample, offset_weight, false, nullptr, grads);
    }
    GroundingModel probe = *self;
    probe.params = p;
    return grounding_sample_loss(probe, sample, offset_weight, false, nullptr, grads);
  };
  return grad_check(model.params, loss, trials, h, derive_seed(seed, 2));
}

}  // namespace tdet
