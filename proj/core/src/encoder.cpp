#include "tdet/encoder.hpp"

#include <cmath>
#include <type_traits>

namespace tdet {

void xavier_uniform(MatrixD& w, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-a, a);
}

void EncoderConfig::validate() const {
  if (num_layers < 1 || num_heads < 1 || model_dim < 1 || hidden_dim < 1 || input_dim < 1 ||
      output_dim < 1) {
    throw Error(ErrorKind::shape, "encoder dimensions must all be positive");
  }
  if (model_dim % num_heads != 0) {
    throw Error(ErrorKind::shape, "model_dim " + std::to_string(model_dim) +
                                      " is not divisible by num_heads " + std::to_string(num_heads));
  }
  if (model_dim % 2 != 0) throw Error(ErrorKind::shape, "model_dim must be even");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw Error(ErrorKind::domain, "dropout_p must lie in [0, 1)");
  }
  if (num_segments < 0) throw Error(ErrorKind::shape, "num_segments must be >= 0");
}

Params make_encoder_params(const EncoderConfig& cfg, EncoderLayout* layout) {
  cfg.validate();
  const int d = cfg.model_dim;
  Params p;
  EncoderLayout lay;
  lay.in_w = p.add("input.weight", cfg.input_dim, d);
  lay.in_b = p.add("input.bias", 1, d);
  if (cfg.num_segments > 0) {
    lay.has_segment = true;
    lay.segment = p.add("segment.embedding", cfg.num_segments, d);
  }
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    EncoderLayout::Layer L{};
    L.q_w = p.add(pre + "attn.q.weight", d, d);
    L.q_b = p.add(pre + "attn.q.bias", 1, d);
    L.k_w = p.add(pre + "attn.k.weight", d, d);
    L.v_w = p.add(pre + "attn.v.weight", d, d);
    L.v_b = p.add(pre + "attn.v.bias", 1, d);
    L.o_w = p.add(pre + "attn.out.weight", d, d);
    L.o_b = p.add(pre + "attn.out.bias", 1, d);
    L.ln1_g = p.add(pre + "norm1.scale", 1, d);
    L.ln1_b = p.add(pre + "norm1.shift", 1, d);
    L.ff1_w = p.add(pre + "ff1.weight", d, cfg.hidden_dim);
    L.ff1_b = p.add(pre + "ff1.bias", 1, cfg.hidden_dim);
    L.ff2_w = p.add(pre + "ff2.weight", cfg.hidden_dim, d);
    L.ff2_b = p.add(pre + "ff2.bias", 1, d);
    L.ln2_g = p.add(pre + "norm2.scale", 1, d);
    L.ln2_b = p.add(pre + "norm2.shift", 1, d);
    lay.layers.push_back(L);
  }
  lay.out_w = p.add("output.weight", d, cfg.output_dim);
  lay.out_b = p.add("output.bias", 1, cfg.output_dim);
  if (layout) *layout = std::move(lay);
  return p;
}

EncoderLayout encoder_layout(const EncoderConfig& config) {
  // Index arithmetic mirrors make_encoder_params without allocating tensors.
  config.validate();
  EncoderLayout lay;
  std::size_t i = 0;
  lay.in_w = i++;
  lay.in_b = i++;
  if (config.num_segments > 0) {
    lay.has_segment = true;
    lay.segment = i++;
  }
  for (int l = 0; l < config.num_layers; ++l) {
    EncoderLayout::Layer L{};
    L.q_w = i++;
    L.q_b = i++;
    L.k_w = i++;
    L.v_w = i++;
    L.v_b = i++;
    L.o_w = i++;
    L.o_b = i++;
    L.ln1_g = i++;
    L.ln1_b = i++;
    L.ff1_w = i++;
    L.ff1_b = i++;
    L.ff2_w = i++;
    L.ff2_b = i++;
    L.ln2_g = i++;
    L.ln2_b = i++;
    lay.layers.push_back(L);
  }
  lay.out_w = i++;
  lay.out_b = i++;
  return lay;
}

Params init_encoder_params(const EncoderConfig& config, Rng& rng) {
  EncoderLayout lay;
  Params p = make_encoder_params(config, &lay);
  xavier_uniform(p[lay.in_w], rng);
  if (lay.has_segment) {
    for (Eigen::Index i = 0; i < p[lay.segment].size(); ++i) {
      p[lay.segment].data()[i] = rng.normal(0.0, 0.1);
    }
  }
  for (const auto& L : lay.layers) {
    for (auto idx : {L.q_w, L.k_w, L.v_w, L.o_w, L.ff1_w, L.ff2_w}) xavier_uniform(p[idx], rng);
    p[L.ln1_g].setOnes();
    p[L.ln2_g].setOnes();
  }
  xavier_uniform(p[lay.out_w], rng);
  return p;
}

namespace {

template <class Scalar>
void check_finite(const Matrix<Scalar>& m, const std::string& where) {
  if (!m.allFinite()) throw Error(ErrorKind::numeric, "non-finite activation in " + where);
}

template <class Scalar>
Matrix<Scalar> dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  Matrix<Scalar> mask(rows, cols);
  const Scalar keep = static_cast<Scalar>(1.0 / (1.0 - p));
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < p ? Scalar(0) : keep;
  }
  return mask;
}

template <class Scalar>
Matrix<Scalar> scale_shift(const Matrix<Scalar>& normalized, const Matrix<Scalar>& scale,
                           const Matrix<Scalar>& shift) {
  Matrix<Scalar> out = normalized.array().rowwise() * scale.row(0).array();
  out.rowwise() += shift.row(0);
  return out;
}

MatrixD layer_norm_backward(const MatrixD& dnorm, const LayerNormStats<double>& st) {
  const double n = static_cast<double>(dnorm.cols());
  MatrixD dx(dnorm.rows(), dnorm.cols());
  for (Eigen::Index r = 0; r < dnorm.rows(); ++r) {
    const double mean_d = dnorm.row(r).sum() / n;
    const double mean_dx = dnorm.row(r).dot(st.normalized.row(r)) / n;
    dx.row(r) = st.inv_std(r) *
                (dnorm.row(r).array() - mean_d - st.normalized.row(r).array() * mean_dx).matrix();
  }
  return dx;
}

}  // namespace

template <class Scalar>
RowVector<Scalar> encoder_forward(const ParamSet<Scalar>& P, const EncoderConfig& cfg,
                                  const Matrix<Scalar>& x, std::span<const int> segments,
                                  bool train_mode, Rng* rng, EncoderCache* cache) {
  constexpr bool kRecord = std::is_same_v<Scalar, double>;
  const EncoderLayout L = encoder_layout(cfg);
  if (P.size() != L.out_b + 1 || P[L.in_w].rows() != cfg.input_dim ||
      P[L.in_w].cols() != cfg.model_dim || P[L.out_w].cols() != cfg.output_dim) {
    throw Error(ErrorKind::shape, "parameter set does not match the encoder configuration");
  }
  if (x.cols() != cfg.input_dim) {
    throw Error(ErrorKind::shape, "encoder input has " + std::to_string(x.cols()) +
                                      " columns, expected " + std::to_string(cfg.input_dim));
  }
  if (x.rows() < 1) throw Error(ErrorKind::shape, "encoder input has no rows");
  const Eigen::Index T = x.rows();
  const int d = cfg.model_dim;
  const int heads = cfg.num_heads;
  const int hd = d / heads;
  const Scalar scale = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(hd)));
  if (cfg.num_segments > 0) {
    if (static_cast<Eigen::Index>(segments.size()) != T) {
      throw Error(ErrorKind::shape, "one segment id per input row is required");
    }
    for (int s : segments) {
      if (s < 0 || s >= cfg.num_segments) throw Error(ErrorKind::shape, "segment id out of range");
    }
  } else if (!segments.empty()) {
    throw Error(ErrorKind::shape, "segment ids given to an encoder without segment embeddings");
  }
  const bool dropout = train_mode && rng != nullptr && cfg.dropout_p > 0.0;

  if constexpr (kRecord) {
    if (cache) {
      cache->config = cfg;
      cache->generation = P.generation();
      cache->valid = false;
      cache->x = x;
      cache->segments.assign(segments.begin(), segments.end());
      cache->layers.assign(static_cast<std::size_t>(cfg.num_layers), {});
      cache->embed_mask.resize(0, 0);
    }
  }

  Matrix<Scalar> h = x * P[L.in_w];
  h.rowwise() += P[L.in_b].row(0);
  h += positional_encoding<Scalar>(static_cast<int>(T), d);
  if (L.has_segment) {
    for (Eigen::Index t = 0; t < T; ++t) h.row(t) += P[L.segment].row(segments[t]);
  }
  if (dropout) {
    const auto mask = dropout_mask<Scalar>(T, d, cfg.dropout_p, *rng);
    h = h.cwiseProduct(mask);
    if constexpr (kRecord) {
      if (cache) cache->embed_mask = mask;
    }
  }
  check_finite(h, "input projection");

  for (int l = 0; l < cfg.num_layers; ++l) {
    const auto& W = L.layers[static_cast<std::size_t>(l)];
    Matrix<Scalar> q = h * P[W.q_w];
    q.rowwise() += P[W.q_b].row(0);
    const Matrix<Scalar> k = h * P[W.k_w];
    Matrix<Scalar> v = h * P[W.v_w];
    v.rowwise() += P[W.v_b].row(0);

    Matrix<Scalar> context(T, d);
    std::vector<Matrix<Scalar>> attn(static_cast<std::size_t>(heads));
    for (int i = 0; i < heads; ++i) {
      Matrix<Scalar> a = (q.middleCols(i * hd, hd) * k.middleCols(i * hd, hd).transpose()) * scale;
      softmax_rows_inplace(a);
      context.middleCols(i * hd, hd) = a * v.middleCols(i * hd, hd);
      attn[static_cast<std::size_t>(i)] = std::move(a);
    }
    Matrix<Scalar> attn_out = context * P[W.o_w];
    attn_out.rowwise() += P[W.o_b].row(0);
    Matrix<Scalar> attn_mask;
    if (dropout) {
      attn_mask = dropout_mask<Scalar>(T, d, cfg.dropout_p, *rng);
      attn_out = attn_out.cwiseProduct(attn_mask);
    }
    auto ln1 = layer_norm_rows<Scalar>(h + attn_out);
    Matrix<Scalar> h1 = scale_shift<Scalar>(ln1.normalized, P[W.ln1_g], P[W.ln1_b]);

    Matrix<Scalar> ff_pre = h1 * P[W.ff1_w];
    ff_pre.rowwise() += P[W.ff1_b].row(0);
    Matrix<Scalar> ff_act = ff_pre.cwiseMax(Scalar(0));
    Matrix<Scalar> ff_out = ff_act * P[W.ff2_w];
    ff_out.rowwise() += P[W.ff2_b].row(0);
    Matrix<Scalar> ff_mask;
    if (dropout) {
      ff_mask = dropout_mask<Scalar>(T, d, cfg.dropout_p, *rng);
      ff_out = ff_out.cwiseProduct(ff_mask);
    }
    auto ln2 = layer_norm_rows<Scalar>(h1 + ff_out);
    Matrix<Scalar> next = scale_shift<Scalar>(ln2.normalized, P[W.ln2_g], P[W.ln2_b]);
    check_finite(next, "encoder layer " + std::to_string(l));

    if constexpr (kRecord) {
      if (cache) {
        auto& C = cache->layers[static_cast<std::size_t>(l)];
        C.input = std::move(h);
        C.q = std::move(q);
        C.k = k;
        C.v = std::move(v);
        C.attn = std::move(attn);
        C.context = std::move(context);
        C.attn_mask = std::move(attn_mask);
        C.ln1 = std::move(ln1);
        C.h1 = std::move(h1);
        C.ff_pre = std::move(ff_pre);
        C.ff_act = std::move(ff_act);
        C.ff_mask = std::move(ff_mask);
        C.ln2 = std::move(ln2);
      }
    }
    h = std::move(next);
  }

  const RowVector<Scalar> pooled = h.colwise().mean();
  RowVector<Scalar> logits = pooled * P[L.out_w] + P[L.out_b].row(0);
  if (!logits.allFinite()) throw Error(ErrorKind::numeric, "non-finite activation in output projection");
  if constexpr (kRecord) {
    if (cache) {
      cache->pooled = pooled;
      cache->valid = true;
    }
  }
  return logits;
}

template RowVector<double> encoder_forward<double>(const ParamSet<double>&, const EncoderConfig&,
                                                   const Matrix<double>&, std::span<const int>,
                                                   bool, Rng*, EncoderCache*);
template RowVector<float> encoder_forward<float>(const ParamSet<float>&, const EncoderConfig&,
                                                 const Matrix<float>&, std::span<const int>, bool,
                                                 Rng*, EncoderCache*);

void encoder_backward(const Params& P, const EncoderCache& c, const RowVectorD& up, Params& G) {
  if (!c.valid) throw Error(ErrorKind::consistency, "encoder cache is empty or incomplete");
  if (c.generation != P.generation()) {
    throw Error(ErrorKind::consistency, "encoder cache is stale: parameters changed since forward");
  }
  const EncoderLayout L = encoder_layout(c.config);
  if (P.size() != L.out_b + 1 || !G.same_shape(P) ||
      c.layers.size() != static_cast<std::size_t>(c.config.num_layers)) {
    throw Error(ErrorKind::consistency, "encoder cache does not match the parameter set");
  }
  if (up.size() != c.config.output_dim) {
    throw Error(ErrorKind::shape, "upstream gradient has the wrong width");
  }
  const Eigen::Index T = c.x.rows();
  const int d = c.config.model_dim;
  const int heads = c.config.num_heads;
  const int hd = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  G[L.out_w].noalias() += c.pooled.transpose() * up;
  G[L.out_b] += up;
  const RowVectorD dpooled = up * P[L.out_w].transpose();
  MatrixD dh = dpooled.replicate(T, 1) / static_cast<double>(T);

  for (int l = c.config.num_layers - 1; l >= 0; --l) {
    const auto& W = L.layers[static_cast<std::size_t>(l)];
    const auto& C = c.layers[static_cast<std::size_t>(l)];

    G[W.ln2_g] += dh.cwiseProduct(C.ln2.normalized).colwise().sum();
    G[W.ln2_b] += dh.colwise().sum();
    const MatrixD dn2 = dh.array().rowwise() * P[W.ln2_g].row(0).array();
    const MatrixD dr2 = layer_norm_backward(dn2, C.ln2);

    const MatrixD dff_out = C.ff_mask.size() ? MatrixD(dr2.cwiseProduct(C.ff_mask)) : dr2;
    G[W.ff2_w].noalias() += C.ff_act.transpose() * dff_out;
    G[W.ff2_b] += dff_out.colwise().sum();
    MatrixD dpre = dff_out * P[W.ff2_w].transpose();
    dpre = dpre.cwiseProduct((C.ff_pre.array() > 0.0).cast<double>().matrix());
    G[W.ff1_w].noalias() += C.h1.transpose() * dpre;
    G[W.ff1_b] += dpre.colwise().sum();
    MatrixD dh1 = dr2;
    dh1.noalias() += dpre * P[W.ff1_w].transpose();

    G[W.ln1_g] += dh1.cwiseProduct(C.ln1.normalized).colwise().sum();
    G[W.ln1_b] += dh1.colwise().sum();
    const MatrixD dn1 = dh1.array().rowwise() * P[W.ln1_g].row(0).array();
    const MatrixD dr1 = layer_norm_backward(dn1, C.ln1);

    const MatrixD dattn = C.attn_mask.size() ? MatrixD(dr1.cwiseProduct(C.attn_mask)) : dr1;
    G[W.o_w].noalias() += C.context.transpose() * dattn;
    G[W.o_b] += dattn.colwise().sum();
    const MatrixD dctx = dattn * P[W.o_w].transpose();

    MatrixD dq(T, d), dk(T, d), dv(T, d);
    for (int i = 0; i < heads; ++i) {
      const MatrixD& a = C.attn[static_cast<std::size_t>(i)];
      const auto dctx_h = dctx.middleCols(i * hd, hd);
      const MatrixD da = dctx_h * C.v.middleCols(i * hd, hd).transpose();
      dv.middleCols(i * hd, hd) = a.transpose() * dctx_h;
      const Eigen::VectorXd row_dot = da.cwiseProduct(a).rowwise().sum();
      MatrixD ds = a.cwiseProduct(da - row_dot.replicate(1, T));
      ds *= scale;
      dq.middleCols(i * hd, hd) = ds * C.k.middleCols(i * hd, hd);
      dk.middleCols(i * hd, hd) = ds.transpose() * C.q.middleCols(i * hd, hd);
    }
    G[W.q_w].noalias() += C.input.transpose() * dq;
    G[W.q_b] += dq.colwise().sum();
    G[W.k_w].noalias() += C.input.transpose() * dk;
    G[W.v_w].noalias() += C.input.transpose() * dv;
    G[W.v_b] += dv.colwise().sum();

    dh = dr1;
    dh.noalias() += dq * P[W.q_w].transpose();
    dh.noalias() += dk * P[W.k_w].transpose();
    dh.noalias() += dv * P[W.v_w].transpose();
  }

  if (c.embed_mask.size()) dh = dh.cwiseProduct(c.embed_mask);
  if (L.has_segment) {
    for (Eigen::Index t = 0; t < T; ++t) {
      G[L.segment].row(c.segments[static_cast<std::size_t>(t)]) += dh.row(t);
    }
  }
  G[L.in_w].noalias() += c.x.transpose() * dh;
  G[L.in_b] += dh.colwise().sum();
}

Params encoder_backward(const Params& params, const EncoderCache& cache, const RowVectorD& upstream) {
  Params grads = params.zeros_like();
  encoder_backward(params, cache, upstream, grads);
  return grads;
}

}  // namespace tdet
