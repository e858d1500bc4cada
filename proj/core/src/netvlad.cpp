#include "tdet/netvlad.hpp"

#include <cmath>
#include <type_traits>

namespace tdet {
namespace {

constexpr double kNormEps = 1e-12;

template <class Scalar>
struct HalfResult {
  Matrix<Scalar> assign;
  Matrix<Scalar> vlad;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> norms;
};

template <class Scalar>
HalfResult<Scalar> vlad_half(const ParamSet<Scalar>& P, const Matrix<Scalar>& x) {
  using L = NetVladLayout;
  HalfResult<Scalar> out;
  out.assign = x * P[L::assign_w];
  out.assign.rowwise() += P[L::assign_b].row(0);
  softmax_rows_inplace(out.assign);
  const RowVector<Scalar> mass = out.assign.colwise().sum();
  out.vlad = out.assign.transpose() * x;
  out.vlad -= (P[L::centers].array().colwise() * mass.transpose().array()).matrix();
  out.norms.resize(out.vlad.rows());
  for (Eigen::Index k = 0; k < out.vlad.rows(); ++k) {
    const Scalar n = std::sqrt(out.vlad.row(k).squaredNorm() + static_cast<Scalar>(kNormEps));
    out.norms(k) = n;
    out.vlad.row(k) /= n;
  }
  return out;
}

}  // namespace

void NetVladConfig::validate() const {
  if (input_dim < 1 || clusters < 1 || output_dim < 1) {
    throw Error(ErrorKind::shape, "NetVLAD dimensions must be positive");
  }
}

Params make_netvlad_params(const NetVladConfig& c) {
  c.validate();
  Params p;
  p.add("vlad.centers", c.clusters, c.input_dim);
  p.add("vlad.assign.weight", c.input_dim, c.clusters);
  p.add("vlad.assign.bias", 1, c.clusters);
  p.add("classifier.weight", c.descriptor_dim(), c.output_dim);
  p.add("classifier.bias", 1, c.output_dim);
  return p;
}

Params init_netvlad_params(const NetVladConfig& c, Rng& rng) {
  Params p = make_netvlad_params(c);
  using L = NetVladLayout;
  for (Eigen::Index i = 0; i < p[L::centers].size(); ++i) p[L::centers].data()[i] = rng.normal(0.0, 0.1);
  xavier_uniform(p[L::assign_w], rng);
  xavier_uniform(p[L::classify_w], rng);
  return p;
}

template <class Scalar>
RowVector<Scalar> netvlad_descriptor(const ParamSet<Scalar>& P, const NetVladConfig& cfg,
                                     const Matrix<Scalar>& x, NetVladCache* cache) {
  using L = NetVladLayout;
  cfg.validate();
  if (P.size() != 5 || P[L::centers].rows() != cfg.clusters || P[L::centers].cols() != cfg.input_dim) {
    throw Error(ErrorKind::shape, "parameter set does not match the NetVLAD configuration");
  }
  if (x.cols() != cfg.input_dim) throw Error(ErrorKind::shape, "NetVLAD input width mismatch");
  if (x.rows() < 2 || x.rows() % 2 != 0) {
    throw Error(ErrorKind::split, "NetVLAD needs an even chunk length to split past/future, got " +
                                      std::to_string(x.rows()));
  }
  const Eigen::Index n = x.rows() / 2;
  const Matrix<Scalar> past_x = x.topRows(n);
  const Matrix<Scalar> future_x = x.bottomRows(n);
  auto past = vlad_half<Scalar>(P, past_x);
  auto future = vlad_half<Scalar>(P, future_x);

  const Eigen::Index kd = static_cast<Eigen::Index>(cfg.clusters) * cfg.input_dim;
  RowVector<Scalar> u(2 * kd);
  u.head(kd) = Eigen::Map<const RowVector<Scalar>>(past.vlad.data(), kd);
  u.tail(kd) = Eigen::Map<const RowVector<Scalar>>(future.vlad.data(), kd);
  const Scalar norm = std::sqrt(u.squaredNorm() + static_cast<Scalar>(kNormEps));
  u /= norm;
  if (!u.allFinite()) throw Error(ErrorKind::numeric, "non-finite NetVLAD descriptor");

  if constexpr (std::is_same_v<Scalar, double>) {
    if (cache) {
      cache->config = cfg;
      cache->generation = P.generation();
      cache->past = {past_x, std::move(past.assign), std::move(past.vlad), std::move(past.norms)};
      cache->future = {future_x, std::move(future.assign), std::move(future.vlad),
                       std::move(future.norms)};
      cache->descriptor = u;
      cache->norm = norm;
      cache->valid = true;
    }
  }
  return u;
}

template <class Scalar>
RowVector<Scalar> netvlad_forward(const ParamSet<Scalar>& P, const NetVladConfig& cfg,
                                  const Matrix<Scalar>& x, NetVladCache* cache) {
  using L = NetVladLayout;
  const RowVector<Scalar> d = netvlad_descriptor(P, cfg, x, cache);
  return d * P[L::classify_w] + P[L::classify_b].row(0);
}

template RowVector<double> netvlad_descriptor(const ParamSet<double>&, const NetVladConfig&,
                                              const Matrix<double>&, NetVladCache*);
template RowVector<float> netvlad_descriptor(const ParamSet<float>&, const NetVladConfig&,
                                             const Matrix<float>&, NetVladCache*);
template RowVector<double> netvlad_forward(const ParamSet<double>&, const NetVladConfig&,
                                           const Matrix<double>&, NetVladCache*);
template RowVector<float> netvlad_forward(const ParamSet<float>&, const NetVladConfig&,
                                          const Matrix<float>&, NetVladCache*);

void netvlad_backward(const Params& P, const NetVladCache& c, const RowVectorD& up, Params& G) {
  using L = NetVladLayout;
  if (!c.valid) throw Error(ErrorKind::consistency, "NetVLAD cache is empty");
  if (c.generation != P.generation()) throw Error(ErrorKind::consistency, "NetVLAD cache is stale");
  if (!G.same_shape(P) || P.size() != 5) throw Error(ErrorKind::consistency, "gradient shape mismatch");

  G[L::classify_w].noalias() += c.descriptor.transpose() * up;
  G[L::classify_b] += up;
  const RowVectorD ddesc = up * P[L::classify_w].transpose();
  const RowVectorD du = (ddesc - c.descriptor * c.descriptor.dot(ddesc)) / c.norm;

  const int K = c.config.clusters;
  const int D = c.config.input_dim;
  const Eigen::Index kd = static_cast<Eigen::Index>(K) * D;
  const auto half_backward = [&](const NetVladCache::Half& h, Eigen::Index offset) {
    MatrixD dvn = Eigen::Map<const MatrixD>(du.data() + offset, K, D);
    MatrixD dv(K, D);
    for (int k = 0; k < K; ++k) {
      const double proj = h.vlad.row(k).dot(dvn.row(k));
      dv.row(k) = (dvn.row(k) - h.vlad.row(k) * proj) / h.norms(k);
    }
    // vlad_raw = A^T X - diag(mass) C
    const RowVectorD mass = h.assign.colwise().sum();
    G[L::centers] -= (dv.array().colwise() * mass.transpose().array()).matrix();
    const Eigen::VectorXd c_dot = P[L::centers].cwiseProduct(dv).rowwise().sum();
    MatrixD da = h.x * dv.transpose();
    da.rowwise() -= c_dot.transpose();
    const Eigen::VectorXd row_dot = da.cwiseProduct(h.assign).rowwise().sum();
    const MatrixD dz = h.assign.cwiseProduct(da - row_dot.replicate(1, K));
    G[L::assign_w].noalias() += h.x.transpose() * dz;
    G[L::assign_b] += dz.colwise().sum();
  };
  half_backward(c.past, 0);
  half_backward(c.future, kd);
}

}  // namespace tdet
