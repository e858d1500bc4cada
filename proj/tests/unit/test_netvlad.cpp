#include <gtest/gtest.h>

#include "tdet/gradcheck.hpp"
#include "tdet/netvlad.hpp"

namespace {

using tdet::MatrixD;
using L = tdet::NetVladLayout;

MatrixD random_input(tdet::Rng& rng, int T, int D) {
  MatrixD x(T, D);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

TEST(NetVlad, SingleClusterIsNormalizedMeanResidual) {
  tdet::Rng rng(1);
  const tdet::NetVladConfig c{5, 1, 18};
  const tdet::Params p = tdet::init_netvlad_params(c, rng);
  const MatrixD x = random_input(rng, 8, 5);
  const auto u = tdet::netvlad_descriptor(p, c, x);
  for (int half = 0; half < 2; ++half) {
    Eigen::RowVectorXd r = x.middleRows(4 * half, 4).colwise().mean() - p[L::centers].row(0);
    r /= r.norm();
    EXPECT_TRUE(u.segment(5 * half, 5).isApprox(r / std::sqrt(2.0), 1e-9));
  }
}

TEST(NetVlad, IdenticalFramesGiveIdenticalHalves) {
  tdet::Rng rng(2);
  const tdet::NetVladConfig c{6, 4, 18};
  const tdet::Params p = tdet::init_netvlad_params(c, rng);
  const MatrixD x = random_input(rng, 1, 6).replicate(10, 1);
  const auto u = tdet::netvlad_descriptor(p, c, x);
  const int kd = c.clusters * c.input_dim;
  EXPECT_TRUE(u.head(kd).isApprox(u.tail(kd), 1e-12));
  EXPECT_NEAR(u.norm(), 1.0, 1e-9);
}

TEST(NetVlad, OddLengthIsSplitError) {
  tdet::Rng rng(3);
  const tdet::NetVladConfig c{3, 2, 18};
  const tdet::Params p = tdet::init_netvlad_params(c, rng);
  for (int T : {1, 7}) {
    try {
      tdet::netvlad_forward(p, c, random_input(rng, T, 3));
      FAIL();
    } catch (const tdet::Error& e) {
      EXPECT_EQ(e.kind(), tdet::ErrorKind::split);
    }
  }
}

TEST(NetVlad, GradientsMatchFiniteDifferences) {
  tdet::Rng rng(4);
  const tdet::NetVladConfig c{4, 3, 5};
  tdet::Params p = tdet::init_netvlad_params(c, rng);
  for (std::size_t i = 0; i < p.size(); ++i) p[i].array() += 0.1 * MatrixD::Random(p[i].rows(), p[i].cols()).array();
  const MatrixD x = random_input(rng, 6, 4);
  tdet::RowVectorD w(5);
  for (int j = 0; j < 5; ++j) w(j) = rng.normal();
  const auto loss = [&](const tdet::Params& q, tdet::Params* g) {
    tdet::NetVladCache cache;
    const auto y = tdet::netvlad_forward(q, c, x, g ? &cache : nullptr);
    if (g) tdet::netvlad_backward(q, cache, w + y, *g);
    return (y.array() * w.array()).sum() + 0.5 * y.squaredNorm();
  };
  const auto r = tdet::grad_check(p, loss, 300, 1e-5, 5);
  EXPECT_LT(r.max_relative_error, 1e-5) << r.worst_tensor;
}

TEST(NetVlad, StaleCacheRejected) {
  tdet::Rng rng(5);
  const tdet::NetVladConfig c{3, 2, 4};
  tdet::Params p = tdet::init_netvlad_params(c, rng);
  tdet::NetVladCache cache;
  tdet::netvlad_forward(p, c, random_input(rng, 4, 3), &cache);
  p.bump_generation();
  tdet::Params g = p.zeros_like();
  EXPECT_THROW(tdet::netvlad_backward(p, cache, tdet::RowVectorD::Ones(4), g), tdet::Error);
}

}  // namespace
