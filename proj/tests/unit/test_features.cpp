#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "tdet/error.hpp"
#include "tdet/features.hpp"
#include "tdet/npy.hpp"
#include "tdet/rng.hpp"

namespace {

using tdet::ErrorKind;
using tdet::FeatureSequence;
using tdet::MatrixF;

FeatureSequence seq(MatrixF data, const std::string& game = "g", int half = 1) {
  FeatureSequence f;
  f.game_id = game;
  f.half = half;
  f.source_dims = {static_cast<int>(data.cols())};
  f.data = std::move(data);
  return f;
}

MatrixF random_matrix(tdet::Rng& rng, int rows, int cols) {
  MatrixF m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.normal());
  return m;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const tdet::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::io;
}

TEST(Combine, NormalizesEachSource) {
  MatrixF a(1, 2), b(1, 2);
  a << 3, 4;
  b << 0, 1;
  std::vector<FeatureSequence> srcs = {seq(a), seq(b)};
  const auto r = tdet::combine_features(srcs);
  ASSERT_EQ(r.features.dim(), 4);
  EXPECT_FLOAT_EQ(r.features.data(0, 0), 0.6f);
  EXPECT_FLOAT_EQ(r.features.data(0, 1), 0.8f);
  EXPECT_FLOAT_EQ(r.features.data(0, 2), 0.0f);
  EXPECT_FLOAT_EQ(r.features.data(0, 3), 1.0f);
  EXPECT_EQ(r.features.source_dims, (std::vector<int>{2, 2}));
}

TEST(Combine, ThreeBackboneWidths) {
  std::vector<FeatureSequence> srcs;
  tdet::Rng rng(1);
  for (int d : {2048, 2048, 384, 2048, 2048, 2048}) srcs.push_back(seq(random_matrix(rng, 3, d)));
  EXPECT_EQ(tdet::combine_features(srcs).features.dim(), 10624);
}

TEST(Combine, UnitRowsUnchanged) {
  tdet::Rng rng(2);
  MatrixF m = random_matrix(rng, 20, 8);
  m.rowwise().normalize();
  std::vector<FeatureSequence> srcs = {seq(m)};
  const auto r = tdet::combine_features(srcs);
  EXPECT_TRUE(r.features.data.isApprox(m, 1e-6f));
}

TEST(Combine, ZeroFramesStayZero) {
  MatrixF m = MatrixF::Zero(3, 2);
  m(1, 0) = 2;
  std::vector<FeatureSequence> srcs = {seq(m)};
  const auto r = tdet::combine_features(srcs);
  EXPECT_EQ(r.zero_norm_frames, 2u);
  EXPECT_EQ(r.features.data(0, 0), 0.0f);
  EXPECT_EQ(r.features.data(1, 0), 1.0f);
}

TEST(Combine, TruncatesWithinSlackAndRejectsBeyond) {
  tdet::Rng rng(3);
  std::vector<FeatureSequence> srcs = {seq(random_matrix(rng, 10, 2)), seq(random_matrix(rng, 12, 3))};
  EXPECT_EQ(tdet::combine_features(srcs).features.length(), 10);
  srcs[1] = seq(random_matrix(rng, 13, 3));
  EXPECT_EQ(kind_of([&] { tdet::combine_features(srcs); }), ErrorKind::alignment);
}

TEST(Combine, RejectsMixedGames) {
  tdet::Rng rng(4);
  std::vector<FeatureSequence> srcs = {seq(random_matrix(rng, 4, 2), "g"), seq(random_matrix(rng, 4, 2), "h")};
  EXPECT_EQ(kind_of([&] { tdet::combine_features(srcs); }), ErrorKind::identity);
  srcs = {seq(random_matrix(rng, 4, 2), "g", 1), seq(random_matrix(rng, 4, 2), "g", 2)};
  EXPECT_EQ(kind_of([&] { tdet::combine_features(srcs); }), ErrorKind::identity);
}

TEST(Combine, PermutingSourcesPermutesColumns) {
  tdet::Rng rng(5);
  std::vector<FeatureSequence> srcs = {seq(random_matrix(rng, 6, 2)), seq(random_matrix(rng, 6, 3)),
                                       seq(random_matrix(rng, 6, 4))};
  const auto base = tdet::combine_features(srcs).features.data;
  const std::vector<int> offsets = {0, 2, 5};
  std::vector<int> perm = {0, 1, 2};
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<FeatureSequence> p;
    for (int i : perm) p.push_back(srcs[static_cast<std::size_t>(i)]);
    const auto got = tdet::combine_features(p).features.data;
    int col = 0;
    for (int i : perm) {
      const int w = srcs[static_cast<std::size_t>(i)].dim();
      EXPECT_EQ(got.middleCols(col, w), base.middleCols(offsets[static_cast<std::size_t>(i)], w));
      col += w;
    }
  }
}

TEST(FeatureSequence, Validate) {
  MatrixF m = MatrixF::Ones(2, 2);
  auto f = seq(m);
  EXPECT_NO_THROW(f.validate());
  f.source_dims = {3};
  EXPECT_EQ(kind_of([&] { f.validate(); }), ErrorKind::shape);
  m(0, 0) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { seq(m).validate(); }), ErrorKind::numeric);
}

TEST(LoadGameHalf, ReadsSortedSources) {
  const auto dir = std::filesystem::temp_directory_path() / "tdet_features_test";
  std::filesystem::remove_all(dir);
  tdet::Rng rng(6);
  const MatrixF a = random_matrix(rng, 5, 2), b = random_matrix(rng, 5, 3);
  tdet::write_npy_file(dir / "1_b.npy", b);
  tdet::write_npy_file(dir / "1_a.npy", a);
  tdet::write_npy_file(dir / "2_a.npy", a);
  const auto f = tdet::load_game_half(dir, "g", 1);
  EXPECT_EQ(f.source_dims, (std::vector<int>{2, 3}));
  const auto single = tdet::load_game_half(dir, "g", 2);
  EXPECT_EQ(single.data, a);
  EXPECT_EQ(kind_of([&] { tdet::load_game_half(dir / "missing", "g", 1); }), ErrorKind::io);
  std::filesystem::remove_all(dir);
}

}  // namespace
