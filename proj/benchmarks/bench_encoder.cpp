#include <benchmark/benchmark.h>

#include "tdet/encoder.hpp"
#include "tdet/rng.hpp"
#include "tdet/spotting.hpp"

namespace {

tdet::MatrixD random_input(int rows, int cols, tdet::Rng& rng) {
  tdet::MatrixD x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

void BM_EncoderForwardFloat(benchmark::State& state) {
  const auto config = tdet::spotting_encoder_config(512);
  tdet::Rng rng(1);
  const auto params = tdet::init_encoder_params(config, rng).cast<float>();
  const tdet::MatrixF x = random_input(static_cast<int>(state.range(0)), 512, rng).cast<float>();
  for (auto _ : state) benchmark::DoNotOptimize(tdet::encoder_forward(params, config, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EncoderForwardFloat)->Arg(7)->Arg(30)->Arg(60);

void BM_EncoderForwardBackward(benchmark::State& state) {
  const auto config = tdet::spotting_encoder_config(512);
  tdet::Rng rng(2);
  const auto params = tdet::init_encoder_params(config, rng);
  const tdet::MatrixD x = random_input(static_cast<int>(state.range(0)), 512, rng);
  tdet::RowVectorD upstream = tdet::RowVectorD::Ones(config.output_dim);
  auto grads = params.zeros_like();
  for (auto _ : state) {
    tdet::EncoderCache cache;
    benchmark::DoNotOptimize(tdet::encoder_forward(params, config, x, {}, false, nullptr, &cache));
    tdet::encoder_backward(params, cache, upstream, grads);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EncoderForwardBackward)->Arg(7)->Arg(30);

}  // namespace
