#include <benchmark/benchmark.h>

#include "leafvgg/architecture.hpp"
#include "leafvgg/model.hpp"
#include "leafvgg/ops.hpp"
#include "leafvgg/prng.hpp"

using namespace leafvgg;

namespace {

Tensor noise(const Shape& shape, std::uint64_t seed) {
  Prng rng(seed);
  Tensor t(shape);
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

// args: channels in, channels out, side
void conv_args(benchmark::internal::Benchmark* b) {
  b->Args({3, 64, 64})->Args({64, 64, 32})->Args({256, 256, 16})->Args({512, 512, 8});
}

template <Tensor (*Conv)(const Tensor&, const Tensor&, const Tensor&, Conv2dParams)>
void BM_Conv(benchmark::State& state) {
  const auto ci = static_cast<std::size_t>(state.range(0));
  const auto co = static_cast<std::size_t>(state.range(1));
  const auto side = static_cast<std::size_t>(state.range(2));
  const Tensor in = noise({ci, side, side}, 1), w = noise({co, ci, 3, 3}, 2), b = noise({co}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Conv(in, w, b, {1, 1}));
  state.counters["MAC/s"] = benchmark::Counter(static_cast<double>(ci * co * 9 * side * side),
                                               benchmark::Counter::kIsIterationInvariantRate);
}

void BM_DenseBatch(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const Tensor x = noise({batch, 32768}, 4), w = noise({15, 32768}, 5), b = noise({15}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(dense_batch(x, w, b));
}

void BM_MaxPool(benchmark::State& state) {
  const Tensor in = noise({64, 256, 256}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(maxpool2d(in, 2, 2));
}

void BM_TinyForward(benchmark::State& state) {
  const Architecture arch = build_tiny(3, 32);
  const WeightStore store = random_weights(arch, 8, true);
  const Tensor image = noise({3, 32, 32}, 9);
  for (auto _ : state) benchmark::DoNotOptimize(forward(arch, store, image));
}

void BM_Vgg19Features(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Architecture arch = build_vgg19(15, side);
  const WeightStore store = random_weights(arch, 10);
  const Tensor image = noise({3, side, side}, 11);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(arch, store, image));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Conv, conv2d)->Apply(conv_args)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Conv, conv2d_reference)->Args({3, 64, 64})->Args({64, 64, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseBatch)->Arg(1)->Arg(50);
BENCHMARK(BM_MaxPool)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TinyForward)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Vgg19Features)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
