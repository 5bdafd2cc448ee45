// Serial reference vs OpenMP kernels on a training-sized minibatch.
// Arg 0: input dimension (one-hot inputs when > 10), arg 1: batch size.

#include <benchmark/benchmark.h>

#include <random>

#include "avdqn/kernels.hpp"

namespace {

using namespace avdqn;

struct Fixture {
  FeedforwardNet net;
  std::vector<double> xs, dys;
  std::size_t batch;

  explicit Fixture(const benchmark::State& state)
      : net(NetArch{static_cast<std::size_t>(state.range(0)), {100, 100}, 4}, 1),
        batch(static_cast<std::size_t>(state.range(1))) {
    const std::size_t in = net.arch().input_dim;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    xs.assign(batch * in, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      if (in > 10) {
        xs[b * in + rng() % in] = 1.0;
      } else {
        for (std::size_t i = 0; i < in; ++i) xs[b * in + i] = u(rng);
      }
    }
    dys.resize(batch * 4);
    for (auto& d : dys) d = u(rng);
  }
};

void BM_ForwardSerial(benchmark::State& state) {
  Fixture f(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::forward_batch(f.net, f.xs, f.batch));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.batch));
}

void BM_ForwardParallel(benchmark::State& state) {
  Fixture f(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forward_batch(f.net, f.xs, f.batch));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.batch));
}

void BM_ForwardBackwardSerial(benchmark::State& state) {
  Fixture f(state);
  NetGradients g(f.net.arch());
  for (auto _ : state) {
    const auto evals = kernels::serial::forward_batch(f.net, f.xs, f.batch);
    kernels::serial::backward_batch(f.net, evals, f.dys, g);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.batch));
}

void BM_ForwardBackwardParallel(benchmark::State& state) {
  Fixture f(state);
  NetGradients g(f.net.arch());
  for (auto _ : state) {
    const auto tape = kernels::forward_batch(f.net, f.xs, f.batch);
    kernels::backward_batch(f.net, tape, f.dys, g);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.batch));
  state.counters["threads"] = kernels::max_threads();
}

#define SHAPES Args({4, 128})->Args({50, 128})->Args({100, 128})

BENCHMARK(BM_ForwardSerial)->SHAPES;
BENCHMARK(BM_ForwardParallel)->SHAPES;
BENCHMARK(BM_ForwardBackwardSerial)->SHAPES;
BENCHMARK(BM_ForwardBackwardParallel)->SHAPES;

}  // namespace
BENCHMARK_MAIN();
