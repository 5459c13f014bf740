#include <benchmark/benchmark.h>

#include <random>

#include "esrnn/echo_state.hpp"
#include "esrnn/gradients.hpp"
#include "esrnn/primal_dual.hpp"
#include "esrnn/tasks.hpp"

using namespace esrnn;

namespace {

struct Fixture {
  ArmaConfig cfg{2, 2, Nonlinearity::sigmoid, OutputHead::softmax};
  Sequence seq;
  ModelParams params;

  explicit Fixture(std::size_t hidden) {
    SynthSpec spec;
    spec.num_sequences = 1;
    seq = generate(spec).front();
    auto rng = make_rng(1, RngStream::init);
    params = init_params(hidden, cfg.augmented_inputs(spec.n_inputs), spec.n_outputs, cfg, rng);
  }
};

void BM_Forward(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward(f.params, f.seq, f.cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.seq.length()));
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(32)->Arg(64);

void BM_Gradient(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gradient(f.params, f.cfg, f.seq));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.seq.length()));
}
BENCHMARK(BM_Gradient)->Arg(16)->Arg(32)->Arg(64);

void BM_Shrink(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Mat w(n, n);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : w.data()) v = u(rng);
  const Vec lambda(n, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(shrink(w, lambda, 0.5));
}
BENCHMARK(BM_Shrink)->Arg(32)->Arg(128);

void BM_ProjectRows(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Mat w(n, n);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : w.data()) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(project_rows(w, 0.25));
}
BENCHMARK(BM_ProjectRows)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
