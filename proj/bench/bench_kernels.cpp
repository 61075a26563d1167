// Serial reference vs OpenMP paths for the two parallel kernels: the run
// sweep and the oracle rollouts.

#include <benchmark/benchmark.h>

#include "etdlab/harness.hpp"
#include "etdlab/learners.hpp"
#include "etdlab/oracle.hpp"
#include "etdlab/policies.hpp"

namespace {

using namespace etdlab;

const oracle::TrueValueTable& bench_table() {
  static const oracle::TrueValueTable table = [] {
    Rng rng(7);
    const auto states = oracle::collect_states(20'000, 100, policies::PolicyKind::target(), rng);
    return oracle::estimate_true_values(states, 2, 7, Execution::Serial);
  }();
  return table;
}

harness::ExperimentConfig bench_config() {
  harness::ExperimentConfig cfg;
  cfg.method = harness::Method::Etd0;
  cfg.mode = harness::Mode::OffPolicy;
  cfg.alphas = {1e-4, 1e-3};
  cfg.episodes = 200;
  cfg.runs = 4;
  cfg.base_seed = 1;
  return cfg;
}

void BM_Sweep(benchmark::State& state, Execution exec) {
  const auto cfg = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(harness::execute_experiment(cfg, bench_table(), exec));
}

void BM_Oracle(benchmark::State& state, Execution exec) {
  std::vector<env::CarState> states;
  for (const auto& e : bench_table().entries) states.push_back(e.state);
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle::estimate_true_values(states, static_cast<std::size_t>(state.range(0)), 3, exec));
}

void BM_Td0Step(benchmark::State& state) {
  const features::TileCoder coder{features::TileCodingConfig{}};
  auto learner = learners::make_learner(coder.dimension(), 1e-3);
  features::SparseFeatures phi, phi_next;
  env::CarState s{-0.5, 0.0};
  for (auto _ : state) {
    const auto a = policies::target_action(s);
    const auto tr = env::mc_step(s, a);
    coder.encode_into(s, phi);
    coder.encode_into(tr, phi_next);
    learners::td0_update(learner, {phi, tr.reward, phi_next, 1.0});
    s = tr.terminal ? env::CarState{-0.5, 0.0} : tr.next;
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Sweep, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Oracle, serial, Execution::Serial)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Oracle, parallel, Execution::Parallel)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Td0Step);

BENCHMARK_MAIN();
