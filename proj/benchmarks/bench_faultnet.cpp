// Microbenchmarks for the hot paths: one consensus step across topologies and
// sizes, full distributed and centralized runs, stationary-set enumeration,
// graph construction, and the in-library erfc.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <tuple>

#include "faultnet/asymptotics.hpp"
#include "faultnet/baselines.hpp"
#include "faultnet/graph.hpp"
#include "faultnet/ia.hpp"
#include "faultnet/likelihood.hpp"
#include "faultnet/model.hpp"
#include "internal/mix.hpp"

namespace {

using namespace faultnet;

const ModelParams kNominal{0.0, 0.3, 10.0, 0.25};

ConsensusMatrix make_matrix(std::int64_t topo, std::size_t n) {
  switch (topo) {
    case 0:
      return metropolis(build_complete(n));
    case 1:
      return metropolis(build_ring(n));
    case 2: {
      const auto [rows, cols] = torus_dims(n);
      return metropolis(build_torus(rows, cols));
    }
    default:
      return metropolis(build_rgg(n, 0.3, internal::mix(1, 2)));
  }
}

void BM_IaStep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  const ConsensusMatrix p = make_matrix(state.range(0), n);
  const Observations obs = generate(kNominal, n, internal::mix(1, 1));
  const GammaSchedule g = GammaSchedule::power(0.7);
  NetworkState s = ia_init(obs.y);
  for (auto _ : state) {
    s = ia_step(s, p, obs.y, g, kNominal);
    benchmark::DoNotOptimize(s.theta_hat.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
// topology: 0 complete, 1 ring, 2 torus, 3 rgg
BENCHMARK(BM_IaStep)
    ->ArgsProduct({{0, 1, 2, 3}, {64, 256, 1024}})
    ->ArgNames({"topo", "n"});

void BM_IaRunComplete(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ConsensusMatrix p = metropolis(build_complete(n));
  const Observations obs = generate(kNominal, n, internal::mix(2, 1));
  const GammaSchedule g = GammaSchedule::power(0.7);
  for (auto _ : state) {
    const IaRunResult r = ia_run(obs.y, p, g, kNominal);
    benchmark::DoNotOptimize(r.theta_limit);
  }
}
BENCHMARK(BM_IaRunComplete)->Arg(64)->Arg(256);

void BM_EnumerateStationary(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Observations obs = generate(kNominal, n, internal::mix(3, 1));
  for (auto _ : state) {
    const StationarySet set = enumerate_stationary(obs.y, kNominal);
    benchmark::DoNotOptimize(set.points.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EnumerateStationary)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MlSolution(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Observations obs = generate(kNominal, n, internal::mix(4, 1));
  for (auto _ : state) {
    const MlSolution ml = ml_solution(obs.y, kNominal);
    benchmark::DoNotOptimize(ml.theta);
  }
}
BENCHMARK(BM_MlSolution)->Arg(100)->Arg(1000);

void BM_EmRun(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Observations obs = generate(kNominal, n, internal::mix(5, 1));
  for (auto _ : state) {
    const IterativeResult r = em_run(obs.y, kNominal);
    benchmark::DoNotOptimize(r.theta);
  }
}
BENCHMARK(BM_EmRun)->Arg(100)->Arg(1000);

void BM_ImlRun(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Observations obs = generate(kNominal, n, internal::mix(6, 1));
  for (auto _ : state) {
    const IterativeResult r = iml_run(obs.y, kNominal);
    benchmark::DoNotOptimize(r.theta);
  }
}
BENCHMARK(BM_ImlRun)->Arg(100)->Arg(1000);

void BM_BuildRgg(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 7;
  for (auto _ : state) {
    const ConsensusMatrix p = metropolis(build_rgg(n, 0.3, ++seed));
    benchmark::DoNotOptimize(p.size());
  }
}
BENCHMARK(BM_BuildRgg)->Arg(256)->Arg(1024);

// Fresh matrix per iteration: the eigensolve result is cached on the instance.
void BM_ValidateHypotheses(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const ConsensusMatrix p = metropolis(build_ring(n));
    const HypothesisReport report = validate_theorem_hypotheses(p);
    benchmark::DoNotOptimize(report.primitive);
  }
}
BENCHMARK(BM_ValidateHypotheses)->Arg(64)->Arg(256);

void BM_Erfc(benchmark::State& state) {
  double x = -8.0;
  double acc = 0.0;
  for (auto _ : state) {
    acc += faultnet::erfc(x);
    x += 1e-3;
    if (x > 8.0) x = -8.0;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Erfc);

}  // namespace

BENCHMARK_MAIN();
