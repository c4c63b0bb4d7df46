#include <vector>

#include <benchmark/benchmark.h>

#include "spinxfer/disorder.hpp"
#include "spinxfer/ensemble.hpp"
#include "spinxfer/propagator.hpp"

namespace {

using namespace spinxfer;

struct Chain {
  std::vector<double> onsite;
  std::vector<double> couplings;
};

Chain disordered_chain(std::size_t n) {
  const auto r = sample_realization({0.15, 0.15}, {n, 1.0}, 42, 0);
  std::vector<double> c(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) c[j] = r.coupling_factors[j];
  return {r.onsite, c};
}

void BM_TaylorStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto chain = disordered_chain(n);
  const TridiagonalView h{chain.onsite, chain.couplings};
  std::vector<Complex> psi(n, Complex(0.0, 0.0));
  psi[0] = 1.0;
  std::vector<Complex> scratch(2 * n);
  for (auto _ : state) {
    apply_taylor_step(h, 0.01, psi, scratch);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_TaylorStep)->Arg(15)->Arg(25)->Arg(51)->Arg(101);

void BM_EigenStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto chain = disordered_chain(n);
  const TridiagonalView h{chain.onsite, chain.couplings};
  std::vector<Complex> psi(n, Complex(0.0, 0.0));
  psi[0] = 1.0;
  for (auto _ : state) {
    apply_evolution(eigensystem(h), 0.01, psi);
    benchmark::DoNotOptimize(psi.data());
  }
}
BENCHMARK(BM_EigenStep)->Arg(15)->Arg(25)->Arg(51)->Arg(101);

void BM_Realization(benchmark::State& state) {
  ExperimentConfig config;
  config.chain = {25, 1.0};
  config.protocol.kind = static_cast<ProtocolKind>(state.range(0));
  config.disorder = {0.15, 0.15};
  const auto schedule = make_schedule(config.chain, config.protocol);
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_realization(config, schedule, index++));
  }
  state.SetLabel(std::string(to_string(config.protocol.kind)));
}
BENCHMARK(BM_Realization)
    ->Arg(static_cast<int>(ProtocolKind::SequentialSwap))
    ->Arg(static_cast<int>(ProtocolKind::SpinCoupling))
    ->Arg(static_cast<int>(ProtocolKind::Adiabatic))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
