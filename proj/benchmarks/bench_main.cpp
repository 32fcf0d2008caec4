#include <benchmark/benchmark.h>

#include "fragkit/analytics.hpp"
#include "fragkit/simulator.hpp"

using namespace fragkit;

namespace {

const ReproductionLaw& stick() {
  static const ReproductionLaw law = ReproductionLaw::stick_breaking_lossy();
  return law;
}

void BM_MalthusianExponent(benchmark::State& state) {
  const auto law = ReproductionLaw::dirichlet_polynomial({{3.0, 1.0, 0.0}, {1.0, 2.0, 0.0}});
  for (auto _ : state) benchmark::DoNotOptimize(malthusian_exponent(law));
}
BENCHMARK(BM_MalthusianExponent);

// cost grows with t: more terms and more working bits
void BM_MSeries(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  const double beta = stick().beta_star() + 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(m_series(stick(), 1.0, t, beta).value);
}
BENCHMARK(BM_MSeries)->Arg(1)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_GammaZ(benchmark::State& state) {
  const double beta = stick().beta_star() + 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(gamma_z(stick(), 1.0, {0.7, 0.4}, beta).value);
}
BENCHMARK(BM_GammaZ)->Unit(benchmark::kMicrosecond);

void BM_SampleOffspring(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    Stream stream(root_key(1, i++));
    benchmark::DoNotOptimize(sample_offspring(stick(), stream).sizes.size());
  }
}
BENCHMARK(BM_SampleOffspring);

void BM_SimulateReplicate(benchmark::State& state) {
  SimulationConfig c;
  c.t_max = static_cast<double>(state.range(0));
  c.snapshot_times = {c.t_max};
  const auto law = ReproductionLaw::binary_uniform_conservative();
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(c, law, r++).splits);
}
BENCHMARK(BM_SimulateReplicate)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_SampleY(benchmark::State& state) {
  const TaggedLaw tag = tilted_tag_law(stick());
  std::uint64_t i = 0;
  for (auto _ : state) {
    Stream stream(root_key(2, i++));
    benchmark::DoNotOptimize(sample_Y(tag, 1.0, stream).value);
  }
}
BENCHMARK(BM_SampleY);

}  // namespace

BENCHMARK_MAIN();
