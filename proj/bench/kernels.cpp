// Fast paths against their references: FFT convolution vs the direct sum,
// OpenMP reductions vs the serial ones.

#include <random>

#include <benchmark/benchmark.h>

#include "kc/oracle.hpp"
#include "kc/reduce.hpp"
#include "kc/riesz.hpp"
#include "kc/spectral.hpp"

namespace {

kc::Field noise(const kc::Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  kc::Field f(g);
  for (double& x : f.values())
    x = d(rng);
  return f;
}

void BM_riesz_apply(benchmark::State& state) {
  const kc::Grid g = kc::make_grid(static_cast<int>(state.range(0)), 4.0);
  const kc::RieszOperator op = kc::build_riesz(g, 1.0);
  const kc::Field f = noise(g, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::riesz_apply(op, f));
}
BENCHMARK(BM_riesz_apply)->Arg(8)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_riesz_direct(benchmark::State& state) {
  const kc::Grid g = kc::make_grid(static_cast<int>(state.range(0)), 4.0);
  const kc::Field f = noise(g, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::riesz_direct(g, 1.0, f));
}
BENCHMARK(BM_riesz_direct)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_sum_parallel(benchmark::State& state) {
  const kc::Field f = noise(kc::make_grid(static_cast<int>(state.range(0)), 4.0), 2);
  const auto v = f.values();
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::deterministic_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; }));
}
BENCHMARK(BM_sum_parallel)->Arg(64)->Arg(128);

void BM_sum_serial(benchmark::State& state) {
  const kc::Field f = noise(kc::make_grid(static_cast<int>(state.range(0)), 4.0), 2);
  const auto v = f.values();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kc::serial::deterministic_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; }));
}
BENCHMARK(BM_sum_serial)->Arg(64)->Arg(128);

void BM_inner_parallel(benchmark::State& state) {
  const kc::Grid g = kc::make_grid(static_cast<int>(state.range(0)), 4.0);
  const kc::Field f = noise(g, 3), h = noise(g, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::inner(f, h));
}
BENCHMARK(BM_inner_parallel)->Arg(64)->Arg(128);

void BM_inner_serial(benchmark::State& state) {
  const kc::Grid g = kc::make_grid(static_cast<int>(state.range(0)), 4.0);
  const kc::Field f = noise(g, 3), h = noise(g, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::serial::inner(f, h));
}
BENCHMARK(BM_inner_serial)->Arg(64)->Arg(128);

void BM_integrate_parallel(benchmark::State& state) {
  const kc::Field f = noise(kc::make_grid(static_cast<int>(state.range(0)), 4.0), 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::integrate(f));
}
BENCHMARK(BM_integrate_parallel)->Arg(64)->Arg(128);

void BM_integrate_serial(benchmark::State& state) {
  const kc::Field f = noise(kc::make_grid(static_cast<int>(state.range(0)), 4.0), 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(kc::serial::integrate(f));
}
BENCHMARK(BM_integrate_serial)->Arg(64)->Arg(128);

} // namespace

BENCHMARK_MAIN();
