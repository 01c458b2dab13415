#include <benchmark/benchmark.h>

#include "rmfpoly/curves.hpp"
#include "rmfpoly/moments.hpp"
#include "rmfpoly/rmf.hpp"
#include "rmfpoly/sieve.hpp"

using namespace rmfpoly;

namespace {

const IntPolynomial kQ({1, 0, 1});

void BM_SieveQuadratic(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sieve_values(kQ, n).size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SieveQuadratic)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_SieveCubic(benchmark::State& state) {
  const IntPolynomial p({0, 2, 3, 1});  // x (x + 1) (x + 2)
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sieve_values(p, n).size());
}
BENCHMARK(BM_SieveCubic)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FourthMoment(benchmark::State& state) {
  const auto table = sieve_values(kQ, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fourth_moment_exact(table).fourth);
}
BENCHMARK(BM_FourthMoment)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_McLeish(benchmark::State& state) {
  const auto table = sieve_values(kQ, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mcleish_condition_sums(table).s4);
}
BENCHMARK(BM_McLeish)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KappaEuler(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kappa_euler(kQ, static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_KappaEuler)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RademacherSum(benchmark::State& state) {
  const auto table = sieve_values(kQ, static_cast<std::uint64_t>(state.range(0)));
  std::uint64_t s = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rademacher_sum(RmfSampler(s++, Model::Rademacher), table));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_RademacherSum)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_IntegralPoints(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(integral_points(kQ, 3, 7, state.range(0)).size());
}
BENCHMARK(BM_IntegralPoints)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
