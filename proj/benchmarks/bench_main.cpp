#include <benchmark/benchmark.h>

#include <cmath>

#include "cbi/analysis.hpp"
#include "cbi/oracle.hpp"
#include "cbi/simulator.hpp"
#include "cbi/worst_case.hpp"

using namespace cbi;

namespace {

const PriorKnowledge kPk{0, 1e-5, 0.75, 0.8, 0.15};

void BM_Likelihood(benchmark::State& st) {
  const auto t = transitions_from_summary(make_summary(1'000'000, 40, 7));
  double x = 1e-5;
  for (auto _ : st) {
    benchmark::DoNotOptimize(log_likelihood({x, 0.3}, t));
    x = x < 0.4 ? x * 1.0001 : 1e-5;
  }
}
BENCHMARK(BM_Likelihood);

void BM_ClosedFormNoFailures(benchmark::State& st) {
  const auto obs = make_summary(st.range(0), 0, 0);
  for (auto _ : st) benchmark::DoNotOptimize(conservative_confidence(kPk, obs, 1e-4).confidence);
}
BENCHMARK(BM_ClosedFormNoFailures)->RangeMultiplier(100)->Range(100, 100'000'000);

void BM_ClosedFormWithFailures(benchmark::State& st) {
  const PriorKnowledge pk{1e-15, 1e-10, 0.8, 0.25, 1e-18};
  const auto obs = make_summary(st.range(0), 3, 1);
  for (auto _ : st) benchmark::DoNotOptimize(conservative_confidence(pk, obs, 1e-8).confidence);
}
BENCHMARK(BM_ClosedFormWithFailures)->RangeMultiplier(100)->Range(10'000, 100'000'000'000);

void BM_Oracle(benchmark::State& st) {
  GridSpec g;
  g.resolution = static_cast<int>(st.range(0));
  const auto obs = make_summary(10'000, 0, 0);
  for (auto _ : st) benchmark::DoNotOptimize(infimum(kPk, obs, 1e-4, g).confidence);
}
BENCHMARK(BM_Oracle)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& st) {
  SweepSpec s;
  s.pk = kPk;
  s.obs = make_summary(10, 0, 0);
  for (double n = 10; n <= 1e8; n *= 1.4) s.values.push_back(std::floor(n));
  for (auto _ : st) benchmark::DoNotOptimize(curve(s, static_cast<int>(st.range(0))).size());
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& st) {
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(simulate({1e-3, 0.4}, st.range(0), ++seed).outcomes.size());
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Simulate)->Arg(1'000'000);

void BM_BoundUnivariate(benchmark::State& st) {
  const auto obs = make_summary(100'000, 0, 0);
  for (auto _ : st) benchmark::DoNotOptimize(confidence_bound({0, 0, 0.7, 0, 0}, obs, 0.99, Method::Univariate).b);
}
BENCHMARK(BM_BoundUnivariate);

}  // namespace

BENCHMARK_MAIN();
