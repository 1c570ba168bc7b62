// Microbenchmarks for the Monte Carlo hot paths: model sampling, the fast
// U-statistic evaluators, whole tail-estimation replicates, and one bound
// evaluation. The throughput figure to watch is TailReplicate: the
// documented floor is 1e4 replicates/s at n = 200 on a desktop core, which
// keeps the 1e6-replicate acceptance matrix inside its budget.

#include <benchmark/benchmark.h>

#include <vector>

#include "utail/bounds.hpp"
#include "utail/kernels.hpp"
#include "utail/mc_engine.hpp"
#include "utail/rng.hpp"
#include "utail/tail_models.hpp"

namespace {

void BM_SampleWeibull(benchmark::State& state) {
  auto model = utail::DistributionModel::weibull(1.0, 0.5);
  utail::RngStream stream = utail::derive_stream(12345, "bench/sample", 0);
  for (auto _ : state) benchmark::DoNotOptimize(model.sample(stream));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_SampleWeibull);

void BM_UStatAbsDiff(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto model = utail::DistributionModel::exponential(1.0);
  auto kernel = utail::KernelSpec::absdiff(1.0);
  utail::RngStream stream = utail::derive_stream(12345, "bench/ustat", 0);
  std::vector<double> sample(n);
  utail::UStatEvaluator eval(kernel, n);
  std::vector<double> scratch(n);
  for (auto _ : state) {
    state.PauseTiming();
    for (auto& x : sample) x = model.sample(stream);
    scratch = sample;
    state.ResumeTiming();
    benchmark::DoNotOptimize(eval.eval(scratch));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_UStatAbsDiff)->Arg(50)->Arg(200);

// One full tail-estimation replicate: n fresh draws plus one fast
// U-statistic evaluation, the unit of work behind every Monte Carlo count.
void BM_TailReplicate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto model = utail::DistributionModel::weibull(1.0, 0.5);
  auto kernel = utail::KernelSpec::maxabs(2, 3.5);
  utail::UStatEvaluator eval(kernel, n);
  std::vector<double> sample(n);
  std::uint64_t replicate = 0;
  for (auto _ : state) {
    utail::RngStream stream =
        utail::derive_stream(12345, "bench/replicate", replicate++);
    for (auto& x : sample) x = model.sample(stream);
    benchmark::DoNotOptimize(eval.eval(sample));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_TailReplicate)->Arg(50)->Arg(200);

void BM_BoundEvaluation(benchmark::State& state) {
  auto model = utail::DistributionModel::exponential(1.0);
  auto kernel = utail::KernelSpec::maxabs(2, 1.5);
  utail::KernelTail tail(kernel, model);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        utail::evaluate_upper_bound(tail, 100, 1.0, 0.9, 5.0));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_BoundEvaluation);

}  // namespace

BENCHMARK_MAIN();
