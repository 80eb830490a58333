// Generation, neighborhood queries and exhaustive assumption checking on
// Bernoulli designs at desk scale.

#include <benchmark/benchmark.h>

#include "erlasso/design.hpp"
#include "erlasso/rng.hpp"

using namespace erlasso;

static void BM_GenBernoulliDesign(benchmark::State& state) {
  const auto m = static_cast<std::int32_t>(state.range(0));
  const auto n = 2 * m;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    design::BinaryDesign M = design::gen_bernoulli_design(m, n, 6.0, seed++);
    benchmark::DoNotOptimize(M.nnz());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m) * n);
}
BENCHMARK(BM_GenBernoulliDesign)->Arg(30)->Arg(120)->Arg(480);

static void BM_Neighborhoods(benchmark::State& state) {
  const design::BinaryDesign M = design::gen_bernoulli_design(64, 256, 8.0, 3);
  Rng rng(17);
  for (auto _ : state) {
    const design::IndexSet S = rng.subset(M.n(), 3);
    benchmark::DoNotOptimize(design::neighborhoods(M, S).U.size());
  }
}
BENCHMARK(BM_Neighborhoods);

static void BM_CheckAssumptionExhaustive(benchmark::State& state) {
  const auto k = static_cast<std::int32_t>(state.range(0));
  const design::BinaryDesign M = design::gen_bernoulli_design(30, 60, 6.0, 11);
  for (auto _ : state) {
    const design::AssumptionReport rep =
        design::check_assumption(M, 0.5, k, design::CheckMode::Exhaustive);
    benchmark::DoNotOptimize(rep.all_ok);
  }
}
BENCHMARK(BM_CheckAssumptionExhaustive)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_CheckAssumptionSampled(benchmark::State& state) {
  const design::BinaryDesign M = design::gen_bernoulli_design(480, 960, 24.0, 5);
  for (auto _ : state) {
    const design::AssumptionReport rep =
        design::check_assumption(M, 0.25, 3, design::CheckMode::Sampled, 2000, 10000000, 9);
    benchmark::DoNotOptimize(rep.all_ok);
  }
}
BENCHMARK(BM_CheckAssumptionSampled)->Unit(benchmark::kMillisecond);
