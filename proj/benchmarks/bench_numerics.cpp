// Dense kernels behind instance construction: Cholesky of the ridge matrix,
// full SVD summaries and kernel bases.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "erlasso/design.hpp"
#include "erlasso/instance.hpp"
#include "erlasso/numerics.hpp"
#include "erlasso/rng.hpp"

using namespace erlasso;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd A(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) A(i, j) = rng.normal();
  return A;
}

}  // namespace

static void BM_CholeskyFactor(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd G = gaussian(n, n, 7);
  const Eigen::MatrixXd A = G * G.transpose() + Eigen::MatrixXd::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::cholesky_factor(A).sum());
  }
}
BENCHMARK(BM_CholeskyFactor)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_MinSingularValue(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd A = gaussian(2 * n, n, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::min_singular_value(A).sigma_min);
  }
}
BENCHMARK(BM_MinSingularValue)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_NullspaceBasis(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd A = gaussian(n / 4, n, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::nullspace_basis(A).cols());
  }
}
BENCHMARK(BM_NullspaceBasis)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_BuildInstance(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const design::BinaryDesign M = design::gen_bernoulli_design(
      static_cast<std::int32_t>(n / 4), static_cast<std::int32_t>(n), 8.0, 42);
  for (auto _ : state) {
    const instance::HardInstance inst = instance::build_instance(M, 1e-6);
    benchmark::DoNotOptimize(inst.lambda);
  }
}
BENCHMARK(BM_BuildInstance)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
