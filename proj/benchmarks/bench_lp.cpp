// Interior-point solver throughput: basis pursuit, inequality LPs and
// Chebyshev fits at the sizes the experiment harness actually visits.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "erlasso/lp.hpp"
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

static void BM_BasisPursuit(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index m = n / 4;
  const Eigen::MatrixXd E = gaussian(m, n, 21);
  Rng rng(22);
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(n);
  for (int q = 0; q < 3; ++q) z0[rng.uniform_int(static_cast<std::uint64_t>(n))] = rng.uniform_pm1();
  const Eigen::VectorXd f = E * z0;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (auto _ : state) {
    const lp::L1Solution sol = lp::solve_l1(A, b, E, f);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_BasisPursuit)->Arg(32)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_InequalityLp(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd R = gaussian(n, n, 31);
  Eigen::MatrixXd G(3 * n, n);
  G << R, Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd h = Eigen::VectorXd::Ones(3 * n);
  const Eigen::VectorXd c = gaussian(n, 1, 32).col(0);
  for (auto _ : state) {
    const lp::IneqSolution sol = lp::solve_inequality_lp(c, G, h);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_InequalityLp)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ChebyshevFit(benchmark::State& state) {
  const Eigen::Index r = state.range(0);
  const Eigen::MatrixXd A = gaussian(r, r / 2, 41);
  const Eigen::VectorXd b = gaussian(r, 1, 42).col(0);
  for (auto _ : state) {
    const lp::ChebyshevFit fit = lp::chebyshev_fit(A, b);
    benchmark::DoNotOptimize(fit.r_inf);
  }
}
BENCHMARK(BM_ChebyshevFit)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
