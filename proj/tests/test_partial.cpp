#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "erlasso/design.hpp"
#include "erlasso/erasure.hpp"
#include "erlasso/partial.hpp"
#include "erlasso/rng.hpp"
#include "oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace erlasso;
using design::BinaryDesign;
using design::IndexSet;

namespace {

BinaryDesign identity_design(std::int32_t n) {
  std::vector<IndexSet> rows;
  for (std::int32_t i = 0; i < n; ++i) rows.push_back({i});
  return BinaryDesign::from_rows(n, n, std::move(rows), 1.0);
}

BinaryDesign path_design() {
  // coordinates 0..4 chained by rows {0,1},{1,2},{2,3},{3,4}
  return BinaryDesign::from_rows(4, 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
}

}  // namespace

TEST_SUITE("partial") {

TEST_CASE("targeting a coordinate erases its neighborhood") {
  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::TargetCoordinate;
  adv.target = 1;
  adv.budget = 1;
  const partial::ErasureOutcome out = partial::erase(identity_design(4), adv, 0);
  CHECK(out.B == IndexSet{1});
  CHECK_FALSE(out.truncated);
}

TEST_CASE("targeting truncates at the budget and says so") {
  const BinaryDesign ones = design::gen_bernoulli_design(4, 4, 4.0, 3);
  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::TargetCoordinate;
  adv.target = 0;
  adv.budget = 2;
  const partial::ErasureOutcome out = partial::erase(ones, adv, 0);
  CHECK(out.B == IndexSet{0, 1});
  CHECK(out.truncated);
}

TEST_CASE("ball erasure removes the boundary equations of a bfs ball") {
  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::NeighborhoodBall;
  adv.center = 0;
  adv.budget = 4;

  adv.radius = 1;  // only the equations touching the center are reached
  CHECK(partial::erase(path_design(), adv, 0).B == IndexSet{0});

  adv.radius = 3;  // the ball swallows coordinate 1; its far equation is the rim
  CHECK(partial::erase(path_design(), adv, 0).B == IndexSet{1});

  adv.center = 2;
  adv.radius = 1;  // both incident equations see coordinates outside the ball
  CHECK(partial::erase(path_design(), adv, 0).B == IndexSet{1, 2});
}

TEST_CASE("explicit erasure is sorted, deduplicated and validated") {
  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::Explicit;
  adv.explicit_set = {2, 0, 2};
  adv.budget = 4;
  CHECK(partial::erase(identity_design(4), adv, 0).B == IndexSet{0, 2});
  adv.explicit_set = {7};
  CHECK_THROWS_AS(partial::erase(identity_design(4), adv, 0), ParameterError);
}

TEST_CASE("random erasure is reproducible in the seed and respects the budget") {
  const BinaryDesign M = design::gen_bernoulli_design(8, 16, 2.0, 1);
  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::Random;
  adv.budget = 2;
  const auto a = partial::erase(M, adv, 5);
  const auto b = partial::erase(M, adv, 5);
  CHECK(a.B == b.B);
  CHECK(a.B.size() == 2);
  CHECK(a.B.front() >= 0);
  CHECK(a.B.back() < 8);
  const auto c = partial::erase(M, adv, 6);
  CHECK(a.B != c.B);  // different stream
}

TEST_CASE("budget bounds are validated") {
  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::Random;
  adv.budget = -1;
  CHECK_THROWS_AS(partial::erase(identity_design(4), adv, 0), ParameterError);
  adv.budget = 5;
  CHECK_THROWS_AS(partial::erase(identity_design(4), adv, 0), ParameterError);
}

TEST_CASE("sparse recovery finds a one-sparse representation on the identity") {
  const partial::PartialRecoveryResult res =
      partial::l0_minimize(MatrixXd::Identity(4, 4), VectorXd::Unit(4, 0), 1e-9, 4);
  CHECK(res.feasible);
  CHECK(res.support_size == 1);
  CHECK(res.support == IndexSet{0});
  CHECK((res.x_hat - VectorXd::Unit(4, 0)).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK(res.supports_tried == 2);  // the empty support, then {0}
  CHECK(res.residual_inf <= 1e-9);
}

TEST_CASE("sparse recovery after an erasure picks the surviving explanation") {
  // rows [[1,0,0,0],[0,1,1,0]] with the first erased leaves A = [0,1,1,0];
  // the observation 0.0 + 1.0 = 1 is explained one-sparse by coordinate 1
  MatrixXd A(1, 4);
  A << 0, 1, 1, 0;
  VectorXd y(1);
  y << 1;
  const partial::PartialRecoveryResult res = partial::l0_minimize(A, y, 1e-9, 4);
  CHECK(res.feasible);
  CHECK(res.support_size == 1);
  CHECK(res.support == IndexSet{1});  // lexicographically first workable support
  CHECK(res.x_hat(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the zero observation needs the empty support") {
  const partial::PartialRecoveryResult res =
      partial::l0_minimize(MatrixXd::Identity(3, 3), VectorXd::Zero(3), 1e-9, 3);
  CHECK(res.feasible);
  CHECK(res.support_size == 0);
  CHECK(res.supports_tried == 1);
  CHECK(res.x_hat.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("an unexplainable observation is reported infeasible") {
  const partial::PartialRecoveryResult res =
      partial::l0_minimize(MatrixXd::Zero(1, 2), VectorXd::Ones(1), 1e-9, 1);
  CHECK_FALSE(res.feasible);
  CHECK(res.k_max == 1);
  CHECK(res.x_hat.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("support enumeration refuses oversized searches") {
  CHECK_THROWS_AS(
      partial::l0_minimize(MatrixXd::Ones(2, 30), VectorXd::Ones(2), 1e-9, 10, 1000),
      BudgetError);
}

TEST_CASE("recovered supports are minimal: no smaller support is feasible") {
  Rng rng(0x10ull);
  for (int rep = 0; rep < 10; ++rep) {
    MatrixXd A(4, 8);
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 8; ++j) A(i, j) = rng.normal();
    }
    VectorXd x = VectorXd::Zero(8);
    x(static_cast<Eigen::Index>(rng.uniform_int(4))) = 1.0 + rng.uniform01();
    x(4 + static_cast<Eigen::Index>(rng.uniform_int(4))) = -1.0 - rng.uniform01();
    const VectorXd y = A * x;
    const double delta = 1e-9 * y.lpNorm<Eigen::Infinity>();
    const partial::PartialRecoveryResult res = partial::l0_minimize(A, y, delta, 3);
    REQUIRE(res.feasible);
    CHECK((A * res.x_hat - y).lpNorm<Eigen::Infinity>() <= delta * (1.0 + 1e-12));
    CHECK(res.residual_inf ==
          doctest::Approx((A * res.x_hat - y).lpNorm<Eigen::Infinity>()).epsilon(1e-9));
    // oracle: every strictly smaller support misses by more than delta
    REQUIRE(res.support_size >= 1);
    CHECK(y.lpNorm<Eigen::Infinity>() > delta);
    if (res.support_size == 2) {
      for (std::int32_t j = 0; j < 8; ++j) {
        const auto best = oracles::chebyshev_by_vertex_enumeration(A.col(j), y);
        REQUIRE(best.has_value());
        CHECK(*best > delta);
      }
    }
  }
}

TEST_CASE("evaluation splits the error across the compromised set") {
  partial::PartialRecoveryResult res;
  res.x_hat = VectorXd::Zero(4);
  res.delta = 1e-9;
  res.support_size = 0;
  const VectorXd x_star = VectorXd::Unit(4, 1);
  const partial::PartialEvaluation ev = partial::evaluate_partial(res, x_star, {1}, 2.0, 2);
  CHECK(ev.err_inside_C == doctest::Approx(1.0));
  CHECK(ev.err_outside_C == doctest::Approx(0.0));
  CHECK(ev.bound == doctest::Approx(2.0 * 1e-9 * 2.0));
  CHECK(ev.bound_holds);
  CHECK(ev.transfer_applicable);  // 0 + 1 < 2
}

TEST_CASE("perfect recovery evaluates to zero errors") {
  partial::PartialRecoveryResult res;
  res.x_hat = VectorXd::Unit(3, 2);
  res.delta = 1e-9;
  res.support_size = 1;
  const partial::PartialEvaluation ev =
      partial::evaluate_partial(res, VectorXd::Unit(3, 2), {0}, 5.0, 3);
  CHECK(ev.err_inside_C == 0.0);
  CHECK(ev.err_outside_C == 0.0);
  CHECK(ev.bound_holds);
}

TEST_CASE("default recovery tolerance scales with the observation") {
  VectorXd y(2);
  y << 2, -4;
  CHECK(partial::default_recovery_delta(y) == doctest::Approx(4e-9).epsilon(1e-12));
  CHECK(partial::default_recovery_delta(VectorXd::Zero(2)) == 0.0);
}

TEST_CASE("after a targeted erasure the damage stays inside the certified set") {
  // end-to-end: erase the neighborhood of the most covered coordinate, certify
  // the compromised set, recover from the surviving equations, and check that
  // the error outside the certificate obeys the transfer bound while the
  // targeted coordinate itself is lost
  const BinaryDesign M = design::gen_bernoulli_design(8, 12, 3.2, 14);
  std::int32_t j = 0;
  for (std::int32_t c = 1; c < M.n(); ++c) {
    if (M.col_degree(c) > M.col_degree(j)) j = c;
  }
  REQUIRE(M.col_degree(j) >= 1);
  REQUIRE(M.col_degree(j) < M.m());  // some equations must survive

  partial::ErasureAdversary adv;
  adv.strategy = partial::Strategy::TargetCoordinate;
  adv.target = j;
  adv.budget = M.m();
  const IndexSet B = partial::erase(M, adv, 0).B;

  // tau = 4 keeps the certified set a strict subset of the coordinates (at
  // tau = 5 so few equations survive the erasure that every support of size
  // <= 4 degenerates and C swallows all of [n]) while still covering the
  // difference of a 1-sparse estimate and the 2-sparse truth
  const double eta = 50.0;
  const std::int32_t tau = 4;
  erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
      M, B, tau, erasure::default_delta(M), erasure::CertMethod::BruteForce, eta);
  cert = erasure::verify_erasure_robustness(M, cert, design::CheckMode::Exhaustive);
  REQUIRE(cert.verdict == erasure::CertVerdict::Verified);
  REQUIRE(std::binary_search(cert.C.begin(), cert.C.end(), j));

  // a second coordinate that stays identifiable
  std::int32_t l = -1;
  for (std::int32_t c = 0; c < M.n(); ++c) {
    if (c != j && !std::binary_search(cert.C.begin(), cert.C.end(), c)) {
      l = c;
      break;
    }
  }
  REQUIRE(l >= 0);

  VectorXd x_star = VectorXd::Zero(M.n());
  x_star(j) = 0.7;
  x_star(l) = -0.3;
  const IndexSet bc = erasure::complement(B, M.m());
  const MatrixXd A = M.dense_rows(bc);
  const VectorXd y = A * x_star;
  const partial::PartialRecoveryResult res = partial::l0_minimize(A, y, 1e-9, 2);
  REQUIRE(res.feasible);

  const partial::PartialEvaluation ev =
      partial::evaluate_partial(res, x_star, cert.C, eta, tau);
  CHECK(ev.transfer_applicable);
  CHECK(ev.err_outside_C <= 2.0 * 1e-9 * eta);
  CHECK(ev.bound_holds);
  CHECK(ev.err_inside_C >= 0.5 * 0.7);  // the targeted coordinate is unrecoverable
}

}  // TEST_SUITE
