#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "erlasso/design.hpp"
#include "erlasso/erasure.hpp"
#include "erlasso/rng.hpp"

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

BinaryDesign two_row_design() {
  // [[1,0,0,0],[0,1,1,0]]
  return BinaryDesign::from_rows(2, 4, {{0}, {1, 2}});
}

BinaryDesign chain4_design() {
  // rows {0,1},{1,2},{2,3}: kernel is span{(1,-1,1,-1)}
  return BinaryDesign::from_rows(3, 4, {{0, 1}, {1, 2}, {2, 3}});
}

BinaryDesign partition_design(std::int32_t n, std::int32_t d) {
  std::vector<IndexSet> rows;
  for (std::int32_t j = 0; j < n; ++j) {
    for (std::int32_t r = 0; r < d; ++r) rows.push_back({j});
  }
  return BinaryDesign::from_rows(n * d, n, std::move(rows), static_cast<double>(d));
}

// exact defining inequality, recomputed outside the library
bool violates_exactly(const BinaryDesign& M, const erasure::ErasureCertificate& cert,
                      const VectorXd& x) {
  std::int64_t nnz = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) ++nnz;
  }
  if (nnz >= cert.tau) return false;
  const IndexSet bc = erasure::complement(cert.B, M.m());
  const VectorXd r = M.dense_rows(bc) * x;
  double out_sq = 0.0;
  std::vector<char> in_c(static_cast<std::size_t>(M.n()), 0);
  for (std::int32_t j : cert.C) in_c[static_cast<std::size_t>(j)] = 1;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!in_c[static_cast<std::size_t>(j)]) out_sq += x(j) * x(j);
  }
  return std::sqrt(out_sq) > cert.eta * r.lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_SUITE("erasure") {

TEST_CASE("quantitative support keeps entries at or above the threshold") {
  VectorXd x(3);
  x << 0.5, 0.01, -2.0;
  CHECK(erasure::supp_delta(x, 0.1) == IndexSet{0, 2});
  CHECK(erasure::supp_delta(VectorXd::Zero(3), 0.1).empty());
  VectorXd ones(3);
  ones << 1, 1, 1;
  CHECK(erasure::supp_delta(ones, 1.0) == IndexSet{0, 1, 2});  // ties included
}

TEST_CASE("complement within a ground set") {
  CHECK(erasure::complement({1, 3}, 5) == IndexSet{0, 2, 4});
  CHECK(erasure::complement({}, 3) == IndexSet{0, 1, 2});
  CHECK(erasure::complement({0, 1, 2}, 3).empty());
}

TEST_CASE("amplification record on the identity with one erased row") {
  const erasure::AmplificationRecord rec =
      erasure::evaluate_amplification(identity_design(4), {0}, VectorXd::Unit(4, 0), 0.1, 2);
  CHECK(rec.residual_inf == doctest::Approx(0.0));
  CHECK(rec.hypothesis_holds);
  CHECK(rec.supp_delta_size == 1);
  CHECK(rec.f_factor == doctest::Approx(2.0 * 1.0 * 16.0));  // 2 d n^2 with d = 1
  CHECK_FALSE(rec.constant_regime_met);                      // d = 1 < 16
}

TEST_CASE("amplification record on a kernel vector with nothing erased") {
  const BinaryDesign M = BinaryDesign::from_rows(2, 3, {{0, 1}, {1, 2}});
  VectorXd x(3);
  x << 1, -1, 1;
  const erasure::AmplificationRecord rec = erasure::evaluate_amplification(M, {}, x, 0.5, 2);
  CHECK(rec.residual_inf == doctest::Approx(0.0));
  CHECK(rec.hypothesis_holds);
  CHECK(rec.supp_delta_size == 3);
  CHECK(rec.supp_2d_size == 0);  // 2 d delta = 4/3 exceeds every entry
  CHECK(rec.supp_f_size == 0);
}

TEST_CASE("amplification is scale equivariant") {
  const BinaryDesign M = design::gen_bernoulli_design(6, 12, 2.0, 17);
  Rng rng(5);
  VectorXd x(12);
  for (Eigen::Index i = 0; i < 12; ++i) x(i) = rng.normal();
  const double delta = 0.3, c = 7.25;
  const auto a = erasure::evaluate_amplification(M, {1, 4}, x, delta, 3);
  const auto b = erasure::evaluate_amplification(M, {1, 4}, c * x, c * delta, 3);
  CHECK(b.residual_inf == doctest::Approx(c * a.residual_inf).epsilon(1e-12));
  CHECK(b.hypothesis_holds == a.hypothesis_holds);
  CHECK(b.supp_delta_size == a.supp_delta_size);
  CHECK(b.supp_2d_size == a.supp_2d_size);
  CHECK(b.supp_f_size == a.supp_f_size);
  CHECK(b.one_step_holds == a.one_step_holds);
  CHECK(b.amplified_implication_holds == a.amplified_implication_holds);
}

TEST_CASE("support-size fields are nested by their thresholds") {
  const BinaryDesign M = design::gen_bernoulli_design(8, 16, 3.0, 23);
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    VectorXd x(16);
    for (Eigen::Index i = 0; i < 16; ++i) x(i) = rng.normal();
    const auto rec = erasure::evaluate_amplification(M, {0}, x, 0.2, 4);
    CHECK(rec.supp_f_size <= rec.supp_2d_size);
    CHECK(rec.supp_2d_size <= rec.supp_delta_size);
    CHECK(rec.hypothesis_holds == (rec.residual_inf <= 0.2));
  }
}

TEST_CASE("construction flags zeroed columns behind an erased row") {
  const BinaryDesign M = two_row_design();
  const erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
      M, {0}, 2, erasure::default_delta(M), erasure::CertMethod::BruteForce, 2.0);
  CHECK(cert.C == IndexSet{0, 3});
  CHECK(cert.b == 1);
  CHECK(cert.b_prime == 2);
}

TEST_CASE("construction on the intact identity compromises nothing") {
  // eta * sigma = 2 * 1 meets sqrt(|B^c|) = 2 exactly: the boundary is safe
  const erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
      identity_design(4), {}, 2, 1e-6, erasure::CertMethod::BruteForce, 2.0);
  CHECK(cert.C.empty());
  CHECK(cert.b_prime == 0);
}

TEST_CASE("construction after erasing one identity row compromises that coordinate") {
  const erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
      identity_design(4), {1}, 2, 1e-6, erasure::CertMethod::BruteForce, 2.0);
  CHECK(cert.C == IndexSet{1});
  CHECK(cert.b_prime <= 2 * cert.b);
  const erasure::ErasureCertificate ver = erasure::verify_erasure_robustness(
      identity_design(4), cert, design::CheckMode::Exhaustive);
  CHECK(ver.verdict == erasure::CertVerdict::Verified);
}

TEST_CASE("verification certifies the constructed two-row certificate") {
  const BinaryDesign M = two_row_design();
  erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
      M, {0}, 2, erasure::default_delta(M), erasure::CertMethod::BruteForce, 2.0);
  cert = erasure::verify_erasure_robustness(M, cert, design::CheckMode::Exhaustive);
  CHECK(cert.verdict == erasure::CertVerdict::Verified);
  CHECK(cert.supports_checked > 0);
}

TEST_CASE("compromising every coordinate verifies trivially") {
  erasure::ErasureCertificate cert;
  cert.B = {0};
  cert.C = {0, 1, 2, 3};
  cert.b = 1;
  cert.b_prime = 4;
  cert.eta = 0.5;
  cert.tau = 4;
  cert.delta = 1e-6;
  const auto ver = erasure::verify_erasure_robustness(identity_design(4), cert,
                                                      design::CheckMode::Exhaustive);
  CHECK(ver.verdict == erasure::CertVerdict::Verified);
}

TEST_CASE("an undersized certificate is refuted with an exact witness") {
  erasure::ErasureCertificate cert;
  cert.B = {1};
  cert.b = 1;
  cert.eta = 10.0;
  cert.tau = 2;
  cert.delta = 1e-6;
  const BinaryDesign M = identity_design(4);
  const auto ver = erasure::verify_erasure_robustness(M, cert, design::CheckMode::Exhaustive);
  REQUIRE(ver.verdict == erasure::CertVerdict::Refuted);
  REQUIRE(ver.refutation.has_value());
  CHECK(erasure::supp_delta(*ver.refutation, 1e-12) == IndexSet{1});
  CHECK(violates_exactly(M, ver, *ver.refutation));
}

TEST_CASE("sampled verification never refutes an exhaustively verified certificate") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const BinaryDesign M = design::gen_bernoulli_design(8, 14, 2.0, seed);
    erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
        M, {0, 3}, 2, erasure::default_delta(M), erasure::CertMethod::BruteForce, 5.0);
    cert = erasure::verify_erasure_robustness(M, cert, design::CheckMode::Exhaustive);
    REQUIRE(cert.verdict == erasure::CertVerdict::Verified);
    const auto probed = erasure::verify_erasure_robustness(
        M, cert, design::CheckMode::Sampled, 20000, seed * 11);
    CHECK(probed.verdict != erasure::CertVerdict::Refuted);
    CHECK(probed.samples_checked == 20000);
  }
}

TEST_CASE("enlarging the compromised set preserves verification") {
  const BinaryDesign M = design::gen_bernoulli_design(8, 14, 2.0, 3);
  erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
      M, {2}, 2, erasure::default_delta(M), erasure::CertMethod::BruteForce, 5.0);
  cert = erasure::verify_erasure_robustness(M, cert, design::CheckMode::Exhaustive);
  REQUIRE(cert.verdict == erasure::CertVerdict::Verified);
  for (std::int32_t extra = 0; extra < M.n(); ++extra) {
    if (std::binary_search(cert.C.begin(), cert.C.end(), extra)) continue;
    erasure::ErasureCertificate grown = cert;
    grown.C.push_back(extra);
    std::sort(grown.C.begin(), grown.C.end());
    grown.b_prime = static_cast<std::int32_t>(grown.C.size());
    grown.verdict = erasure::CertVerdict::Unverified;
    const auto ver =
        erasure::verify_erasure_robustness(M, grown, design::CheckMode::Exhaustive);
    CHECK(ver.verdict == erasure::CertVerdict::Verified);
  }
}

TEST_CASE("enlarging the erased set never shrinks the compromised set") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BinaryDesign M = design::gen_bernoulli_design(8, 14, 2.0, seed);
    const double delta = erasure::default_delta(M);
    const auto small = erasure::construct_unidentifiable_set(
        M, {1}, 2, delta, erasure::CertMethod::BruteForce, 5.0);
    const auto large = erasure::construct_unidentifiable_set(
        M, {1, 4, 6}, 2, delta, erasure::CertMethod::BruteForce, 5.0);
    CHECK(std::includes(large.C.begin(), large.C.end(), small.C.begin(), small.C.end()));
  }
}

TEST_CASE("constructive method also yields certificates that verify") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const BinaryDesign M = design::gen_bernoulli_design(8, 14, 2.0, seed);
    erasure::ErasureCertificate cert = erasure::construct_unidentifiable_set(
        M, {0, 5}, 2, erasure::default_delta(M), erasure::CertMethod::Constructive, 5.0);
    CHECK(cert.construction_passes >= 1);
    cert = erasure::verify_erasure_robustness(M, cert, design::CheckMode::Exhaustive);
    CHECK(cert.verdict == erasure::CertVerdict::Verified);
  }
}

TEST_CASE("kernel mass of the alternating-chain design is exactly one quarter") {
  const erasure::KernelDensityReport rep =
      erasure::check_kernel_density(chain4_design(), 1, design::CheckMode::Exhaustive);
  CHECK(rep.kernel_dim == 1);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.verified);  // 1/4 <= 1/3
  CHECK(rep.worst_mass_ratio == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(rep.delta_qd == doctest::Approx(1.0 / (12.0 * std::sqrt(4.0))).epsilon(1e-12));
}

TEST_CASE("trivial kernels make the density check vacuous") {
  const erasure::KernelDensityReport rep =
      erasure::check_kernel_density(identity_design(4), 1, design::CheckMode::Exhaustive);
  CHECK(rep.vacuous);
  CHECK(rep.kernel_dim == 0);
}

TEST_CASE("sampled kernel density is consistent with the exhaustive answer") {
  const BinaryDesign M = design::gen_bernoulli_design(30, 60, 6.0, 11);
  const auto ex =
      erasure::check_kernel_density(M, 2, design::CheckMode::Exhaustive, 1000, 7);
  const auto sa = erasure::check_kernel_density(M, 2, design::CheckMode::Sampled, 1000, 7);
  CHECK(ex.kernel_dim == sa.kernel_dim);
  CHECK(ex.vectors_checked == sa.vectors_checked);
  // a sampled scan sees a subset of the exhaustive subsets
  CHECK(sa.worst_mass_ratio <= ex.worst_mass_ratio + 1e-12);
  if (ex.verified) CHECK(sa.verified);
}

TEST_CASE("sign search meets the half-union bound on every exhaustive invocation") {
  Rng rng(0x516eull);
  for (int rep = 0; rep < 40; ++rep) {
    const std::int32_t r = 1 + static_cast<std::int32_t>(rng.uniform_int(8));
    const std::int32_t dim = 6 + static_cast<std::int32_t>(rng.uniform_int(10));
    std::vector<VectorXd> xs;
    for (std::int32_t i = 0; i < r; ++i) {
      VectorXd x = VectorXd::Zero(dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (rng.bernoulli(0.4)) x(j) = rng.normal();
      }
      xs.push_back(x);
    }
    const double delta = 0.3;
    const erasure::SignSearchResult res = erasure::sign_search(xs, delta, rep);
    REQUIRE(res.exhaustive);  // r <= 16
    CHECK(res.bound_met);
    CHECK(res.combined_support * 2 >= res.union_support);
    REQUIRE(res.signs.size() == xs.size());
    // recompute both sides from the reported signs
    VectorXd sum = VectorXd::Zero(dim);
    std::vector<char> in_union(static_cast<std::size_t>(dim), 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK((res.signs[i] == 1 || res.signs[i] == -1));
      sum += static_cast<double>(res.signs[i]) * xs[i];
      for (std::int32_t j : erasure::supp_delta(xs[i], delta)) {
        in_union[static_cast<std::size_t>(j)] = 1;
      }
    }
    CHECK(static_cast<std::int64_t>(erasure::supp_delta(sum, delta).size()) ==
          res.combined_support);
    CHECK(static_cast<std::int64_t>(std::count(in_union.begin(), in_union.end(), 1)) ==
          res.union_support);
  }
}

TEST_CASE("bounded sums of near-kernel vectors stay sparse on a certified design") {
  const BinaryDesign M = partition_design(20, 16);  // d = 16: constant regime
  const design::AssumptionReport rep =
      design::check_assumption(M, 1.0 / 12.0, 3, design::CheckMode::Exhaustive);
  REQUIRE(rep.all_ok);
  REQUIRE(rep.constant_regime_met);

  const double delta = 0.01;
  const IndexSet B = {0};  // k = 16 >= 4 sqrt(d) |B|
  std::vector<VectorXd> xs;
  xs.push_back((delta / 10.0) * VectorXd::Unit(20, 0));
  xs.push_back((delta / 10.0) * VectorXd::Unit(20, 1));
  const erasure::SumDensityRecord rec = erasure::evaluate_sum_density(M, B, xs, delta, 16);
  CHECK(rec.hypotheses_hold);
  CHECK(rec.k_large_enough);
  CHECK(rec.t == 1);  // two vectors, sqrt(2d) = sqrt(32) covers them at t = 1
  CHECK(rec.threshold == doctest::Approx(std::pow(32.0, 1.5) * delta).epsilon(1e-12));
  CHECK(rec.conclusion_holds);
}

TEST_CASE("sum-density hypotheses fail for a loud vector") {
  const BinaryDesign M = partition_design(20, 16);
  const erasure::SumDensityRecord rec =
      erasure::evaluate_sum_density(M, {0}, {VectorXd::Unit(20, 1)}, 0.01, 16);
  CHECK_FALSE(rec.hypotheses_hold);
}

TEST_CASE("default quantitative scale is 1e-6 times the frobenius norm") {
  const BinaryDesign M = chain4_design();  // six ones
  CHECK(erasure::default_delta(M) == doctest::Approx(1e-6 * std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("certificates round-trip through json including refutations") {
  erasure::ErasureCertificate cert;
  cert.B = {1};
  cert.b = 1;
  cert.eta = 10.0;
  cert.tau = 2;
  cert.delta = 1e-6;
  const auto refuted = erasure::verify_erasure_robustness(identity_design(4), cert,
                                                          design::CheckMode::Exhaustive);
  REQUIRE(refuted.verdict == erasure::CertVerdict::Refuted);
  const erasure::ErasureCertificate back =
      erasure::certificate_from_json(erasure::certificate_to_json(refuted));
  CHECK(back.B == refuted.B);
  CHECK(back.C == refuted.C);
  CHECK(back.b == refuted.b);
  CHECK(back.b_prime == refuted.b_prime);
  CHECK(back.eta == refuted.eta);
  CHECK(back.tau == refuted.tau);
  CHECK(back.delta == refuted.delta);
  CHECK(back.method == refuted.method);
  CHECK(back.verdict == refuted.verdict);
  REQUIRE(back.refutation.has_value());
  CHECK((*back.refutation - *refuted.refutation).lpNorm<Eigen::Infinity>() == 0.0);
}

}  // TEST_SUITE
