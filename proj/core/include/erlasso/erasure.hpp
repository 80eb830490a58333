#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "erlasso/design.hpp"

namespace erlasso::erasure {

using design::BinaryDesign;
using design::CheckMode;
using design::IndexSet;

// Indices i with |x_i| >= delta (ties inclusive).
IndexSet supp_delta(const Eigen::VectorXd& x, double delta);

// Complement of a sorted index set within {0, ..., n-1}.
IndexSet complement(const IndexSet& S, std::int32_t n);

struct AmplificationRecord {
  double residual_inf = 0.0;   // ||M_{B^c} x||_inf
  bool hypothesis_holds = false;  // residual_inf <= delta
  std::int64_t supp_delta_size = 0;
  std::int64_t supp_2d_size = 0;   // |supp_{2 d delta} x|
  std::int64_t supp_f_size = 0;    // |supp_{f delta} x|, f = 2 d n^2
  double f_factor = 0.0;
  // one-step bound: |supp_delta x| >= min(6 sqrt(d) |supp_{2 d delta} x| - |B|, k)
  double one_step_rhs = 0.0;
  bool one_step_holds = false;
  // amplified implication: |supp_{f delta} x| >= |B|  =>  |supp_delta x| >= k
  bool amplified_premise = false;
  bool amplified_implication_holds = false;
  bool constant_regime_met = false;  // d >= 16
};

AmplificationRecord evaluate_amplification(const BinaryDesign& M, const IndexSet& B,
                                           const Eigen::VectorXd& x, double delta,
                                           std::int32_t k);

enum class CertMethod { BruteForce, Constructive };
enum class CertVerdict { Unverified, Verified, Refuted, Statistical };

struct ErasureCertificate {
  IndexSet B;              // erased equations
  IndexSet C;              // compromised coordinates
  std::int32_t b = 0;       // |B|
  std::int32_t b_prime = 0; // |C|
  double eta = 0.0;
  std::int32_t tau = 0;
  double delta = 0.0;       // quantitative-support scale used at construction
  CertMethod method = CertMethod::BruteForce;
  CertVerdict verdict = CertVerdict::Unverified;
  std::optional<Eigen::VectorXd> refutation;  // witness x violating the bound
  std::int64_t supports_checked = 0;
  std::int64_t samples_checked = 0;
  std::int32_t construction_passes = 0;
};

// Builds C such that every x with ||x||_0 < tau satisfies
// ||x_{C^c}||_2 <= eta ||M_{B^c} x||_inf, certified through the relaxation
// ||v||_inf >= ||v||_2 / sqrt(|B^c|) and generalized smallest singular
// values per support (coordinates already in C are unconstrained).
// BruteForce adds all uncovered coordinates of a failing support;
// Constructive collects near-kernel witnesses per failing support, combines
// them with the random-signs search, and adds quantitative supports.
ErasureCertificate construct_unidentifiable_set(const BinaryDesign& M, const IndexSet& B,
                                                std::int32_t tau, double delta,
                                                CertMethod method, double eta_target,
                                                std::int64_t subset_budget = 10000000);

// Exhaustive mode certifies the defining inequality for every support
// through the l2 relaxation; refutation witnesses are checked against the
// exact inequality. Sampled mode probes random sparse vectors.
ErasureCertificate verify_erasure_robustness(const BinaryDesign& M, ErasureCertificate cert,
                                             CheckMode mode, std::int64_t n_samples = 100000,
                                             std::uint64_t sample_seed = 0,
                                             std::int64_t subset_budget = 10000000);

struct KernelDensityReport {
  std::int32_t kernel_dim = 0;
  std::int32_t k = 0;
  CheckMode mode = CheckMode::Exhaustive;
  bool vacuous = false;          // trivial kernel
  bool verified = false;         // ||x_S||_1 <= ||x||_1 / 3 for all |S| <= k probed
  double worst_mass_ratio = 0.0; // max ||x_S||_1 / ||x||_1 observed (top-k mass)
  std::int64_t vectors_checked = 0;
  // quantitative-density estimate at scale delta_qd with |C| <= tau_qd:
  // eta_est = min ||x_{C^c}||_2 / ||x||_2 over probes near the kernel
  double delta_qd = 0.0;
  std::int32_t tau_qd = 0;
  double eta_est = 0.0;
};

// Dense-matrix core: checks the kernel l1-mass bound and estimates the
// quantitative-density constants of ker(A) by probing.
KernelDensityReport kernel_density_check_dense(const Eigen::MatrixXd& A, std::int32_t k,
                                               CheckMode mode, std::int64_t n_vectors = 1000,
                                               std::uint64_t seed = 0);

KernelDensityReport check_kernel_density(const BinaryDesign& M, std::int32_t k,
                                         CheckMode mode, std::int64_t n_vectors = 1000,
                                         std::uint64_t seed = 0);

struct SignSearchResult {
  std::vector<std::int8_t> signs;      // +1 / -1 per input vector
  std::int64_t combined_support = 0;   // |supp_delta(sum signs_i x_i)|
  std::int64_t union_support = 0;      // |union supp_delta(x_i)|
  bool bound_met = false;              // combined >= union / 2
  bool exhaustive = false;             // guaranteed when true (r <= 16)
};

// Finds signs with |supp_delta(sum sigma_i x_i)| >= |union supp_delta(x_i)| / 2.
// Exhaustive for r <= 16 vectors (bound then guaranteed); seeded multistart
// with 1-flip hill climbing beyond that (bound_met reports the outcome).
SignSearchResult sign_search(const std::vector<Eigen::VectorXd>& xs, double delta,
                             std::uint64_t seed = 0);

struct SumDensityRecord {
  bool hypotheses_hold = false;  // per-vector residual and support-size checks
  std::int32_t t = 0;            // minimal t with r <= (sqrt(2d))^t
  double threshold = 0.0;        // (2d)^{3t/2} delta
  std::int64_t sum_support = 0;  // |supp_threshold(sum x_i)|
  bool conclusion_holds = false; // sum_support <= |B|
  bool k_large_enough = false;   // k >= 4 sqrt(d) |B|
};

// Evaluates the bounded-sum statement: if each x_i has
// ||M_{B^c} x_i||_inf <= delta / sqrt(2d) and |supp_delta x_i| <= |B|,
// then |supp_{(2d)^{3t/2} delta}(sum x_i)| <= |B|.
SumDensityRecord evaluate_sum_density(const BinaryDesign& M, const IndexSet& B,
                                      const std::vector<Eigen::VectorXd>& xs,
                                      double delta, std::int32_t k);

// Default quantitative-support scale: 1e-6 * ||M||_F.
double default_delta(const BinaryDesign& M);

std::string certificate_to_json(const ErasureCertificate& cert);
ErasureCertificate certificate_from_json(const std::string& text);

}  // namespace erlasso::erasure
