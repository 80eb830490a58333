#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erlasso/design.hpp"
#include "erlasso/errors.hpp"

namespace erlasso::instance {

// Hard-instance precision matrix: theta = M'M, theta_tilde = theta + eps*I,
// covariates are then drawn from N(0, theta_tilde^{-1}).
struct HardInstance {
  design::BinaryDesign M;
  double epsilon = 0.0;
  Eigen::MatrixXd theta_tilde;  // n x n
  Eigen::MatrixXd chol;         // lower-triangular L with L L' = theta_tilde
  Eigen::MatrixXd kernel;       // orthonormal basis of ker(M), n x r
  double lambda = 0.0;          // smallest nonzero eigenvalue of M'M
  bool theta_zero = false;      // M'M = 0: lambda undefined, reported as such
  std::int32_t r = 0;           // dim ker(M'M)
  double tol_rank = 1e-10;
  bool lambda_floor_met = false;  // lambda >= n^{-5/2}, reported not assumed
};

HardInstance build_instance(const design::BinaryDesign& M, double epsilon,
                            Eigen::Index dense_budget = 2048);

// w' theta_tilde^{-1} w via two triangular solves (never forms the inverse)
double quad_form_inv(const HardInstance& inst, const Eigen::VectorXd& w);

// rows i.i.d. N(0, theta_tilde^{-1}), realized as X_i = L^{-T} z_i
Eigen::MatrixXd sample_covariates(const HardInstance& inst, Eigen::Index m,
                                  std::uint64_t seed);

enum class SignalBranch { Invertible, MixtureRows, MixtureSparse };

const char* to_string(SignalBranch b);

struct SignalDraw {
  Eigen::VectorXd w_star;
  SignalBranch branch = SignalBranch::Invertible;
  std::vector<std::int32_t> rows;  // R_1..R_t (equation indices into M)
  std::vector<double> coeffs;      // Z_0..Z_t (invertible) or Z_1..Z_t (rows branch)
  Eigen::VectorXd w_tilde;         // k-sparse perturbation (invertible branch)
  std::int32_t k = 0;
  std::int32_t t = 0;
  std::int64_t sparsity_bound = 0;
  std::int64_t zero_rows_resampled = 0;
  bool rows_available = true;  // false when M has no nonzero row to sample
};

// w* = Z_0 sqrt(eps) w~  +  sum_i Z_i M_{R_i} / sqrt(M_{R_i}' theta_tilde^{-1} M_{R_i})
// with R_i uniform over rows, Z_j ~ Unif[-1,1], w~ uniform k-sparse Unif[-1,1]
SignalDraw sample_signal_invertible(const HardInstance& inst, std::int32_t k,
                                    std::int32_t t, std::uint64_t seed);

// fair coin between the t-row-sum distribution (no perturbation term) and the
// k-sparse distribution with standard normal entries on a uniform support
SignalDraw sample_signal_mixture(const HardInstance& inst, std::int32_t k,
                                 std::int32_t t, std::uint64_t seed);

enum class PrecondKind { Identity, RandomInvertible, Whitening, RidgeRoot, CustomFile };

const char* to_string(PrecondKind k);

struct Preconditioner {
  Eigen::MatrixXd S;  // n x s
  PrecondKind kind = PrecondKind::Identity;
  std::string label;
  double trivial_kernel_ratio = 0.0;  // sigma_min(S') / sigma_max(S')
};

Preconditioner make_identity(Eigen::Index n);
// Gaussian entries, rejected and redrawn while cond(S) > cond_limit
Preconditioner make_random_invertible(Eigen::Index n, std::uint64_t seed,
                                      double cond_limit = 1e6, int max_tries = 64);
Preconditioner make_whitening(const HardInstance& inst);   // theta_tilde^{1/2}
Preconditioner make_ridge_root(const HardInstance& inst);  // theta_tilde^{-1/2}
Preconditioner load_preconditioner(const std::string& path);
void save_preconditioner(const Preconditioner& S, const std::string& path);

// ker(S') = {0} check: sigma_min(S') > 1e-8 * sigma_max(S')
bool has_trivial_left_kernel(const Preconditioner& S);

// w' Sigma w / ||S'w||_1^2 evaluated at the witness w (upper bound on the
// sparse-compatibility infimum)
double alpha_ratio(const HardInstance& inst, const Preconditioner& S,
                   const Eigen::VectorXd& w);

// statistical lower-bound estimate of the subspace-compatibility constant
// restricted to span(V): min over random unit probes in V, refined by
// coordinate descent; labeled an estimate, never exact
double beta_lower_estimate(const HardInstance& inst, const Preconditioner& S,
                           const Eigen::MatrixXd& V, std::int64_t n_probes,
                           std::uint64_t seed);

}  // namespace erlasso::instance
