#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "erlasso/design.hpp"
#include "erlasso/errors.hpp"

namespace erlasso::partial {

enum class Strategy { TargetCoordinate, NeighborhoodBall, Random, Explicit };

const char* to_string(Strategy s);

struct ErasureAdversary {
  Strategy strategy = Strategy::Random;
  std::int32_t budget = 0;
  std::int32_t target = -1;  // coordinate j (target strategy)
  std::int32_t center = -1;  // coordinate (ball strategy)
  std::int32_t radius = 0;   // bipartite graph distance (ball strategy)
  design::IndexSet explicit_set;
};

struct ErasureOutcome {
  design::IndexSet B;
  bool truncated = false;  // the budget clipped the natural erasure set
};

ErasureOutcome erase(const design::BinaryDesign& M, const ErasureAdversary& adv,
                     std::uint64_t seed);

struct PartialRecoveryResult {
  Eigen::VectorXd x_hat;
  design::IndexSet support;
  std::int32_t support_size = 0;
  double residual_inf = 0.0;  // ||A x_hat - y||_inf on the surviving rows
  double delta = 0.0;
  bool feasible = false;  // false: no support up to k_max admitted residual <= delta
  std::int32_t k_max = 0;
  std::int64_t supports_tried = 0;
  std::int64_t lp_failures = 0;  // per-support fits that did not reach optimality
};

// exact l0 minimization under an l_inf residual budget: supports enumerated by
// increasing size, lexicographic within a size (first feasible fit wins)
PartialRecoveryResult l0_minimize(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                  double delta, std::int32_t k_max,
                                  std::int64_t subset_budget = 10000000);

double default_recovery_delta(const Eigen::VectorXd& y);  // 1e-9 * ||y||_inf

struct PartialEvaluation {
  double err_outside_C = 0.0;  // ||(x_hat - x*)_{C^c}||_2
  double err_inside_C = 0.0;
  double bound = 0.0;  // 2 * delta * eta
  bool bound_holds = false;
  bool transfer_applicable = false;  // ||x_hat||_0 + ||x*||_0 < tau
};

PartialEvaluation evaluate_partial(const PartialRecoveryResult& result,
                                   const Eigen::VectorXd& x_star,
                                   const design::IndexSet& C, double eta,
                                   std::int32_t tau);

}  // namespace erlasso::partial
