#pragma once

#include <optional>

#include <Eigen/Dense>

#include "erlasso/lp.hpp"

namespace erlasso::lasso {

struct Tolerances {
  double tol_gap = 1e-9;      // LP duality gap (relative)
  double tol_obj_rel = 1e-6;  // failure margin, relative to ||S'w*||_1
  double tol_rec = 1e-6;      // recovery distance, relative to 1 + ||w*||_2
  double tol_feas = 1e-9;     // constraint feasibility (relative)
};

// min ||S'w||_1  subject to  X w = y
struct LassoProblem {
  Eigen::MatrixXd X;  // m x n
  Eigen::VectorXd y;  // m
  Eigen::MatrixXd S;  // n x s
  std::optional<Eigen::VectorXd> w_star;  // reference signal; y = X w_star when present
};

struct SolveResult {
  lp::LpStatus status = lp::LpStatus::IterationLimit;
  Eigen::VectorXd w_hat;
  double objective = 0.0;  // ||S' w_hat||_1
  double gap = 0.0;
  int iterations = 0;
  bool rows_deduplicated = false;
  Eigen::Index row_rank = 0;
  // nonempty when status == Infeasible: q with X'q ~ 0, q'y != 0
  Eigen::VectorXd infeasibility_certificate;
};

SolveResult solve_preconditioned_lasso(const LassoProblem& prob,
                                       const Tolerances& tols = {});

struct DirectionReport {
  bool found = false;            // improvement exceeded the margin
  Eigen::VectorXd d;             // X d = 0
  double objective_at_wstar = 0.0;
  double objective_with_d = 0.0;  // ||S'(w*+d)||_1
  double improvement = 0.0;
  bool subgradient_test_holds = false;  // ||(S'd)_{U^c}||_1 < <S'd, sign(S'w*)>
  double subgradient_lhs = 0.0;
  double subgradient_rhs = 0.0;
  Eigen::Index nullspace_dim = 0;
  lp::LpStatus status = lp::LpStatus::Optimal;
};

// min ||S'(w*+d)||_1 over X d = 0, via the null-space reparameterization
DirectionReport improving_direction(const LassoProblem& prob,
                                    const Tolerances& tols = {});

enum class Outcome { Success, Failure, Ambiguous, Error };

const char* to_string(Outcome o);

struct LassoVerdict {
  Outcome outcome = Outcome::Ambiguous;
  double objective_at_wstar = 0.0;
  double objective_at_solution = 0.0;
  Eigen::VectorXd solution;
  std::optional<Eigen::VectorXd> improving_dir;
  double recovery_error = 0.0;  // ||w_hat - w*||_2
  double improvement = 0.0;
  Tolerances tols;
  lp::LpStatus solver_status = lp::LpStatus::Optimal;
};

LassoVerdict adjudicate(const LassoProblem& prob, const SolveResult& sol,
                        const DirectionReport& dir, const Tolerances& tols = {});

}  // namespace erlasso::lasso
