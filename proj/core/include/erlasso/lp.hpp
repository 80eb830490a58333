#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "erlasso/errors.hpp"

namespace erlasso::lp {

struct LpOptions {
  double tol_gap = 1e-9;   // relative duality-gap tolerance
  double tol_feas = 1e-9;  // relative primal/dual feasibility tolerance
  int max_iters = 200;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Singular };

const char* to_string(LpStatus s);

// minimize ||A z - b||_1  subject to  E z = f
//
// Solved as a primal-dual pair with residual split r = s+ - s-:
//   primal: min 1's+ + 1's-  s.t.  A z - s+ + s- = b, E z = f, s+- >= 0
//   dual:   max b'y + f'nu   s.t.  A'y + E'nu = 0, -1 <= y <= 1
// via a Mehrotra predictor-corrector interior-point iteration whose Newton
// systems reduce to a (cols(A)+rows(E)) KKT solve per step.
struct L1Solution {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd z;
  Eigen::VectorXd y;   // dual on the residual rows, in [-1, 1]
  Eigen::VectorXd nu;  // dual on the equality rows
  double objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // |primal - dual| / (1 + |primal|)
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  int iterations = 0;
  // when status == Infeasible: q with E'q = 0 and f'q < 0, certifying E z = f
  // has no solution
  Eigen::VectorXd infeasibility_certificate;
};

L1Solution solve_l1(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                    const LpOptions& opts = {});

// minimize c'x subject to G x <= h
struct IneqSolution {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

IneqSolution solve_inequality_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
                                 const Eigen::VectorXd& h, const LpOptions& opts = {});

// minimize ||A x - b||_inf over unrestricted x (epigraph form of the above)
struct ChebyshevFit {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd x;
  double r_inf = 0.0;
  int iterations = 0;
};

ChebyshevFit chebyshev_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const LpOptions& opts = {});

}  // namespace erlasso::lp
