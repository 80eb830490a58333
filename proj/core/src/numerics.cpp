#include "erlasso/numerics.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "erlasso/rng.hpp"

namespace erlasso::numerics {

namespace {

// Unblocked right-looking Cholesky; slower than Eigen's LLT but reports the
// offending pivot index on failure.
Eigen::MatrixXd cholesky_scalar(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = A(j, j);
    if (j > 0) diag -= L.row(j).head(j).squaredNorm();
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw ConditioningError(
          "cholesky_factor: non-positive pivot at index " + std::to_string(j), j);
    }
    const double ljj = std::sqrt(diag);
    L(j, j) = ljj;
    if (j + 1 < n) {
      Eigen::VectorXd col = A.col(j).segment(j + 1, n - j - 1);
      if (j > 0) {
        col.noalias() -=
            L.block(j + 1, 0, n - j - 1, j) * L.row(j).head(j).transpose();
      }
      L.col(j).segment(j + 1, n - j - 1) = col / ljj;
    }
  }
  return L;
}

}  // namespace

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw ParameterError("cholesky_factor: matrix must be square");
  }
  const double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw ParameterError("cholesky_factor: matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd L = llt.matrixL();
    // guard against a silently inaccurate factorization
    if ((L * L.transpose() - A).norm() <= 1e-10 * std::max(A.norm(), 1.0)) {
      return L;
    }
  }
  // slow path: locate the pivot (throws) or succeed where LLT was shy
  return cholesky_scalar(A);
}

SpectralSummary min_singular_value(const Eigen::MatrixXd& A, double tol_rank) {
  SpectralSummary out;
  if (A.size() == 0) {
    out.singular_values = Eigen::VectorXd();
    return out;
  }
  Eigen::VectorXd sv;
  if (std::min(A.rows(), A.cols()) <= 16) {
    sv = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
  } else {
    sv = Eigen::BDCSVD<Eigen::MatrixXd>(A).singularValues();
  }
  out.singular_values = sv;
  out.sigma_max = sv.size() ? sv(0) : 0.0;
  out.tol_rank = tol_rank * out.sigma_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > out.tol_rank) ++rank;
  }
  out.rank = rank;
  // min_{||x||=1} ||Ax||: a wide matrix has a nontrivial kernel, so 0; else
  // the smallest singular value (reported as-is even when below tol_rank).
  out.sigma_min = (A.cols() > A.rows()) ? 0.0 : sv(sv.size() - 1);
  return out;
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& A, double tol_rank) {
  const Eigen::Index n = A.cols();
  if (A.rows() == 0 || A.size() == 0) {
    return Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd sv;
  Eigen::MatrixXd V;
  if (std::min(A.rows(), A.cols()) <= 32) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    sv = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd;
    svd.compute(A, Eigen::ComputeFullV);
    sv = svd.singularValues();
    V = svd.matrixV();
  }
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cut = tol_rank * smax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
  }
  return V.rightCols(n - rank);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& B, double tol_rank) {
  if (B.cols() == 0) return B;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  qr.setThreshold(tol_rank);
  const Eigen::Index r = qr.rank();
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), r);
  return Q;
}

Eigen::VectorXd project(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return Eigen::VectorXd::Zero(v.size());
  if (basis.rows() != v.size()) {
    throw ParameterError("project: basis rows must match vector length");
  }
  // fast path: columns already orthonormal
  Eigen::MatrixXd G = basis.transpose() * basis;
  const double dev = (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  if (dev <= 1e-10) {
    return basis * (basis.transpose() * v);
  }
  const Eigen::MatrixXd Q = orthonormalize(basis);
  return Q * (Q.transpose() * v);
}

double dist_to_span(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  return (v - project(v, basis)).norm();
}

double smallest_eigenvalue_via_cholesky(const Eigen::MatrixXd& L, int iters,
                                        std::uint64_t seed) {
  const Eigen::Index n = L.rows();
  Rng rng(Rng::mix(seed));
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
  x.normalize();
  const auto lower = L.triangularView<Eigen::Lower>();
  const auto upper = L.transpose().triangularView<Eigen::Upper>();
  double mu = 0.0;  // dominant eigenvalue of A^{-1}
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd y = lower.solve(x);
    y = upper.solve(y);
    mu = y.norm();
    if (mu == 0.0) break;
    x = y / mu;
  }
  // one Rayleigh quotient for a digit or two extra
  Eigen::VectorXd y = lower.solve(x);
  y = upper.solve(y);
  const double rq = x.dot(y);
  return rq > 0.0 ? 1.0 / rq : 0.0;
}

}  // namespace erlasso::numerics
