#include "erlasso/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace erlasso::lp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kBoundaryFrac = 0.995;

bool finite(const VectorXd& v) { return v.allFinite(); }

// largest alpha in (0, 1] with s + alpha*ds > 0 (fraction to boundary)
double step_to_boundary(const VectorXd& s, const VectorXd& ds) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (ds(i) < 0.0) a = std::min(a, -s(i) / ds(i));
  }
  return std::min(1.0, kBoundaryFrac * a);
}

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::Singular: return "singular";
  }
  return "unknown";
}

L1Solution solve_l1(const MatrixXd& A, const VectorXd& b, const MatrixXd& E,
                    const VectorXd& f, const LpOptions& opts) {
  const Eigen::Index q = A.rows();
  const Eigen::Index p = A.cols();
  const Eigen::Index e = E.rows();
  if (b.size() != q) throw ParameterError("solve_l1: |b| != rows(A)");
  if (e > 0 && E.cols() != p) throw ParameterError("solve_l1: cols(E) != cols(A)");
  if (f.size() != e) throw ParameterError("solve_l1: |f| != rows(E)");

  L1Solution sol;
  sol.z = VectorXd::Zero(p);
  sol.y = VectorXd::Zero(q);
  sol.nu = VectorXd::Zero(e);

  // consistency of the equality system, with a Farkas-style certificate
  if (e > 0) {
    const VectorXd zf = Eigen::ColPivHouseholderQR<MatrixXd>(E).solve(f);
    const VectorXd res = E * zf - f;
    const double rn = res.lpNorm<Eigen::Infinity>();
    if (rn > opts.tol_feas * (1.0 + f.lpNorm<Eigen::Infinity>())) {
      sol.status = LpStatus::Infeasible;
      sol.infeasibility_certificate = res / res.norm();
      sol.primal_infeas = rn;
      return sol;
    }
  }

  // start: constrained least squares  min ||Az-b||^2 s.t. Ez = f
  VectorXd z;
  {
    MatrixXd K = MatrixXd::Zero(p + e, p + e);
    K.topLeftCorner(p, p) = A.transpose() * A;
    K.topLeftCorner(p, p).diagonal().array() += 1e-10 * (1.0 + K.topLeftCorner(p, p).trace());
    if (e > 0) {
      K.topRightCorner(p, e) = E.transpose();
      K.bottomLeftCorner(e, p) = E;
    }
    VectorXd rhs(p + e);
    rhs.head(p) = A.transpose() * b;
    rhs.tail(e) = f;
    const VectorXd ze = Eigen::PartialPivLU<MatrixXd>(K).solve(rhs);
    z = ze.head(p);
    if (!finite(z)) z = VectorXd::Zero(p);
  }
  if (q == 0) {
    sol.z = z;
    sol.status = LpStatus::Optimal;
    return sol;
  }

  VectorXd r0 = A * z - b;
  const double off = std::max(1.0, 0.1 * r0.lpNorm<Eigen::Infinity>());
  VectorXd sp = r0.cwiseMax(0.0).array() + off;
  VectorXd sm = (-r0).cwiseMax(0.0).array() + off;
  VectorXd y = VectorXd::Zero(q);
  VectorXd nu = VectorXd::Zero(e);

  const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double fnorm = 1.0 + (e > 0 ? f.lpNorm<Eigen::Infinity>() : 0.0);
  const double anorm = 1.0 + A.cwiseAbs().colwise().sum().maxCoeff();

  // best iterate by worst residual, restored when the iteration degenerates
  // (highly degenerate duals can poison late iterates without ever meeting
  // the strict gap test; the caller still sees an honest non-optimal status)
  double best_merit = std::numeric_limits<double>::infinity();
  VectorXd best_z = z, best_y = y, best_nu = nu, best_sp, best_sm;

  auto fill = [&](LpStatus st, int it, bool restore_best) {
    if (restore_best && best_merit < std::numeric_limits<double>::infinity()) {
      z = best_z;
      y = best_y;
      nu = best_nu;
      sp = best_sp;
      sm = best_sm;
    }
    sol.status = st;
    sol.z = z;
    sol.y = y;
    sol.nu = nu;
    sol.objective = (A * z - b).lpNorm<1>();
    sol.dual_objective = b.dot(y) + (e > 0 ? f.dot(nu) : 0.0);
    sol.gap = std::abs(sol.objective - sol.dual_objective) / (1.0 + std::abs(sol.objective));
    sol.iterations = it;
    const VectorXd rr = b - (A * z) + sp - sm;
    sol.primal_infeas = std::max(rr.lpNorm<Eigen::Infinity>() / bnorm,
                                 e > 0 ? (f - E * z).lpNorm<Eigen::Infinity>() / fnorm : 0.0);
    VectorXd rd = -(A.transpose() * y);
    if (e > 0) rd -= E.transpose() * nu;
    sol.dual_infeas = rd.lpNorm<Eigen::Infinity>() / anorm;
  };

  double mu0 = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const VectorXd wp = VectorXd::Ones(q) + y;
    const VectorXd wm = VectorXd::Ones(q) - y;
    const VectorXd r1 = b - (A * z) + sp - sm;
    const VectorXd r2 = e > 0 ? VectorXd(f - E * z) : VectorXd();
    VectorXd r3 = -(A.transpose() * y);
    if (e > 0) r3 -= E.transpose() * nu;
    const double mu = (sp.dot(wp) + sm.dot(wm)) / static_cast<double>(2 * q);

    const double pinf = std::max(r1.lpNorm<Eigen::Infinity>() / bnorm,
                                 e > 0 ? r2.lpNorm<Eigen::Infinity>() / fnorm : 0.0);
    const double dinf = r3.lpNorm<Eigen::Infinity>() / anorm;
    const double pobj = sp.sum() + sm.sum();
    const double dobj = b.dot(y) + (e > 0 ? f.dot(nu) : 0.0);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    if (pinf <= opts.tol_feas && dinf <= opts.tol_feas && gap <= opts.tol_gap) {
      fill(LpStatus::Optimal, it, false);
      sol.primal_infeas = pinf;
      sol.dual_infeas = dinf;
      return sol;
    }
    const double merit = std::max({pinf, dinf, gap});
    if (merit < best_merit) {
      best_merit = merit;
      best_z = z;
      best_y = y;
      best_nu = nu;
      best_sp = sp;
      best_sm = sm;
    }
    if (it == 0) mu0 = mu;
    if (mu < 1e-16 * (1.0 + mu0)) {
      // complementarity exhausted in working precision without meeting the
      // gap test: stagnation, return the best iterate seen
      fill(LpStatus::IterationLimit, it, true);
      return sol;
    }

    const VectorXd dvec = (sp.cwiseQuotient(wp) + sm.cwiseQuotient(wm)).cwiseMax(1e-300);
    const VectorXd dinv = dvec.cwiseInverse();

    // assemble the reduced KKT once per iteration, reuse for both solves; the
    // ridge keeps the factorization stable, and two rounds of iterative
    // refinement against the unregularized matrix cancel the bias it adds
    // (without them the late-iteration dual residual floors near 1e-9)
    MatrixXd K = MatrixXd::Zero(p + e, p + e);
    K.topLeftCorner(p, p) = A.transpose() * dinv.asDiagonal() * A;
    const double ridge = 1e-13 * (1.0 + K.topLeftCorner(p, p).trace());
    K.topLeftCorner(p, p).diagonal().array() += ridge;
    if (e > 0) {
      K.topRightCorner(p, e) = -E.transpose();
      K.bottomLeftCorner(e, p) = E;
    }
    const Eigen::PartialPivLU<MatrixXd> lu(K);

    auto refined_solve = [&](const VectorXd& rhs) {
      VectorXd x = lu.solve(rhs);
      for (int pass = 0; pass < 2; ++pass) {
        VectorXd resid = rhs - K * x;
        resid.head(p) += ridge * x.head(p);  // residual vs the true KKT matrix
        x += lu.solve(resid);
      }
      return x;
    };

    auto newton = [&](const VectorXd& r4, const VectorXd& r5, VectorXd& dz, VectorXd& dy,
                      VectorXd& dnu, VectorXd& dsp, VectorXd& dsm) {
      const VectorXd r1t = r1 + r4.cwiseQuotient(wp) - r5.cwiseQuotient(wm);
      VectorXd rhs(p + e);
      rhs.head(p) = A.transpose() * (dinv.asDiagonal() * r1t) - r3;
      if (e > 0) rhs.tail(e) = r2;
      const VectorXd sol_ze = refined_solve(rhs);
      dz = sol_ze.head(p);
      dnu = sol_ze.tail(e);
      dy = dinv.asDiagonal() * (r1t - A * dz);
      dsp = (r4 - sp.cwiseProduct(dy)).cwiseQuotient(wp);
      dsm = (r5 + sm.cwiseProduct(dy)).cwiseQuotient(wm);
    };

    // predictor
    VectorXd dz_a, dy_a, dnu_a, dsp_a, dsm_a;
    newton(-sp.cwiseProduct(wp), -sm.cwiseProduct(wm), dz_a, dy_a, dnu_a, dsp_a, dsm_a);
    if (!finite(dz_a) || !finite(dy_a)) { fill(LpStatus::Singular, it, true); return sol; }

    const double ap_a = std::min(step_to_boundary(sp, dsp_a), step_to_boundary(sm, dsm_a));
    const double ad_a = std::min(step_to_boundary(wp, dy_a), step_to_boundary(wm, -dy_a));
    const double mu_aff = ((sp + ap_a * dsp_a).dot(wp + ad_a * dy_a) +
                           (sm + ap_a * dsm_a).dot(wm - ad_a * dy_a)) /
                          static_cast<double>(2 * q);
    const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);

    // corrector
    const VectorXd r4 = VectorXd::Constant(q, sigma * mu) - sp.cwiseProduct(wp) -
                        dsp_a.cwiseProduct(dy_a);
    const VectorXd r5 = VectorXd::Constant(q, sigma * mu) - sm.cwiseProduct(wm) +
                        dsm_a.cwiseProduct(dy_a);
    VectorXd dz, dy, dnu, dsp, dsm;
    newton(r4, r5, dz, dy, dnu, dsp, dsm);
    if (!finite(dz) || !finite(dy)) { fill(LpStatus::Singular, it, true); return sol; }

    const double ap = std::min(step_to_boundary(sp, dsp), step_to_boundary(sm, dsm));
    const double ad = std::min(step_to_boundary(wp, dy), step_to_boundary(wm, -dy));
    z += ap * dz;
    sp += ap * dsp;
    sm += ap * dsm;
    y += ad * dy;
    if (e > 0) nu += ad * dnu;
    sol.iterations = it + 1;
  }
  fill(LpStatus::IterationLimit, opts.max_iters, true);
  return sol;
}

IneqSolution solve_inequality_lp(const VectorXd& c, const MatrixXd& G, const VectorXd& h,
                                 const LpOptions& opts) {
  const Eigen::Index m = G.rows();
  const Eigen::Index n = G.cols();
  if (c.size() != n) throw ParameterError("solve_inequality_lp: |c| != cols(G)");
  if (h.size() != m) throw ParameterError("solve_inequality_lp: |h| != rows(G)");
  IneqSolution sol;
  sol.x = VectorXd::Zero(n);
  if (m == 0) {
    sol.status = c.lpNorm<Eigen::Infinity>() == 0.0 ? LpStatus::Optimal : LpStatus::Unbounded;
    return sol;
  }

  VectorXd x = VectorXd::Zero(n);
  VectorXd s = (h - G * x).cwiseMax(1.0);
  VectorXd lam = VectorXd::Ones(m);

  const double hn = 1.0 + h.lpNorm<Eigen::Infinity>();
  const double cn = 1.0 + c.lpNorm<Eigen::Infinity>();

  auto fill = [&](LpStatus st, int it) {
    sol.status = st;
    sol.x = x;
    sol.objective = c.dot(x);
    sol.iterations = it;
  };

  for (int it = 0; it < opts.max_iters; ++it) {
    const VectorXd rp = h - G * x - s;
    const VectorXd rd = -c - G.transpose() * lam;
    const double mu = s.dot(lam) / static_cast<double>(m);
    const double pobj = c.dot(x);
    const double dobj = -h.dot(lam);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    sol.gap = gap;
    if (rp.lpNorm<Eigen::Infinity>() / hn <= opts.tol_feas &&
        rd.lpNorm<Eigen::Infinity>() / cn <= opts.tol_feas && gap <= opts.tol_gap) {
      fill(LpStatus::Optimal, it);
      return sol;
    }
    // divergence escape: once the iterate is primal-feasible and its
    // magnitude dwarfs the data scale, the objective is sinking along a ray
    // and the KKT system is about to degenerate numerically
    if (std::abs(pobj) > 1e30 || s.lpNorm<Eigen::Infinity>() > 1e30 ||
        (rp.lpNorm<Eigen::Infinity>() <= 1e-6 * hn &&
         (s.lpNorm<Eigen::Infinity>() > 1e12 * hn || std::abs(pobj) > 1e12 * cn))) {
      fill(LpStatus::Unbounded, it);
      return sol;
    }

    const VectorXd d = lam.cwiseQuotient(s);
    MatrixXd M = G.transpose() * d.asDiagonal() * G;
    const double ridge = 1e-13 * (1.0 + M.trace());
    M.diagonal().array() += ridge;
    const Eigen::PartialPivLU<MatrixXd> lu(M);

    auto newton = [&](const VectorXd& rc, VectorXd& dx, VectorXd& ds, VectorXd& dlam) {
      const VectorXd rhs = rd + G.transpose() * (d.cwiseProduct(rp) -
                                                 s.cwiseInverse().cwiseProduct(rc));
      dx = lu.solve(rhs);
      for (int pass = 0; pass < 2; ++pass) {
        // refinement vs the unregularized normal matrix cancels the ridge bias
        const VectorXd resid = rhs - M * dx + ridge * dx;
        dx += lu.solve(resid);
      }
      ds = rp - G * dx;
      dlam = s.cwiseInverse().cwiseProduct(rc - lam.cwiseProduct(ds));
    };

    VectorXd dx_a, ds_a, dl_a;
    newton(-s.cwiseProduct(lam), dx_a, ds_a, dl_a);
    if (!dx_a.allFinite()) { fill(LpStatus::Singular, it); return sol; }
    const double ap_a = step_to_boundary(s, ds_a);
    const double ad_a = step_to_boundary(lam, dl_a);
    const double mu_aff = (s + ap_a * ds_a).dot(lam + ad_a * dl_a) / static_cast<double>(m);
    const double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);

    VectorXd dx, ds, dlam;
    newton(VectorXd::Constant(m, sigma * mu) - s.cwiseProduct(lam) - ds_a.cwiseProduct(dl_a),
           dx, ds, dlam);
    if (!dx.allFinite()) { fill(LpStatus::Singular, it); return sol; }
    const double ap = step_to_boundary(s, ds);
    const double ad = step_to_boundary(lam, dlam);
    x += ap * dx;
    s += ap * ds;
    lam += ad * dlam;
    sol.iterations = it + 1;
  }
  fill(LpStatus::IterationLimit, opts.max_iters);
  return sol;
}

ChebyshevFit chebyshev_fit(const MatrixXd& A, const VectorXd& b, const LpOptions& opts) {
  const Eigen::Index q = A.rows();
  const Eigen::Index p = A.cols();
  if (b.size() != q) throw ParameterError("chebyshev_fit: |b| != rows(A)");
  ChebyshevFit fit;
  fit.x = VectorXd::Zero(p);
  if (p == 0 || q == 0) {
    fit.status = LpStatus::Optimal;
    fit.r_inf = q > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0;
    return fit;
  }
  MatrixXd G(2 * q, p + 1);
  G.topLeftCorner(q, p) = A;
  G.bottomLeftCorner(q, p) = -A;
  G.col(p).setConstant(-1.0);
  VectorXd h(2 * q);
  h.head(q) = b;
  h.tail(q) = -b;
  VectorXd c = VectorXd::Zero(p + 1);
  c(p) = 1.0;
  const IneqSolution s = solve_inequality_lp(c, G, h, opts);
  fit.status = s.status;
  fit.iterations = s.iterations;
  fit.x = s.x.head(p);
  fit.r_inf = (A * fit.x - b).lpNorm<Eigen::Infinity>();
  return fit;
}

}  // namespace erlasso::lp
