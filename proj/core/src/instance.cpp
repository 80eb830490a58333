#include "erlasso/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "erlasso/numerics.hpp"
#include "erlasso/rng.hpp"

namespace erlasso::instance {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd row_vector(const design::BinaryDesign& M, std::int32_t i) {
  VectorXd v = VectorXd::Zero(M.n());
  for (std::int32_t j : M.row(i)) v(j) = 1.0;
  return v;
}

std::int64_t max_row_weight(const design::BinaryDesign& M) {
  std::int64_t w = 0;
  for (std::int32_t i = 0; i < M.m(); ++i) {
    w = std::max<std::int64_t>(w, static_cast<std::int64_t>(M.row(i).size()));
  }
  return w;
}

bool any_nonzero_row(const design::BinaryDesign& M) {
  for (std::int32_t i = 0; i < M.m(); ++i) {
    if (!M.row(i).empty()) return true;
  }
  return false;
}

// uniform row index, redrawn on all-zero rows (logged by the caller)
std::int32_t draw_nonzero_row(const design::BinaryDesign& M, Rng& rng,
                              std::int64_t& resampled) {
  for (;;) {
    const auto i = static_cast<std::int32_t>(rng.uniform_int(M.m()));
    if (!M.row(i).empty()) return i;
    ++resampled;
  }
}

}  // namespace

HardInstance build_instance(const design::BinaryDesign& M, double epsilon,
                            Eigen::Index dense_budget) {
  if (!(epsilon > 0.0)) throw ParameterError("build_instance: epsilon must be > 0");
  if (M.n() > dense_budget) {
    throw BudgetError("build_instance: n = " + std::to_string(M.n()) +
                          " exceeds dense-algebra budget " + std::to_string(dense_budget),
                      M.n(), dense_budget);
  }
  HardInstance inst;
  inst.M = M;
  inst.epsilon = epsilon;
  const MatrixXd Md = M.dense();
  inst.theta_tilde = Md.transpose() * Md;
  inst.theta_tilde.diagonal().array() += epsilon;

  const numerics::SpectralSummary sp = numerics::min_singular_value(Md, inst.tol_rank);
  inst.r = static_cast<std::int32_t>(M.n() - sp.rank);
  inst.theta_zero = (sp.rank == 0);
  if (!inst.theta_zero) {
    const double s = sp.singular_values(sp.rank - 1);  // smallest nonzero
    inst.lambda = s * s;
  }
  const double floor = std::pow(static_cast<double>(M.n()), -2.5);
  inst.lambda_floor_met = !inst.theta_zero && inst.lambda >= floor;

  try {
    inst.chol = numerics::cholesky_factor(inst.theta_tilde);
  } catch (const ConditioningError& e) {
    throw ConditioningError(std::string(e.what()) +
                                "; epsilon = " + std::to_string(epsilon) +
                                " is too small for working precision, increase it",
                            e.pivot_index);
  }
  inst.kernel = numerics::nullspace_basis(Md, inst.tol_rank);
  return inst;
}

double quad_form_inv(const HardInstance& inst, const VectorXd& w) {
  if (w.size() != inst.M.n()) throw ParameterError("quad_form_inv: |w| != n");
  const VectorXd u = inst.chol.triangularView<Eigen::Lower>().solve(w);
  return u.squaredNorm();
}

MatrixXd sample_covariates(const HardInstance& inst, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("sample_covariates: m must be >= 1");
  const Eigen::Index n = inst.M.n();
  Rng rng = Rng::derive(seed, {0xc0da7ull});
  MatrixXd X(m, n);
  VectorXd z(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(j) = rng.normal();
    X.row(i) = inst.chol.transpose().triangularView<Eigen::Upper>().solve(z).transpose();
  }
  return X;
}

const char* to_string(SignalBranch b) {
  switch (b) {
    case SignalBranch::Invertible: return "invertible";
    case SignalBranch::MixtureRows: return "mixture_rows";
    case SignalBranch::MixtureSparse: return "mixture_sparse";
  }
  return "unknown";
}

SignalDraw sample_signal_invertible(const HardInstance& inst, std::int32_t k,
                                    std::int32_t t, std::uint64_t seed) {
  if (k < 0 || k > inst.M.n()) throw ParameterError("sample_signal: k out of range");
  if (t < 0) throw ParameterError("sample_signal: t must be >= 0");
  Rng rng = Rng::derive(seed, {0x519a1ull, 1});
  SignalDraw draw;
  draw.branch = SignalBranch::Invertible;
  draw.k = k;
  draw.t = t;
  const Eigen::Index n = inst.M.n();
  draw.w_star = VectorXd::Zero(n);
  draw.w_tilde = VectorXd::Zero(n);

  const double z0 = rng.uniform_pm1();
  draw.coeffs.push_back(z0);
  const design::IndexSet supp = rng.subset(static_cast<std::int32_t>(n), k);
  for (std::int32_t j : supp) draw.w_tilde(j) = rng.uniform_pm1();
  draw.w_star = z0 * std::sqrt(inst.epsilon) * draw.w_tilde;

  draw.rows_available = any_nonzero_row(inst.M);
  if (t > 0 && draw.rows_available) {
    for (std::int32_t i = 0; i < t; ++i) {
      const std::int32_t ri = draw_nonzero_row(inst.M, rng, draw.zero_rows_resampled);
      const double zi = rng.uniform_pm1();
      draw.rows.push_back(ri);
      draw.coeffs.push_back(zi);
      const VectorXd mr = row_vector(inst.M, ri);
      const double den = std::sqrt(quad_form_inv(inst, mr));
      draw.w_star += (zi / den) * mr;
    }
  }
  draw.sparsity_bound = static_cast<std::int64_t>(k) +
                        static_cast<std::int64_t>(t) * max_row_weight(inst.M);
  return draw;
}

SignalDraw sample_signal_mixture(const HardInstance& inst, std::int32_t k,
                                 std::int32_t t, std::uint64_t seed) {
  if (k < 0 || k > inst.M.n()) throw ParameterError("sample_signal: k out of range");
  if (t < 0) throw ParameterError("sample_signal: t must be >= 0");
  Rng rng = Rng::derive(seed, {0x311c7ull, 2});
  SignalDraw draw;
  draw.k = k;
  draw.t = t;
  const Eigen::Index n = inst.M.n();
  draw.w_star = VectorXd::Zero(n);
  draw.w_tilde = VectorXd::Zero(n);
  draw.sparsity_bound =
      std::max<std::int64_t>(static_cast<std::int64_t>(t) * max_row_weight(inst.M),
                             static_cast<std::int64_t>(k));

  if (rng.bernoulli(0.5)) {
    draw.branch = SignalBranch::MixtureRows;
    draw.rows_available = any_nonzero_row(inst.M);
    if (draw.rows_available) {
      for (std::int32_t i = 0; i < t; ++i) {
        const std::int32_t ri = draw_nonzero_row(inst.M, rng, draw.zero_rows_resampled);
        const double zi = rng.uniform_pm1();
        draw.rows.push_back(ri);
        draw.coeffs.push_back(zi);
        const VectorXd mr = row_vector(inst.M, ri);
        const double den = std::sqrt(quad_form_inv(inst, mr));
        draw.w_star += (zi / den) * mr;
      }
    }
  } else {
    draw.branch = SignalBranch::MixtureSparse;
    const design::IndexSet supp = rng.subset(static_cast<std::int32_t>(n), k);
    for (std::int32_t j : supp) draw.w_star(j) = rng.normal();
  }
  return draw;
}

const char* to_string(PrecondKind k) {
  switch (k) {
    case PrecondKind::Identity: return "identity";
    case PrecondKind::RandomInvertible: return "randinv";
    case PrecondKind::Whitening: return "sqrt";
    case PrecondKind::RidgeRoot: return "invsqrt";
    case PrecondKind::CustomFile: return "file";
  }
  return "unknown";
}

namespace {

double spectral_ratio(const MatrixXd& S) {
  const numerics::SpectralSummary sp = numerics::min_singular_value(S.transpose());
  return sp.sigma_max > 0.0 ? sp.sigma_min / sp.sigma_max : 0.0;
}

}  // namespace

Preconditioner make_identity(Eigen::Index n) {
  Preconditioner p;
  p.S = MatrixXd::Identity(n, n);
  p.kind = PrecondKind::Identity;
  p.label = "identity";
  p.trivial_kernel_ratio = 1.0;
  return p;
}

Preconditioner make_random_invertible(Eigen::Index n, std::uint64_t seed,
                                      double cond_limit, int max_tries) {
  Preconditioner p;
  p.kind = PrecondKind::RandomInvertible;
  p.label = "randinv";
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Rng rng = Rng::derive(seed, {0x5eedull, static_cast<std::uint64_t>(attempt)});
    MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) S(i, j) = scale * rng.normal();
    }
    const double ratio = spectral_ratio(S);
    if (ratio > 1.0 / cond_limit) {
      p.S = S;
      p.trivial_kernel_ratio = ratio;
      return p;
    }
  }
  throw ConditioningError(
      "make_random_invertible: no draw met the conditioning limit after " +
          std::to_string(max_tries) + " tries",
      -1);
}

namespace {

Preconditioner symmetric_power(const HardInstance& inst, double power, PrecondKind kind,
                               const char* label) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(inst.theta_tilde);
  if (es.info() != Eigen::Success) {
    throw ConditioningError("preconditioner eigendecomposition failed", -1);
  }
  const VectorXd ev = es.eigenvalues().array().pow(power).matrix();
  Preconditioner p;
  p.S = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  p.kind = kind;
  p.label = label;
  p.trivial_kernel_ratio = spectral_ratio(p.S);
  return p;
}

}  // namespace

Preconditioner make_whitening(const HardInstance& inst) {
  return symmetric_power(inst, 0.5, PrecondKind::Whitening, "sqrt");
}

Preconditioner make_ridge_root(const HardInstance& inst) {
  return symmetric_power(inst, -0.5, PrecondKind::RidgeRoot, "invsqrt");
}

Preconditioner load_preconditioner(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open preconditioner file: " + path, 0);
  std::string line;
  std::int64_t lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      throw ParseError("unexpected end of preconditioner file: " + path, lineno);
    }
    ++lineno;
  };
  next_line();
  std::istringstream hdr(line);
  Eigen::Index n = 0, s = 0;
  if (!(hdr >> n >> s) || n < 1 || s < 1) {
    throw ParseError("bad preconditioner header, expected \"n s\"", lineno);
  }
  Preconditioner p;
  p.kind = PrecondKind::CustomFile;
  p.label = "file:" + path;
  p.S.resize(n, s);
  for (Eigen::Index i = 0; i < n; ++i) {
    next_line();
    std::istringstream row(line);
    for (Eigen::Index j = 0; j < s; ++j) {
      if (!(row >> p.S(i, j))) {
        throw ParseError("bad preconditioner row: expected " + std::to_string(s) +
                             " values",
                         lineno);
      }
    }
    double extra;
    if (row >> extra) {
      throw ParseError("bad preconditioner row: more than " + std::to_string(s) +
                           " values",
                       lineno);
    }
  }
  p.trivial_kernel_ratio = spectral_ratio(p.S);
  return p;
}

void save_preconditioner(const Preconditioner& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open for writing: " + path);
  out << p.S.rows() << " " << p.S.cols() << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < p.S.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.S.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", p.S(i, j));
      out << buf << (j + 1 < p.S.cols() ? " " : "");
    }
    out << "\n";
  }
  if (!out) throw ParameterError("write failed: " + path);
}

bool has_trivial_left_kernel(const Preconditioner& p) {
  return p.trivial_kernel_ratio > 1e-8;
}

double alpha_ratio(const HardInstance& inst, const Preconditioner& S,
                   const VectorXd& w) {
  if (w.size() != inst.M.n()) throw ParameterError("alpha_ratio: |w| != n");
  const double l1 = (S.S.transpose() * w).lpNorm<1>();
  if (l1 == 0.0) throw ParameterError("alpha_ratio: S^T w = 0");
  return quad_form_inv(inst, w) / (l1 * l1);
}

double beta_lower_estimate(const HardInstance& inst, const Preconditioner& S,
                           const MatrixXd& V, std::int64_t n_probes,
                           std::uint64_t seed) {
  const Eigen::Index dim = V.cols();
  if (dim == 0) throw ParameterError("beta_lower_estimate: dim V = 0");
  if (V.rows() != inst.M.n()) throw ParameterError("beta_lower_estimate: rows(V) != n");
  if ((V.transpose() * V - MatrixXd::Identity(dim, dim)).norm() > 1e-8) {
    throw ParameterError("beta_lower_estimate: V must have orthonormal columns");
  }
  // pull both quadratic forms back to V-coordinates once
  const MatrixXd G = inst.chol.triangularView<Eigen::Lower>().solve(V);
  const MatrixXd Q = G.transpose() * G;      // g' Q g = (Vg)' Sigma (Vg)
  const MatrixXd B = S.S.transpose() * V;    // ||B g||_1 = ||S'(Vg)||_1

  auto ratio = [&](const VectorXd& g) {
    const double l1 = (B * g).lpNorm<1>();
    if (l1 == 0.0) return std::numeric_limits<double>::infinity();
    return g.dot(Q * g) / (l1 * l1);
  };

  Rng rng = Rng::derive(seed, {0xbe7aull});
  VectorXd best_g = VectorXd::Zero(dim);
  best_g(0) = 1.0;
  double best = ratio(best_g);
  for (std::int64_t p = 0; p < n_probes; ++p) {
    VectorXd g(dim);
    for (Eigen::Index i = 0; i < dim; ++i) g(i) = rng.normal();
    const double nrm = g.norm();
    if (nrm == 0.0) continue;
    g /= nrm;
    const double val = ratio(g);
    if (val < best) { best = val; best_g = g; }
  }
  // coordinate-descent refinement with a shrinking step
  double h = 0.5;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool improved = false;
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (const double sgn : {1.0, -1.0}) {
        VectorXd g = best_g;
        g(i) += sgn * h;
        const double nrm = g.norm();
        if (nrm == 0.0) continue;
        g /= nrm;
        const double val = ratio(g);
        if (val < best) { best = val; best_g = g; improved = true; }
      }
    }
    if (!improved) {
      h *= 0.5;
      if (h < 1e-6) break;
    }
  }
  return best;
}

}  // namespace erlasso::instance
