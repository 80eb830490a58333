#include "erlasso/partial.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "erlasso/lp.hpp"
#include "erlasso/rng.hpp"

namespace erlasso::partial {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::int64_t binomial_capped(std::int64_t n, std::int64_t l, std::int64_t cap) {
  if (l < 0 || l > n) return 0;
  l = std::min(l, n - l);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= l; ++i) {
    r = r * (n - l + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

bool next_combination(design::IndexSet& c, std::int32_t n) {
  const std::int32_t l = static_cast<std::int32_t>(c.size());
  std::int32_t i = l - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - l + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (std::int32_t j = i + 1; j < l; ++j) {
    c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::TargetCoordinate: return "target-coordinate";
    case Strategy::NeighborhoodBall: return "neighborhood-ball";
    case Strategy::Random: return "random";
    case Strategy::Explicit: return "explicit";
  }
  return "unknown";
}

ErasureOutcome erase(const design::BinaryDesign& M, const ErasureAdversary& adv,
                     std::uint64_t seed) {
  if (adv.budget < 0 || adv.budget > M.m()) {
    throw ParameterError("erase: budget must be in [0, m]");
  }
  ErasureOutcome out;
  switch (adv.strategy) {
    case Strategy::TargetCoordinate: {
      if (adv.target < 0 || adv.target >= M.n()) {
        throw ParameterError("erase: target coordinate out of range");
      }
      const design::IndexSet& nj = M.col_lists()[static_cast<std::size_t>(adv.target)];
      if (static_cast<std::int32_t>(nj.size()) > adv.budget) {
        out.B.assign(nj.begin(), nj.begin() + adv.budget);
        out.truncated = true;  // partial targeting: N(j) exceeds the budget
      } else {
        out.B = nj;
      }
      break;
    }
    case Strategy::NeighborhoodBall: {
      if (adv.center < 0 || adv.center >= M.n()) {
        throw ParameterError("erase: ball center out of range");
      }
      if (adv.radius < 0) throw ParameterError("erase: ball radius must be >= 0");
      // BFS on the bipartite graph; coordinates sit at even depth, equations at
      // odd depth
      std::vector<std::int32_t> dist_c(static_cast<std::size_t>(M.n()), -1);
      std::vector<std::int32_t> dist_e(static_cast<std::size_t>(M.m()), -1);
      std::queue<std::pair<std::int32_t, bool>> q;  // (index, is_equation)
      dist_c[static_cast<std::size_t>(adv.center)] = 0;
      q.emplace(adv.center, false);
      while (!q.empty()) {
        const auto [idx, is_eq] = q.front();
        q.pop();
        const std::int32_t d =
            is_eq ? dist_e[static_cast<std::size_t>(idx)] : dist_c[static_cast<std::size_t>(idx)];
        if (d >= adv.radius) continue;
        if (is_eq) {
          for (std::int32_t j : M.row(idx)) {
            if (dist_c[static_cast<std::size_t>(j)] < 0) {
              dist_c[static_cast<std::size_t>(j)] = d + 1;
              q.emplace(j, false);
            }
          }
        } else {
          for (std::int32_t i : M.col_lists()[static_cast<std::size_t>(idx)]) {
            if (dist_e[static_cast<std::size_t>(i)] < 0) {
              dist_e[static_cast<std::size_t>(i)] = d + 1;
              q.emplace(i, true);
            }
          }
        }
      }
      // boundary equations: inside the ball, adjacent to a coordinate outside it
      design::IndexSet boundary;
      for (std::int32_t i = 0; i < M.m(); ++i) {
        if (dist_e[static_cast<std::size_t>(i)] < 0) continue;
        for (std::int32_t j : M.row(i)) {
          if (dist_c[static_cast<std::size_t>(j)] < 0) {
            boundary.push_back(i);
            break;
          }
        }
      }
      if (static_cast<std::int32_t>(boundary.size()) > adv.budget) {
        boundary.resize(static_cast<std::size_t>(adv.budget));
        out.truncated = true;
      }
      out.B = boundary;
      break;
    }
    case Strategy::Random: {
      Rng rng = Rng::derive(seed, {0xad50ull});
      out.B = rng.subset(M.m(), adv.budget);
      break;
    }
    case Strategy::Explicit: {
      design::IndexSet b = adv.explicit_set;
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      for (std::int32_t i : b) {
        if (i < 0 || i >= M.m()) throw ParameterError("erase: explicit index out of range");
      }
      if (static_cast<std::int32_t>(b.size()) > adv.budget) {
        b.resize(static_cast<std::size_t>(adv.budget));
        out.truncated = true;
      }
      out.B = b;
      break;
    }
  }
  return out;
}

PartialRecoveryResult l0_minimize(const MatrixXd& A, const VectorXd& y, double delta,
                                  std::int32_t k_max, std::int64_t subset_budget) {
  if (y.size() != A.rows()) throw ParameterError("l0_minimize: |y| != rows(A)");
  if (!(delta >= 0.0)) throw ParameterError("l0_minimize: delta must be >= 0");
  if (k_max < 0) throw ParameterError("l0_minimize: k_max must be >= 0");
  const std::int32_t n = static_cast<std::int32_t>(A.cols());
  const std::int32_t kk = std::min(k_max, n);
  std::int64_t total = 0;
  for (std::int32_t l = 0; l <= kk; ++l) {
    total += binomial_capped(n, l, subset_budget);
    if (total > subset_budget) {
      throw BudgetError("l0_minimize: support enumeration needs " + std::to_string(total) +
                            "+ subsets, budget is " + std::to_string(subset_budget),
                        total, subset_budget);
    }
  }

  PartialRecoveryResult res;
  res.delta = delta;
  res.k_max = k_max;
  res.x_hat = VectorXd::Zero(n);

  // size 0: the zero vector
  ++res.supports_tried;
  res.residual_inf = y.size() > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0;
  if (res.residual_inf <= delta) {
    res.feasible = true;
    return res;
  }

  lp::LpOptions opts;
  for (std::int32_t l = 1; l <= kk; ++l) {
    design::IndexSet T(static_cast<std::size_t>(l));
    for (std::int32_t i = 0; i < l; ++i) T[static_cast<std::size_t>(i)] = i;
    do {
      ++res.supports_tried;
      MatrixXd sub(A.rows(), l);
      for (std::int32_t c = 0; c < l; ++c) sub.col(c) = A.col(T[static_cast<std::size_t>(c)]);
      const lp::ChebyshevFit fit = lp::chebyshev_fit(sub, y, opts);
      if (fit.status != lp::LpStatus::Optimal) ++res.lp_failures;
      if (fit.r_inf <= delta) {
        res.feasible = true;
        res.support = T;
        res.support_size = l;
        for (std::int32_t c = 0; c < l; ++c) res.x_hat(T[static_cast<std::size_t>(c)]) = fit.x(c);
        res.residual_inf = fit.r_inf;
        return res;
      }
    } while (next_combination(T, n));
  }
  res.feasible = false;
  res.residual_inf = y.size() > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0;
  res.x_hat.setZero();
  return res;
}

double default_recovery_delta(const VectorXd& y) {
  return 1e-9 * (y.size() > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0);
}

PartialEvaluation evaluate_partial(const PartialRecoveryResult& result,
                                   const VectorXd& x_star, const design::IndexSet& C,
                                   double eta, std::int32_t tau) {
  if (x_star.size() != result.x_hat.size()) {
    throw ParameterError("evaluate_partial: dimension mismatch");
  }
  PartialEvaluation ev;
  std::vector<char> in_C(static_cast<std::size_t>(x_star.size()), 0);
  for (std::int32_t j : C) {
    if (j < 0 || j >= x_star.size()) throw ParameterError("evaluate_partial: C out of range");
    in_C[static_cast<std::size_t>(j)] = 1;
  }
  double out_sq = 0.0, in_sq = 0.0;
  for (Eigen::Index i = 0; i < x_star.size(); ++i) {
    const double d = result.x_hat(i) - x_star(i);
    (in_C[static_cast<std::size_t>(i)] ? in_sq : out_sq) += d * d;
  }
  ev.err_outside_C = std::sqrt(out_sq);
  ev.err_inside_C = std::sqrt(in_sq);
  ev.bound = 2.0 * result.delta * eta;
  ev.bound_holds = ev.err_outside_C <= ev.bound;
  std::int64_t nnz_star = 0;
  for (Eigen::Index i = 0; i < x_star.size(); ++i) {
    if (x_star(i) != 0.0) ++nnz_star;
  }
  ev.transfer_applicable = result.support_size + nnz_star < tau;
  return ev;
}

}  // namespace erlasso::partial
