#include "erlasso/design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "erlasso/rng.hpp"

namespace erlasso::design {

namespace {

void validate_rows(std::int32_t m, std::int32_t n, const std::vector<IndexSet>& rows) {
  if (m < 0 || n < 0) throw ParameterError("BinaryDesign: negative dimensions");
  if (static_cast<std::int64_t>(rows.size()) != m) {
    throw ParameterError("BinaryDesign: row list count != m");
  }
  for (const IndexSet& r : rows) {
    std::int32_t prev = -1;
    for (std::int32_t j : r) {
      if (j < 0 || j >= n) throw ParameterError("BinaryDesign: column index out of range");
      if (j <= prev) throw ParameterError("BinaryDesign: row entries must be sorted and unique");
      prev = j;
    }
  }
}

std::int64_t count_nnz(const std::vector<IndexSet>& rows) {
  std::int64_t s = 0;
  for (const IndexSet& r : rows) s += static_cast<std::int64_t>(r.size());
  return s;
}

// C(n, l), saturating at cap + 1. Exact integer arithmetic; safe for
// cap <= ~4e9 and n <= 2^31.
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

}  // namespace

BinaryDesign::BinaryDesign(std::int32_t m, std::int32_t n, std::vector<IndexSet> rows,
                           double d, double p, std::uint64_t seed)
    : m_(m), n_(n), d_(d), p_(p), seed_(seed), rows_(std::move(rows)) {
  validate_rows(m_, n_, rows_);
  nnz_ = count_nnz(rows_);
}

BinaryDesign BinaryDesign::from_rows(std::int32_t m, std::int32_t n,
                                     std::vector<IndexSet> rows,
                                     std::optional<double> d) {
  const std::int64_t nnz = count_nnz(rows);
  const double d_eff = d ? *d : (n > 0 ? static_cast<double>(nnz) / n : 0.0);
  const double p_eff = (m > 0 && n > 0)
                           ? static_cast<double>(nnz) / (static_cast<double>(m) * n)
                           : 0.0;
  return BinaryDesign(m, n, std::move(rows), d_eff, p_eff, 0);
}

const std::vector<IndexSet>& BinaryDesign::col_lists() const {
  if (!cols_built_) {
    cols_.assign(static_cast<std::size_t>(n_), {});
    for (std::int32_t i = 0; i < m_; ++i) {
      for (std::int32_t j : rows_[static_cast<std::size_t>(i)]) {
        cols_[static_cast<std::size_t>(j)].push_back(i);
      }
    }
    cols_built_ = true;
  }
  return cols_;
}

Eigen::MatrixXd BinaryDesign::dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m_, n_);
  for (std::int32_t i = 0; i < m_; ++i) {
    for (std::int32_t j : rows_[static_cast<std::size_t>(i)]) D(i, j) = 1.0;
  }
  return D;
}

Eigen::MatrixXd BinaryDesign::dense_rows(const IndexSet& keep) const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()), n_);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::int32_t i = keep[r];
    if (i < 0 || i >= m_) throw ParameterError("dense_rows: row index out of range");
    for (std::int32_t j : rows_[static_cast<std::size_t>(i)]) {
      D(static_cast<Eigen::Index>(r), j) = 1.0;
    }
  }
  return D;
}

bool BinaryDesign::same_entries(const BinaryDesign& other) const {
  return m_ == other.m_ && n_ == other.n_ && rows_ == other.rows_;
}

BinaryDesign gen_bernoulli_design(std::int32_t m, std::int32_t n, double d,
                                  std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw ParameterError("gen_bernoulli_design: m, n must be positive");
  if (m > n) throw ParameterError("gen_bernoulli_design: need m <= n");
  if (!(d >= 0.0) || d > static_cast<double>(m)) {
    throw ParameterError("gen_bernoulli_design: need 0 <= d <= m");
  }
  const double p = d / static_cast<double>(m);
  Rng rng(Rng::mix(seed));
  std::vector<IndexSet> rows(static_cast<std::size_t>(m));
  for (std::int32_t i = 0; i < m; ++i) {
    IndexSet& r = rows[static_cast<std::size_t>(i)];
    for (std::int32_t j = 0; j < n; ++j) {
      if (rng.uniform01() < p) r.push_back(j);
    }
  }
  return BinaryDesign(m, n, std::move(rows), d, p, seed);
}

Neighborhoods neighborhoods(const BinaryDesign& M, const IndexSet& S) {
  std::vector<std::int32_t> count(static_cast<std::size_t>(M.m()), 0);
  const auto& cols = M.col_lists();
  for (std::int32_t j : S) {
    if (j < 0 || j >= M.n()) throw ParameterError("neighborhoods: coordinate out of range");
    for (std::int32_t i : cols[static_cast<std::size_t>(j)]) {
      ++count[static_cast<std::size_t>(i)];
    }
  }
  Neighborhoods out;
  for (std::int32_t i = 0; i < M.m(); ++i) {
    const std::int32_t c = count[static_cast<std::size_t>(i)];
    if (c >= 1) out.N.push_back(i);
    if (c == 1) out.U.push_back(i);
  }
  return out;
}

IndexSet equation_neighborhood(const BinaryDesign& M, const IndexSet& E) {
  std::vector<char> hit(static_cast<std::size_t>(M.n()), 0);
  for (std::int32_t i : E) {
    if (i < 0 || i >= M.m()) throw ParameterError("equation_neighborhood: equation out of range");
    for (std::int32_t j : M.row(i)) hit[static_cast<std::size_t>(j)] = 1;
  }
  IndexSet out;
  for (std::int32_t j = 0; j < M.n(); ++j) {
    if (hit[static_cast<std::size_t>(j)]) out.push_back(j);
  }
  return out;
}

namespace {

// Per-column equation bitmasks for the subset scanner.
struct MaskEngine {
  std::int32_t words;
  std::vector<std::uint64_t> storage;  // column j occupies [j*words, j*words+words)

  explicit MaskEngine(const BinaryDesign& M) {
    words = (M.m() + 63) / 64;
    storage.assign(static_cast<std::size_t>(M.n()) * static_cast<std::size_t>(words), 0);
    const auto& cols = M.col_lists();
    for (std::int32_t j = 0; j < M.n(); ++j) {
      std::uint64_t* w = col(j);
      for (std::int32_t i : cols[static_cast<std::size_t>(j)]) {
        w[i >> 6] |= (1ull << (i & 63));
      }
    }
  }
  std::uint64_t* col(std::int32_t j) {
    return storage.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(words);
  }
  const std::uint64_t* col(std::int32_t j) const {
    return storage.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(words);
  }
};

inline std::int32_t popcount_words(const std::uint64_t* a, std::int32_t words) {
  std::int32_t c = 0;
  for (std::int32_t w = 0; w < words; ++w) c += __builtin_popcountll(a[w]);
  return c;
}

// Flat storage of enumerated subsets for the disjoint-pair phase.
struct RecordStore {
  std::int32_t cwords = 0;  // words over coordinates
  std::int32_t nwords = 0;  // words over equations
  std::vector<std::int32_t> sizes;
  std::vector<std::uint64_t> coord;  // record a at [a*cwords, ...)
  std::vector<std::uint64_t> nbr;    // record a at [a*nwords, ...)

  std::int64_t count() const { return static_cast<std::int64_t>(sizes.size()); }
};

struct ScanAccumulators {
  double worst_exp_ratio = std::numeric_limits<double>::infinity();  // |N|/(d|S|)
  IndexSet worst_exp_subset;
  double worst_exp_value = 0.0, worst_exp_bound = 0.0;
  double worst_uni_ratio = std::numeric_limits<double>::infinity();  // |U|/(d|S|)
  IndexSet worst_uni_subset;
  double worst_uni_value = 0.0, worst_uni_bound = 0.0;
  bool expansion_ok = true;
  bool unique_ok = true;
  std::int64_t subsets = 0;
};

void scan_subset(const MaskEngine& eng, const IndexSet& S, double epsilon, double d,
                 ScanAccumulators& acc, RecordStore* keep) {
  const std::int32_t W = eng.words;
  std::uint64_t once_small[8];
  std::uint64_t twice_small[8];
  std::vector<std::uint64_t> once_big, twice_big;
  std::uint64_t* once;
  std::uint64_t* twice;
  if (W <= 8) {
    once = once_small;
    twice = twice_small;
  } else {
    once_big.assign(static_cast<std::size_t>(W), 0);
    twice_big.assign(static_cast<std::size_t>(W), 0);
    once = once_big.data();
    twice = twice_big.data();
  }
  for (std::int32_t w = 0; w < W; ++w) { once[w] = 0; twice[w] = 0; }
  for (std::int32_t j : S) {
    const std::uint64_t* c = eng.col(j);
    for (std::int32_t w = 0; w < W; ++w) {
      twice[w] |= once[w] & c[w];
      once[w] |= c[w];
    }
  }
  std::int32_t ncount = popcount_words(once, W);
  std::int32_t ucount = 0;
  for (std::int32_t w = 0; w < W; ++w) ucount += __builtin_popcountll(once[w] & ~twice[w]);

  const double sz = static_cast<double>(S.size());
  ++acc.subsets;
  if (d > 0.0 && sz > 0.0) {
    const double denom = d * sz;
    const double exp_ratio = ncount / denom;
    if (exp_ratio < acc.worst_exp_ratio) {
      acc.worst_exp_ratio = exp_ratio;
      acc.worst_exp_subset = S;
      acc.worst_exp_value = ncount;
      acc.worst_exp_bound = (1.0 - epsilon) * denom;
    }
    if (static_cast<double>(ncount) < (1.0 - epsilon) * denom) acc.expansion_ok = false;
    const double uni_ratio = ucount / denom;
    if (uni_ratio < acc.worst_uni_ratio) {
      acc.worst_uni_ratio = uni_ratio;
      acc.worst_uni_subset = S;
      acc.worst_uni_value = ucount;
      acc.worst_uni_bound = (1.0 - 3.0 * epsilon) * denom;
    }
    if (static_cast<double>(ucount) < (1.0 - 3.0 * epsilon) * denom) acc.unique_ok = false;
  }
  if (keep) {
    keep->sizes.push_back(static_cast<std::int32_t>(S.size()));
    const std::size_t cbase = keep->coord.size();
    keep->coord.resize(cbase + static_cast<std::size_t>(keep->cwords), 0);
    for (std::int32_t j : S) {
      keep->coord[cbase + static_cast<std::size_t>(j >> 6)] |= (1ull << (j & 63));
    }
    keep->nbr.insert(keep->nbr.end(), once, once + W);
  }
}

bool next_combination(IndexSet& c, std::int32_t n) {
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

AssumptionReport check_assumption(const BinaryDesign& M, double epsilon,
                                  std::int32_t k, CheckMode mode,
                                  std::int64_t n_samples, std::int64_t subset_budget,
                                  std::uint64_t sample_seed) {
  if (k < 1 || k > M.n()) throw ParameterError("check_assumption: need 1 <= k <= n");
  if (!(epsilon >= 0.0)) throw ParameterError("check_assumption: epsilon must be >= 0");

  AssumptionReport rep;
  rep.epsilon = epsilon;
  rep.k = k;
  rep.mode = mode;
  const double d = M.d();
  rep.constant_regime_met = (d >= 16.0);

  // --- degree bounds (exact linear scans) ---
  const double col_bound = (1.0 + epsilon) * d;
  const double row_bound =
      (1.0 + epsilon) * (static_cast<double>(M.n()) / static_cast<double>(M.m())) * d;
  double worst_col = -1.0, worst_row = -1.0;
  std::int32_t worst_col_j = 0, worst_row_i = 0;
  for (std::int32_t j = 0; j < M.n(); ++j) {
    const double dg = M.col_degree(j);
    if (dg > worst_col) { worst_col = dg; worst_col_j = j; }
  }
  for (std::int32_t i = 0; i < M.m(); ++i) {
    const double dg = M.row_degree(i);
    if (dg > worst_row) { worst_row = dg; worst_row_i = i; }
  }
  rep.degree_ok = (worst_col <= col_bound) && (worst_row <= row_bound);
  rep.worst_col_degree = {{worst_col_j}, {}, worst_col, col_bound};
  rep.worst_row_degree = {{worst_row_i}, {}, worst_row, row_bound};
  double eps_deg = 0.0;
  if (d > 0.0) {
    eps_deg = std::max(eps_deg, worst_col / d - 1.0);
    const double row_base = (static_cast<double>(M.n()) / M.m()) * d;
    if (row_base > 0.0) eps_deg = std::max(eps_deg, worst_row / row_base - 1.0);
  }
  rep.eps_min_degree = std::max(0.0, eps_deg);

  const MaskEngine eng(M);
  const std::int32_t cwords = (M.n() + 63) / 64;
  ScanAccumulators acc;
  RecordStore store;
  store.cwords = cwords;
  store.nwords = eng.words;

  const double isect_bound_per = std::sqrt(std::max(d, 0.0)) / 8.0;
  double worst_isect_ratio = -1.0;
  IndexSet worst_S, worst_T;
  double worst_isect_value = 0.0, worst_isect_bound = 0.0;
  std::int64_t pairs = 0;
  bool isect_ok = true;

  if (mode == CheckMode::Exhaustive) {
    std::int64_t total = 0;
    for (std::int32_t l = 0; l <= k; ++l) {
      total += binomial_capped(M.n(), l, subset_budget);
      if (total > subset_budget) {
        throw BudgetError("check_assumption: exhaustive enumeration needs " +
                              std::to_string(total) + "+ subsets, budget is " +
                              std::to_string(subset_budget),
                          total, subset_budget);
      }
    }
    const std::int64_t nonempty = total - 1;
    const std::int64_t pair_budget = 3000000000ll;
    const std::int64_t pair_count = nonempty * (nonempty - 1) / 2;
    if (pair_count > pair_budget) {
      throw BudgetError("check_assumption: exhaustive disjoint-pair phase needs " +
                            std::to_string(pair_count) +
                            " pair evaluations; use sampled mode",
                        pair_count, pair_budget);
    }
    store.sizes.reserve(static_cast<std::size_t>(nonempty));
    store.coord.reserve(static_cast<std::size_t>(nonempty) * static_cast<std::size_t>(cwords));
    store.nbr.reserve(static_cast<std::size_t>(nonempty) * static_cast<std::size_t>(eng.words));
    for (std::int32_t l = 1; l <= k; ++l) {
      if (l > M.n()) break;
      IndexSet c(static_cast<std::size_t>(l));
      for (std::int32_t i = 0; i < l; ++i) c[static_cast<std::size_t>(i)] = i;
      do {
        scan_subset(eng, c, epsilon, d, acc, &store);
      } while (next_combination(c, M.n()));
    }

    // disjoint-pair phase over the flat store
    const std::int64_t nrec = store.count();
    const std::int32_t CW = cwords, NW = eng.words;
    std::int64_t worst_a = -1, worst_b = -1;
    for (std::int64_t a = 0; a < nrec; ++a) {
      const std::uint64_t* ca = store.coord.data() + a * CW;
      const std::uint64_t* na = store.nbr.data() + a * NW;
      const std::int32_t sa = store.sizes[static_cast<std::size_t>(a)];
      for (std::int64_t b = a + 1; b < nrec; ++b) {
        const std::uint64_t* cb = store.coord.data() + b * CW;
        bool disjoint = true;
        for (std::int32_t w = 0; w < CW; ++w) {
          if (ca[w] & cb[w]) { disjoint = false; break; }
        }
        if (!disjoint) continue;
        const std::uint64_t* nb = store.nbr.data() + b * NW;
        std::int32_t inter = 0;
        for (std::int32_t w = 0; w < NW; ++w) {
          inter += __builtin_popcountll(na[w] & nb[w]);
        }
        ++pairs;
        const std::int32_t sb = store.sizes[static_cast<std::size_t>(b)];
        const double mx = static_cast<double>(std::max(sa, sb));
        const double ratio = inter / mx;
        if (ratio > worst_isect_ratio) {
          worst_isect_ratio = ratio;
          worst_isect_value = inter;
          worst_isect_bound = isect_bound_per * mx;
          worst_a = a;
          worst_b = b;
        }
        if (static_cast<double>(inter) > isect_bound_per * mx) isect_ok = false;
      }
    }
    auto decode = [&](std::int64_t idx) {
      IndexSet S;
      if (idx < 0) return S;
      const std::uint64_t* cm = store.coord.data() + idx * CW;
      for (std::int32_t j = 0; j < M.n(); ++j) {
        if (cm[j >> 6] & (1ull << (j & 63))) S.push_back(j);
      }
      return S;
    };
    worst_S = decode(worst_a);
    worst_T = decode(worst_b);
  } else {
    Rng rng = Rng::derive(sample_seed, {0x5ca1ab1eull});
    for (std::int32_t l = 1; l <= k; ++l) {
      if (l > M.n()) break;
      const std::int64_t cap = binomial_capped(M.n(), l, n_samples);
      const std::int64_t draws = std::min<std::int64_t>(n_samples, cap);
      for (std::int64_t s = 0; s < draws; ++s) {
        const IndexSet S = rng.subset(M.n(), l);
        scan_subset(eng, S, epsilon, d, acc, nullptr);
      }
    }
    Rng prng = Rng::derive(sample_seed, {0xd15c0ull});
    std::vector<std::uint64_t> ma(static_cast<std::size_t>(eng.words));
    std::vector<std::uint64_t> mb(static_cast<std::size_t>(eng.words));
    for (std::int32_t l1 = 1; l1 <= k; ++l1) {
      for (std::int32_t l2 = l1; l2 <= k; ++l2) {
        if (l1 + l2 > M.n()) continue;
        for (std::int64_t s = 0; s < n_samples; ++s) {
          const IndexSet S = prng.subset(M.n(), l1);
          IndexSet comp;
          comp.reserve(static_cast<std::size_t>(M.n() - l1));
          for (std::int32_t j = 0, si = 0; j < M.n(); ++j) {
            if (si < l1 && S[static_cast<std::size_t>(si)] == j) { ++si; continue; }
            comp.push_back(j);
          }
          const IndexSet pick = prng.subset(static_cast<std::int32_t>(comp.size()), l2);
          IndexSet T;
          T.reserve(static_cast<std::size_t>(l2));
          for (std::int32_t idx : pick) T.push_back(comp[static_cast<std::size_t>(idx)]);

          std::fill(ma.begin(), ma.end(), 0);
          std::fill(mb.begin(), mb.end(), 0);
          for (std::int32_t j : S) {
            const std::uint64_t* c = eng.col(j);
            for (std::int32_t w = 0; w < eng.words; ++w) ma[static_cast<std::size_t>(w)] |= c[w];
          }
          for (std::int32_t j : T) {
            const std::uint64_t* c = eng.col(j);
            for (std::int32_t w = 0; w < eng.words; ++w) mb[static_cast<std::size_t>(w)] |= c[w];
          }
          std::int32_t inter = 0;
          for (std::int32_t w = 0; w < eng.words; ++w) {
            inter += __builtin_popcountll(ma[static_cast<std::size_t>(w)] &
                                          mb[static_cast<std::size_t>(w)]);
          }
          ++pairs;
          const double mx = static_cast<double>(std::max(l1, l2));
          const double ratio = inter / mx;
          if (ratio > worst_isect_ratio) {
            worst_isect_ratio = ratio;
            worst_isect_value = inter;
            worst_isect_bound = isect_bound_per * mx;
            worst_S = S;
            worst_T = T;
          }
          if (static_cast<double>(inter) > isect_bound_per * mx) isect_ok = false;
        }
      }
    }
  }

  rep.subsets_checked = acc.subsets;
  rep.expansion_ok = acc.expansion_ok;
  rep.unique_neighbor_ok = acc.unique_ok;
  rep.eps_min_expansion =
      std::max(0.0, 1.0 - (std::isfinite(acc.worst_exp_ratio) ? acc.worst_exp_ratio : 1.0));
  rep.worst_expansion = {acc.worst_exp_subset, {}, acc.worst_exp_value, acc.worst_exp_bound};
  rep.worst_unique = {acc.worst_uni_subset, {}, acc.worst_uni_value, acc.worst_uni_bound};
  rep.pairs_checked = pairs;
  rep.intersection_ok = isect_ok;
  rep.worst_intersection_ratio = std::max(0.0, worst_isect_ratio);
  rep.worst_intersection = {worst_S, worst_T, worst_isect_value, worst_isect_bound};
  rep.all_ok = rep.degree_ok && rep.expansion_ok && rep.intersection_ok;
  return rep;
}

std::string serialize_design_string(const BinaryDesign& M) {
  std::ostringstream os;
  os << M.m() << ' ' << M.n() << ' ' << M.nnz() << '\n';
  for (std::int32_t i = 0; i < M.m(); ++i) {
    for (std::int32_t j : M.row(i)) {
      os << (i + 1) << ' ' << (j + 1) << '\n';
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", M.d());
  os << "# d " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", M.p());
  os << "# p " << buf << '\n';
  os << "# seed " << M.seed() << '\n';
  return os.str();
}

void serialize_design(const BinaryDesign& M, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParameterError("serialize_design: cannot open " + path.string());
  f << serialize_design_string(M);
  if (!f) throw ParameterError("serialize_design: write failed for " + path.string());
}

BinaryDesign load_design_string(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::int64_t lineno = 0;

  auto next_line = [&]() -> bool {
    if (std::getline(is, line)) {
      ++lineno;
      return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError("design file: missing header", 1);
  std::int64_t m = 0, n = 0, nnz = 0;
  {
    std::istringstream h(line);
    if (!(h >> m >> n >> nnz) || m < 0 || n < 0 || nnz < 0) {
      throw ParseError("design file: header must be 'm n nnz'", lineno);
    }
    std::string rest;
    if (h >> rest) throw ParseError("design file: trailing tokens in header", lineno);
  }
  std::vector<IndexSet> rows(static_cast<std::size_t>(m));
  std::int64_t prev_i = 0, prev_j = 0;
  for (std::int64_t e = 0; e < nnz; ++e) {
    if (!next_line()) {
      throw ParseError("design file: expected " + std::to_string(nnz) +
                           " entries, file ended early",
                       lineno + 1);
    }
    std::istringstream h(line);
    std::int64_t i = 0, j = 0;
    if (!(h >> i >> j)) throw ParseError("design file: entry must be 'i j'", lineno);
    std::string rest;
    if (h >> rest) throw ParseError("design file: trailing tokens in entry", lineno);
    if (i < 1 || i > m || j < 1 || j > n) {
      throw ParseError("design file: entry out of range (1-based)", lineno);
    }
    if (i < prev_i || (i == prev_i && j <= prev_j)) {
      throw ParseError("design file: entries must be row-major sorted and unique", lineno);
    }
    prev_i = i;
    prev_j = j;
    rows[static_cast<std::size_t>(i - 1)].push_back(static_cast<std::int32_t>(j - 1));
  }
  std::optional<double> d;
  std::optional<double> p;
  std::uint64_t seed = 0;
  while (next_line()) {
    if (line.empty()) continue;
    if (line[0] != '#') throw ParseError("design file: unexpected content after entries", lineno);
    std::istringstream h(line.substr(1));
    std::string key;
    if (!(h >> key)) continue;
    if (key == "d") { double v = 0; if (h >> v) d = v; }
    else if (key == "p") { double v = 0; if (h >> v) p = v; }
    else if (key == "seed") { std::uint64_t v = 0; if (h >> v) seed = v; }
  }
  const double d_eff = d ? *d : (n > 0 ? static_cast<double>(nnz) / static_cast<double>(n) : 0.0);
  const double p_eff =
      p ? *p
        : ((m > 0 && n > 0)
               ? static_cast<double>(nnz) / (static_cast<double>(m) * static_cast<double>(n))
               : 0.0);
  return BinaryDesign(static_cast<std::int32_t>(m), static_cast<std::int32_t>(n),
                      std::move(rows), d_eff, p_eff, seed);
}

BinaryDesign load_design(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParameterError("load_design: cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_design_string(ss.str());
}

}  // namespace erlasso::design
