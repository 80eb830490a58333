#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "erlasso/errors.hpp"

namespace erlasso::design {

// Sorted list of 0-based indices (coordinates or equations).
using IndexSet = std::vector<std::int32_t>;

// m x n binary matrix viewed as a bipartite graph between equations (rows)
// and coordinates (columns). Immutable after construction; the column lists
// are materialized lazily for N'(E) queries.
class BinaryDesign {
 public:
  BinaryDesign() : m_(0), n_(0), d_(0.0), p_(0.0), seed_(0), nnz_(0) {}
  BinaryDesign(std::int32_t m, std::int32_t n, std::vector<IndexSet> rows,
               double d, double p, std::uint64_t seed);

  static BinaryDesign from_rows(std::int32_t m, std::int32_t n,
                                std::vector<IndexSet> rows,
                                std::optional<double> d = std::nullopt);

  std::int32_t m() const { return m_; }
  std::int32_t n() const { return n_; }
  double d() const { return d_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t nnz() const { return nnz_; }

  const IndexSet& row(std::int32_t i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<IndexSet>& row_lists() const { return rows_; }
  const std::vector<IndexSet>& col_lists() const;  // lazy, cached

  std::int32_t row_degree(std::int32_t i) const {
    return static_cast<std::int32_t>(rows_[static_cast<std::size_t>(i)].size());
  }
  std::int32_t col_degree(std::int32_t j) const {
    return static_cast<std::int32_t>(col_lists()[static_cast<std::size_t>(j)].size());
  }

  Eigen::MatrixXd dense() const;
  // rows with index in keep (sorted), all columns: M_{keep, :}
  Eigen::MatrixXd dense_rows(const IndexSet& keep) const;

  bool same_entries(const BinaryDesign& other) const;

 private:
  std::int32_t m_, n_;
  double d_, p_;
  std::uint64_t seed_;
  std::int64_t nnz_;
  std::vector<IndexSet> rows_;
  mutable std::vector<IndexSet> cols_;
  mutable bool cols_built_ = false;
};

// i.i.d. Bernoulli(p) entries with p = d/m (requires 0 <= d <= m).
// Deterministic in (m, n, d, seed); row-major generation order.
BinaryDesign gen_bernoulli_design(std::int32_t m, std::int32_t n, double d,
                                  std::uint64_t seed);

struct Neighborhoods {
  IndexSet N;  // equations adjacent to S
  IndexSet U;  // equations with exactly one neighbor in S
};

// N(S) and the unique neighborhood U(S) for a coordinate set S.
Neighborhoods neighborhoods(const BinaryDesign& M, const IndexSet& S);

// N'(E): coordinates adjacent to an equation set E.
IndexSet equation_neighborhood(const BinaryDesign& M, const IndexSet& E);

enum class CheckMode { Exhaustive, Sampled };

struct SubsetWitness {
  IndexSet subset;          // offending or extremal subset (coordinates)
  IndexSet partner;         // second subset for intersection witnesses
  double value = 0.0;       // measured quantity
  double bound = 0.0;       // bound it is compared against
};

struct AssumptionReport {
  double epsilon = 0.0;
  std::int32_t k = 0;
  CheckMode mode = CheckMode::Exhaustive;

  bool degree_ok = false;        // |N(j)| <= (1+eps) d  and  |N'(i)| <= (1+eps)(n/m) d
  bool expansion_ok = false;     // |N(S)| >= (1-eps) d |S| for all |S| <= k
  bool intersection_ok = false;  // |N(S) ∩ N(T)| <= (sqrt(d)/8) max(|S|,|T|), S,T disjoint
  bool unique_neighbor_ok = false;  // |U(S)| >= (1-3eps) d |S| (derived second pass)
  bool all_ok = false;

  // empirically smallest epsilon for which each family of bounds holds
  double eps_min_expansion = 0.0;
  double eps_min_degree = 0.0;
  double worst_intersection_ratio = 0.0;  // max |N∩N| / max(|S|,|T|), vs sqrt(d)/8

  SubsetWitness worst_expansion;     // minimizes |N(S)| / (d|S|)
  SubsetWitness worst_col_degree;
  SubsetWitness worst_row_degree;
  SubsetWitness worst_intersection;  // maximizes |N(S)∩N(T)| / max(|S|,|T|)
  SubsetWitness worst_unique;        // minimizes |U(S)| / (d|S|)

  std::int64_t subsets_checked = 0;
  std::int64_t pairs_checked = 0;
  bool constant_regime_met = false;  // d >= 16
};

// Verifies degree bounds, expansion, bounded intersection and the derived
// unique-neighbor bound. Exhaustive mode enumerates all subsets of size <= k
// lexicographically and refuses (BudgetError) when sum_{l<=k} C(n,l) exceeds
// subset_budget; sampled mode draws n_samples subsets (and disjoint pairs)
// per size.
AssumptionReport check_assumption(const BinaryDesign& M, double epsilon,
                                  std::int32_t k, CheckMode mode,
                                  std::int64_t n_samples = 100000,
                                  std::int64_t subset_budget = 10000000,
                                  std::uint64_t sample_seed = 0);

// ASCII format: "m n nnz" header then nnz lines "i j" (1-based, row-major
// sorted), then optional "# key value" metadata comment lines.
void serialize_design(const BinaryDesign& M, const std::filesystem::path& path);
std::string serialize_design_string(const BinaryDesign& M);
BinaryDesign load_design(const std::filesystem::path& path);
BinaryDesign load_design_string(const std::string& text);

}  // namespace erlasso::design
