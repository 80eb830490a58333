#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erlasso/instance.hpp"
#include "erlasso/lasso.hpp"

namespace erlasso::harness {

// flat key = value text format; see parse_config for the key list
struct ExperimentConfig {
  std::string design_file;  // when empty, generate from the parameters below
  std::int32_t design_m = 0;
  std::int32_t design_n = 0;
  double design_d = 0.0;
  std::uint64_t design_seed = 1;
  double epsilon = 1e-6;
  std::string signal = "invertible";  // invertible | mixture
  std::int32_t k = 3;
  std::int32_t t = 0;
  std::vector<std::string> preconditioners = {"identity"};
  std::vector<std::int32_t> m_list;
  std::int32_t trials = 50;
  std::uint64_t master_seed = 1;
  lasso::Tolerances tols;
  std::string out_dir = ".";
  // assertions checked against every cell after the sweep (all optional)
  std::optional<double> assert_failure_rate_min;
  std::optional<double> assert_failure_rate_max;
  bool assert_no_errors = false;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct AssertionOutcome {
  std::string name;
  std::string detail;
  bool pass = false;
};

// empty when nothing was configured; run-experiment exits nonzero iff any fail
std::vector<AssertionOutcome> evaluate_assertions(const ExperimentConfig& cfg,
                                                  const struct FailureReport& report);

// label: identity | randinv | sqrt | invsqrt | file:PATH (left kernel checked)
instance::Preconditioner make_preconditioner(const std::string& label,
                                             const instance::HardInstance& inst,
                                             std::uint64_t master_seed);

struct TrialRecord {
  std::int32_t cell = 0;
  std::string preconditioner;
  std::int32_t m = 0;
  std::int32_t trial = 0;
  lasso::Outcome outcome = lasso::Outcome::Ambiguous;
  double objective_at_wstar = 0.0;
  double objective_at_solution = 0.0;
  double improvement = 0.0;
  double recovery_error = 0.0;
  std::string branch;
  std::string solver_status;
  std::string error;  // nonempty when the trial aborted with an exception
};

struct CellSummary {
  std::string preconditioner;
  std::int32_t m = 0;
  std::int32_t trials = 0;
  std::int32_t failures = 0;
  std::int32_t successes = 0;
  std::int32_t ambiguous = 0;  // includes errored trials, reported separately too
  std::int32_t errors = 0;
  double failure_rate = 0.0;
  double success_rate = 0.0;
  double ambiguous_rate = 0.0;
  double mean_objective_gap = 0.0;
  double wall_seconds = 0.0;  // stderr / in-memory only, never serialized
};

struct FailureReport {
  std::int32_t design_m = 0;
  std::int32_t design_n = 0;
  double design_d = 0.0;
  double epsilon = 0.0;
  std::string signal;
  std::int32_t k = 0;
  std::int32_t t = 0;
  std::uint64_t master_seed = 0;
  std::vector<TrialRecord> trials;
  std::vector<CellSummary> cells;
};

// runs the full sweep and writes report.json, summary.csv and plotdata/ under
// cfg.out_dir; wall-clock times go to stderr only
FailureReport run_failure_experiment(const ExperimentConfig& cfg);

// format: json (report.json, JSON lines) | csv (summary.csv) | plotdata
// (plotdata/<preconditioner>.csv with x = m/n, y = failure_rate)
void emit_report(const FailureReport& report, const std::string& format,
                 const std::string& out_dir);
std::string report_to_json_lines(const FailureReport& report);
FailureReport report_from_json_lines(const std::string& text);

struct ProjectionValidation {
  std::int32_t m = 0;
  std::int32_t r = 0;
  std::int32_t trials = 0;
  bool vacuous = false;  // r <= 2m: no assertion made
  // fixed v in ker(theta): v'(I-P)v >= ||v||^2 / 8
  double freq_no_alignment = 0.0;
  double bound_no_alignment = 0.0;  // 1 - 4m/(3r)
  bool no_alignment_ok = false;
  // all-a bound ||Proj_{span theta} X'a|| <= C sqrt(n*eps/lambda) ||X'a||
  double freq_near_kernel = 0.0;
  double max_kernel_ratio = 0.0;
  double near_kernel_bound = 0.0;
  // restricted variant: inf_a ||(u - X'a)_P||_2 >= (eta/32) ||u_P||_2
  double freq_restricted = 0.0;
  double bound_restricted = 0.0;
  bool restricted_ok = false;
  double slack = 0.0;
};

ProjectionValidation validate_projection_lemmas(const instance::HardInstance& inst,
                                                std::int32_t m, std::int32_t trials,
                                                std::uint64_t seed, double eta,
                                                std::int32_t tau, double slack = 0.05,
                                                double c_near_kernel = 3.0);

struct RandomSumValidation {
  std::int32_t trials = 0;
  std::int64_t violations = 0;
  double freq = 0.0;
  double delta = 0.0;
  double std_err = 0.0;
  bool pass = false;    // freq <= delta + 3 * std_err
  bool vacuous = false;  // all vectors zero: the event is certain
};

// Pr[ ||sum Z_i v_i||_1 < delta * max_i ||v_i||_1 ] <= delta, Z_i ~ Unif[-1,1]
RandomSumValidation validate_random_sum_lemma(const std::vector<Eigen::VectorXd>& vectors,
                                              double delta, std::int32_t trials,
                                              std::uint64_t seed);

}  // namespace erlasso::harness
