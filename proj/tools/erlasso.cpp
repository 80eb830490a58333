// Command line front end: design generation and verification, erasure
// certificates, hard-instance construction, signal sampling, single lasso
// runs, partial recovery and the full failure-rate experiment driver.
//
// All outputs are deterministic functions of the flags and seeds; wall-clock
// timing never reaches stdout or any output file.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erlasso/design.hpp"
#include "erlasso/erasure.hpp"
#include "erlasso/errors.hpp"
#include "erlasso/harness.hpp"
#include "erlasso/instance.hpp"
#include "erlasso/lasso.hpp"
#include "erlasso/partial.hpp"
#include "erlasso/rng.hpp"

namespace {

using nlohmann::json;
using namespace erlasso;

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  out << text;
}

// instance files carry the design verbatim plus the construction parameters,
// so reloading rebuilds the identical instance
std::string instance_to_json(const design::BinaryDesign& M, const instance::HardInstance& inst) {
  json j;
  j["schema"] = "hard-instance/1";
  j["design"] = design::serialize_design_string(M);
  j["epsilon"] = inst.epsilon;
  j["lambda"] = inst.lambda;
  j["r"] = inst.r;
  j["theta_zero"] = inst.theta_zero;
  j["lambda_floor_met"] = inst.lambda_floor_met;
  return j.dump() + "\n";
}

instance::HardInstance load_instance_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance file: invalid JSON: ") + e.what(), 1);
  }
  if (j.value("schema", "") != "hard-instance/1")
    throw ParseError("instance file: expected schema hard-instance/1", 1);
  const design::BinaryDesign M = design::load_design_string(j.at("design").get<std::string>());
  return instance::build_instance(M, j.at("epsilon").get<double>());
}

// vector files: first token n, then n whitespace-separated values
Eigen::VectorXd load_vector_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::int64_t n = 0;
  if (!(in >> n) || n < 0) throw ParseError("vector file: expected length header", 1);
  Eigen::VectorXd x(n);
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(in >> x[i]))
      throw ParseError("vector file: expected " + std::to_string(n) + " values", 1);
  }
  double extra;
  if (in >> extra) throw ParseError("vector file: trailing values", 1);
  return x;
}

std::vector<std::int32_t> parse_index_list(const std::string& text) {
  std::vector<std::int32_t> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<std::int32_t>(std::stol(item)));
  }
  return out;
}

// adversary specs: target:J | ball:C,R | random:B | list:i,j,... | file:PATH;
// anything without a recognized prefix is read as a file of 0-based indices
partial::ErasureAdversary parse_adversary_spec(const std::string& spec,
                                               std::int32_t default_budget) {
  partial::ErasureAdversary adv;
  adv.budget = default_budget;
  const std::size_t colon = spec.find(':');
  const std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "target") {
    adv.strategy = partial::Strategy::TargetCoordinate;
    adv.target = static_cast<std::int32_t>(std::stol(rest));
    return adv;
  }
  if (head == "ball") {
    const std::vector<std::int32_t> cr = parse_index_list(rest);
    if (cr.size() != 2) throw ParameterError("ball adversary needs 'ball:CENTER,RADIUS'");
    adv.strategy = partial::Strategy::NeighborhoodBall;
    adv.center = cr[0];
    adv.radius = cr[1];
    return adv;
  }
  if (head == "random") {
    adv.strategy = partial::Strategy::Random;
    adv.budget = static_cast<std::int32_t>(std::stol(rest));
    return adv;
  }
  if (head == "list") {
    adv.strategy = partial::Strategy::Explicit;
    adv.explicit_set = parse_index_list(rest);
    adv.budget = static_cast<std::int32_t>(adv.explicit_set.size());
    return adv;
  }
  const std::string name = head == "file" ? rest : spec;
  std::istringstream in(read_text_file(name));
  adv.strategy = partial::Strategy::Explicit;
  std::int64_t idx = 0;
  while (in >> idx) adv.explicit_set.push_back(static_cast<std::int32_t>(idx));
  adv.budget = static_cast<std::int32_t>(adv.explicit_set.size());
  return adv;
}

struct SignalFileEntry {
  Eigen::VectorXd w_star;
  std::string branch;
};

std::vector<SignalFileEntry> load_signals_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<SignalFileEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("signals file: invalid JSON: ") + e.what(), lineno);
    }
    SignalFileEntry e;
    const auto arr = j.at("w_star");
    e.w_star.resize(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      e.w_star[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    e.branch = j.value("branch", "");
    out.push_back(std::move(e));
  }
  return out;
}

const char* mode_name(design::CheckMode m) {
  return m == design::CheckMode::Exhaustive ? "exhaustive" : "sampled";
}

const char* verdict_name(erasure::CertVerdict v) {
  switch (v) {
    case erasure::CertVerdict::Unverified: return "unverified";
    case erasure::CertVerdict::Verified: return "verified";
    case erasure::CertVerdict::Refuted: return "refuted";
    case erasure::CertVerdict::Statistical: return "statistical";
  }
  return "unverified";
}

int cmd_gen_design(std::int32_t m, std::int32_t n, double d, std::uint64_t seed,
                   const std::string& out) {
  const design::BinaryDesign M = design::gen_bernoulli_design(m, n, d, seed);
  design::serialize_design(M, out);
  std::cout << "design m=" << M.m() << " n=" << M.n() << " nnz=" << M.nnz()
            << " d=" << g17(M.d()) << " p=" << g17(M.p()) << " seed=" << M.seed()
            << " -> " << out << "\n";
  return 0;
}

int cmd_check_expander(const std::string& in, double epsilon, std::int32_t k,
                       const std::string& mode, std::int64_t samples,
                       std::int64_t subset_budget, std::uint64_t seed) {
  const design::BinaryDesign M = design::load_design(in);
  const design::CheckMode cm =
      mode == "sampled" ? design::CheckMode::Sampled : design::CheckMode::Exhaustive;
  const design::AssumptionReport rep =
      design::check_assumption(M, epsilon, k, cm, samples, subset_budget, seed);
  std::cout << "mode=" << mode_name(rep.mode) << " epsilon=" << g17(rep.epsilon)
            << " k=" << rep.k << "\n";
  std::cout << "degree_ok=" << rep.degree_ok
            << " (worst column " << g17(rep.worst_col_degree.value) << " vs "
            << g17(rep.worst_col_degree.bound) << ", worst row "
            << g17(rep.worst_row_degree.value) << " vs " << g17(rep.worst_row_degree.bound)
            << ")\n";
  std::cout << "expansion_ok=" << rep.expansion_ok << " (worst |N(S)| "
            << g17(rep.worst_expansion.value) << " vs " << g17(rep.worst_expansion.bound)
            << ", eps_min=" << g17(rep.eps_min_expansion) << ")\n";
  std::cout << "intersection_ok=" << rep.intersection_ok << " (worst ratio "
            << g17(rep.worst_intersection_ratio) << " vs sqrt(d)/8)\n";
  std::cout << "unique_neighbor_ok=" << rep.unique_neighbor_ok << " (worst |U(S)| "
            << g17(rep.worst_unique.value) << " vs " << g17(rep.worst_unique.bound) << ")\n";
  std::cout << "subsets_checked=" << rep.subsets_checked
            << " pairs_checked=" << rep.pairs_checked
            << " constant_regime_met=" << rep.constant_regime_met << "\n";
  std::cout << "all_ok=" << rep.all_ok << "\n";
  return rep.all_ok ? 0 : 1;
}

int cmd_check_erasure(const std::string& design_path, const std::string& b_spec,
                      std::int32_t tau, double eta, double delta,
                      const std::string& mode, const std::string& method,
                      std::int64_t samples, std::uint64_t seed,
                      std::int64_t subset_budget, std::int32_t budget,
                      const std::string& out) {
  const design::BinaryDesign M = design::load_design(design_path);
  partial::ErasureAdversary adv =
      parse_adversary_spec(b_spec, budget > 0 ? budget : M.m());
  if (budget > 0) adv.budget = budget;
  const partial::ErasureOutcome eo = partial::erase(M, adv, seed);
  const double dlt = delta > 0 ? delta : erasure::default_delta(M);
  const erasure::CertMethod cmeth = method == "constructive"
                                        ? erasure::CertMethod::Constructive
                                        : erasure::CertMethod::BruteForce;
  erasure::ErasureCertificate cert =
      erasure::construct_unidentifiable_set(M, eo.B, tau, dlt, cmeth, eta, subset_budget);
  const design::CheckMode cm =
      mode == "sampled" ? design::CheckMode::Sampled : design::CheckMode::Exhaustive;
  cert = erasure::verify_erasure_robustness(M, cert, cm, samples, seed, subset_budget);
  std::cout << "B: " << cert.b << " equations (truncated=" << eo.truncated << ")\n";
  std::cout << "C: " << cert.b_prime << " coordinates\n";
  std::cout << "eta=" << g17(cert.eta) << " tau=" << cert.tau << " delta=" << g17(cert.delta)
            << "\n";
  std::cout << "method=" << (cmeth == erasure::CertMethod::BruteForce ? "brute" : "constructive")
            << " passes=" << cert.construction_passes
            << " supports_checked=" << cert.supports_checked
            << " samples_checked=" << cert.samples_checked << "\n";
  std::cout << "verdict=" << verdict_name(cert.verdict) << "\n";
  if (!out.empty()) write_text_file(out, erasure::certificate_to_json(cert));
  return cert.verdict == erasure::CertVerdict::Refuted ? 1 : 0;
}

int cmd_build_instance(const std::string& design_path, double epsilon,
                       const std::string& out) {
  const design::BinaryDesign M = design::load_design(design_path);
  const instance::HardInstance inst = instance::build_instance(M, epsilon);
  if (!out.empty()) write_text_file(out, instance_to_json(M, inst));
  std::cout << "n=" << M.n() << " m=" << M.m() << " epsilon=" << g17(inst.epsilon)
            << " lambda=" << (inst.theta_zero ? "undefined" : g17(inst.lambda))
            << " kernel_dim=" << inst.r
            << " lambda_floor_met=" << inst.lambda_floor_met << "\n";
  return 0;
}

int cmd_sample_signals(const std::string& instance_path, const std::string& dist,
                       std::int32_t k, std::int32_t t, std::int32_t count,
                       std::uint64_t seed, const std::string& out) {
  const instance::HardInstance inst = load_instance_file(instance_path);
  std::ostringstream os;
  for (std::int32_t i = 0; i < count; ++i) {
    const std::uint64_t si =
        Rng::derive_seed(seed, {0x516aull, static_cast<std::uint64_t>(i)});
    const instance::SignalDraw draw =
        dist == "mixture" ? instance::sample_signal_mixture(inst, k, t, si)
                          : instance::sample_signal_invertible(inst, k, t, si);
    json j;
    j["trial"] = i;
    j["branch"] = instance::to_string(draw.branch);
    j["k"] = draw.k;
    j["t"] = draw.t;
    j["sparsity_bound"] = draw.sparsity_bound;
    j["zero_rows_resampled"] = draw.zero_rows_resampled;
    json arr = json::array();
    for (Eigen::Index q = 0; q < draw.w_star.size(); ++q) arr.push_back(draw.w_star[q]);
    j["w_star"] = arr;
    os << j.dump() << "\n";
  }
  if (out.empty())
    std::cout << os.str();
  else
    write_text_file(out, os.str());
  return 0;
}

int cmd_run_lasso(const std::string& instance_path, const std::string& precond,
                  std::int32_t m, const std::string& signals_path, std::int32_t trials,
                  std::uint64_t seed, const std::string& out) {
  const instance::HardInstance inst = load_instance_file(instance_path);
  const instance::Preconditioner S = harness::make_preconditioner(precond, inst, seed);
  const std::vector<SignalFileEntry> signals = load_signals_file(signals_path);
  const std::int32_t nt =
      trials > 0 ? trials : static_cast<std::int32_t>(signals.size());
  if (nt > static_cast<std::int32_t>(signals.size()))
    throw ParameterError("signals file holds " + std::to_string(signals.size()) +
                         " signals, fewer than the requested " + std::to_string(nt) +
                         " trials");
  const lasso::Tolerances tols;
  std::int32_t failures = 0, successes = 0, ambiguous = 0;
  std::ostringstream os;
  for (std::int32_t i = 0; i < nt; ++i) {
    const Eigen::VectorXd& w_star = signals[static_cast<std::size_t>(i)].w_star;
    if (w_star.size() != inst.theta_tilde.rows())
      throw ParameterError("signal dimension does not match the instance");
    const Eigen::MatrixXd X = instance::sample_covariates(
        inst, m, Rng::derive_seed(seed, {0x10a5ull, static_cast<std::uint64_t>(i)}));
    lasso::LassoProblem prob;
    prob.X = X;
    prob.y = X * w_star;
    prob.S = S.S;
    prob.w_star = w_star;
    const lasso::SolveResult sol = lasso::solve_preconditioned_lasso(prob, tols);
    const lasso::DirectionReport dir = lasso::improving_direction(prob, tols);
    const lasso::LassoVerdict v = lasso::adjudicate(prob, sol, dir, tols);
    switch (v.outcome) {
      case lasso::Outcome::Failure: ++failures; break;
      case lasso::Outcome::Success: ++successes; break;
      default: ++ambiguous; break;
    }
    json j;
    j["trial"] = i;
    j["preconditioner"] = S.label;
    j["m"] = m;
    j["outcome"] = lasso::to_string(v.outcome);
    j["objective_at_wstar"] = v.objective_at_wstar;
    j["objective_at_solution"] = v.objective_at_solution;
    j["improvement"] = v.improvement;
    j["recovery_error"] = v.recovery_error;
    j["solver_status"] = lp::to_string(v.solver_status);
    j["tol_gap"] = tols.tol_gap;
    j["tol_obj_rel"] = tols.tol_obj_rel;
    j["tol_rec"] = tols.tol_rec;
    j["tol_feas"] = tols.tol_feas;
    os << j.dump() << "\n";
  }
  write_text_file(out, os.str());
  // companion summary: same path with a .csv extension
  std::filesystem::path csv_path(out);
  csv_path.replace_extension(".csv");
  std::ostringstream cs;
  cs << "preconditioner,m,failure_rate,success_rate,ambiguous_rate,trials\n";
  cs << S.label << ',' << m << ',' << g17(static_cast<double>(failures) / nt) << ','
     << g17(static_cast<double>(successes) / nt) << ','
     << g17(static_cast<double>(ambiguous) / nt) << ',' << nt << "\n";
  write_text_file(csv_path.string(), cs.str());
  std::cout << "trials=" << nt << " failures=" << failures << " successes=" << successes
            << " ambiguous=" << ambiguous << " -> " << out << ", " << csv_path.string()
            << "\n";
  return 0;
}

int cmd_partial_recover(const std::string& design_path, const std::string& adversary,
                        std::int32_t k_max, double delta, const std::string& xstar_path,
                        const std::string& cert_path, std::uint64_t seed,
                        std::int64_t subset_budget, std::int32_t budget,
                        const std::string& out) {
  const design::BinaryDesign M = design::load_design(design_path);
  partial::ErasureAdversary adv =
      parse_adversary_spec(adversary, budget > 0 ? budget : M.m());
  if (budget > 0) adv.budget = budget;
  const partial::ErasureOutcome eo = partial::erase(M, adv, seed);
  const Eigen::VectorXd x_star = load_vector_file(xstar_path);
  if (x_star.size() != M.n())
    throw ParameterError("x* has dimension " + std::to_string(x_star.size()) +
                         ", design has n = " + std::to_string(M.n()));
  const design::IndexSet keep = erasure::complement(eo.B, M.m());
  const Eigen::MatrixXd A = M.dense_rows(keep);
  const Eigen::VectorXd y = A * x_star;
  const double dlt = delta >= 0 ? delta : partial::default_recovery_delta(y);
  const partial::PartialRecoveryResult res =
      partial::l0_minimize(A, y, dlt, k_max, subset_budget);

  json j;
  j["schema"] = "partial-recovery/1";
  json jb = json::array();
  for (std::int32_t i : eo.B) jb.push_back(i);
  j["B"] = jb;
  j["truncated"] = eo.truncated;
  j["delta"] = res.delta;
  j["feasible"] = res.feasible;
  json js = json::array();
  for (std::int32_t i : res.support) js.push_back(i);
  j["support"] = js;
  j["residual_inf"] = res.residual_inf;
  j["supports_tried"] = res.supports_tried;
  j["lp_failures"] = res.lp_failures;
  json jx = json::array();
  for (Eigen::Index q = 0; q < res.x_hat.size(); ++q) jx.push_back(res.x_hat[q]);
  j["x_hat"] = jx;

  std::cout << "|B|=" << eo.B.size() << " truncated=" << eo.truncated
            << " delta=" << g17(res.delta) << "\n";
  std::cout << "feasible=" << res.feasible << " support_size=" << res.support_size
            << " residual_inf=" << g17(res.residual_inf)
            << " supports_tried=" << res.supports_tried << "\n";

  if (!cert_path.empty()) {
    const erasure::ErasureCertificate cert =
        erasure::certificate_from_json(read_text_file(cert_path));
    const partial::PartialEvaluation ev =
        partial::evaluate_partial(res, x_star, cert.C, cert.eta, cert.tau);
    j["transfer"] = {{"err_outside_C", ev.err_outside_C},
                     {"err_inside_C", ev.err_inside_C},
                     {"bound", ev.bound},
                     {"bound_holds", ev.bound_holds},
                     {"applicable", ev.transfer_applicable},
                     {"eta", cert.eta},
                     {"tau", cert.tau}};
    std::cout << "transfer: err_outside_C=" << g17(ev.err_outside_C)
              << " bound=" << g17(ev.bound) << " holds=" << ev.bound_holds
              << " applicable=" << ev.transfer_applicable << "\n";
  }
  if (!out.empty()) write_text_file(out, j.dump() + "\n");
  return 0;
}

int cmd_run_experiment(const std::string& config_path, const std::string& out_dir) {
  harness::ExperimentConfig cfg = harness::load_config_file(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const harness::FailureReport rep = harness::run_failure_experiment(cfg);
  for (const harness::CellSummary& c : rep.cells) {
    std::cout << "cell preconditioner=" << c.preconditioner << " m=" << c.m
              << " trials=" << c.trials << " failure_rate=" << g17(c.failure_rate)
              << " success_rate=" << g17(c.success_rate)
              << " ambiguous_rate=" << g17(c.ambiguous_rate) << " errors=" << c.errors
              << "\n";
  }
  bool all_pass = true;
  for (const harness::AssertionOutcome& a : harness::evaluate_assertions(cfg, rep)) {
    std::cout << "assert " << a.name << ": " << (a.pass ? "pass" : "FAIL") << " ("
              << a.detail << ")\n";
    all_pass = all_pass && a.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erasure-robust designs, hard lasso instances and recovery experiments"};
  app.require_subcommand(1);
  std::function<int()> run;

  {
    auto* c = app.add_subcommand("gen-design", "generate a Bernoulli binary design");
    auto m = std::make_shared<std::int32_t>(0);
    auto n = std::make_shared<std::int32_t>(0);
    auto d = std::make_shared<double>(0.0);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    c->add_option("--m", *m, "equations (rows)")->required();
    c->add_option("--n", *n, "coordinates (columns)")->required();
    c->add_option("--d", *d, "expected column degree (p = d/m)")->required();
    c->add_option("--seed", *seed, "generator seed");
    c->add_option("--out", *out, "output design file")->required();
    c->callback([=, &run]() {
      run = [=]() { return cmd_gen_design(*m, *n, *d, *seed, *out); };
    });
  }
  {
    auto* c = app.add_subcommand("check-expander",
                                 "verify degree, expansion and intersection bounds");
    auto in = std::make_shared<std::string>();
    auto epsilon = std::make_shared<double>(0.0);
    auto k = std::make_shared<std::int32_t>(0);
    auto mode = std::make_shared<std::string>("exhaustive");
    auto samples = std::make_shared<std::int64_t>(100000);
    auto budget = std::make_shared<std::int64_t>(10000000);
    auto seed = std::make_shared<std::uint64_t>(0);
    c->add_option("--in", *in, "design file")->required();
    c->add_option("--epsilon", *epsilon, "slack parameter")->required();
    c->add_option("--k", *k, "largest subset size checked")->required();
    c->add_option("--mode", *mode, "exhaustive | sampled")
        ->check(CLI::IsMember({"exhaustive", "sampled"}));
    c->add_option("--samples", *samples, "subsets per size in sampled mode");
    c->add_option("--subset-budget", *budget, "exhaustive enumeration cap");
    c->add_option("--seed", *seed, "sampling seed");
    c->callback([=, &run]() {
      run = [=]() {
        return cmd_check_expander(*in, *epsilon, *k, *mode, *samples, *budget, *seed);
      };
    });
  }
  {
    auto* c = app.add_subcommand("check-erasure",
                                 "build and verify an erasure-robustness certificate");
    auto design_path = std::make_shared<std::string>();
    auto bspec = std::make_shared<std::string>();
    auto tau = std::make_shared<std::int32_t>(0);
    auto eta = std::make_shared<double>(0.0);
    auto delta = std::make_shared<double>(-1.0);
    auto mode = std::make_shared<std::string>("exhaustive");
    auto method = std::make_shared<std::string>("brute");
    auto samples = std::make_shared<std::int64_t>(100000);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto sbudget = std::make_shared<std::int64_t>(10000000);
    auto budget = std::make_shared<std::int32_t>(0);
    auto out = std::make_shared<std::string>();
    c->add_option("--design", *design_path, "design file")->required();
    c->add_option("--B", *bspec,
                  "erased equations: target:J | ball:C,R | random:B | list:i,j | file")
        ->required();
    c->add_option("--tau", *tau, "sparsity threshold (supports of size < tau)")->required();
    c->add_option("--eta", *eta, "robustness constant")->required();
    c->add_option("--delta", *delta, "quantitative-support scale (default 1e-6 ||M||_F)");
    c->add_option("--mode", *mode, "exhaustive | sampled")
        ->check(CLI::IsMember({"exhaustive", "sampled"}));
    c->add_option("--method", *method, "brute | constructive")
        ->check(CLI::IsMember({"brute", "constructive"}));
    c->add_option("--samples", *samples, "probes in sampled mode");
    c->add_option("--seed", *seed, "adversary / probe seed");
    c->add_option("--subset-budget", *sbudget, "support enumeration cap");
    c->add_option("--budget", *budget, "adversary erasure budget override");
    c->add_option("--out", *out, "certificate JSON output path");
    c->callback([=, &run]() {
      run = [=]() {
        return cmd_check_erasure(*design_path, *bspec, *tau, *eta, *delta, *mode, *method,
                                 *samples, *seed, *sbudget, *budget, *out);
      };
    });
  }
  {
    auto* c = app.add_subcommand("build-instance",
                                 "construct the hard-instance covariance factorization");
    auto design_path = std::make_shared<std::string>();
    auto epsilon = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>();
    c->add_option("--design", *design_path, "design file")->required();
    c->add_option("--epsilon", *epsilon, "ridge parameter (> 0)")->required();
    c->add_option("--out", *out, "instance JSON output path");
    c->callback([=, &run]() {
      run = [=]() { return cmd_build_instance(*design_path, *epsilon, *out); };
    });
  }
  {
    auto* c = app.add_subcommand("sample-signals", "draw signals from an instance");
    auto inst = std::make_shared<std::string>();
    auto dist = std::make_shared<std::string>("invertible");
    auto k = std::make_shared<std::int32_t>(3);
    auto t = std::make_shared<std::int32_t>(0);
    auto count = std::make_shared<std::int32_t>(1);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    c->add_option("--instance", *inst, "instance JSON file")->required();
    c->add_option("--dist", *dist, "invertible | mixture")
        ->check(CLI::IsMember({"invertible", "mixture"}));
    c->add_option("--k", *k, "sparsity of the perturbation / sparse branch");
    c->add_option("--t", *t, "number of design-row terms");
    c->add_option("--count", *count, "signals to draw");
    c->add_option("--seed", *seed, "master seed");
    c->add_option("--out", *out, "JSON lines output (default stdout)");
    c->callback([=, &run]() {
      run = [=]() { return cmd_sample_signals(*inst, *dist, *k, *t, *count, *seed, *out); };
    });
  }
  {
    auto* c = app.add_subcommand("run-lasso", "adjudicate preconditioned-lasso trials");
    auto inst = std::make_shared<std::string>();
    auto precond = std::make_shared<std::string>("identity");
    auto m = std::make_shared<std::int32_t>(0);
    auto signals = std::make_shared<std::string>();
    auto trials = std::make_shared<std::int32_t>(0);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    c->add_option("--instance", *inst, "instance JSON file")->required();
    c->add_option("--precond", *precond, "identity | randinv | sqrt | invsqrt | file:PATH");
    c->add_option("--m", *m, "covariate sample count")->required();
    c->add_option("--signals", *signals, "signals file from sample-signals")->required();
    c->add_option("--trials", *trials, "trials to run (default: all signals)");
    c->add_option("--seed", *seed, "covariate seed");
    c->add_option("--out", *out, "verdict JSON lines output")->required();
    c->callback([=, &run]() {
      run = [=]() {
        return cmd_run_lasso(*inst, *precond, *m, *signals, *trials, *seed, *out);
      };
    });
  }
  {
    auto* c = app.add_subcommand("partial-recover",
                                 "sparse recovery from surviving equations");
    auto design_path = std::make_shared<std::string>();
    auto adversary = std::make_shared<std::string>();
    auto k = std::make_shared<std::int32_t>(0);
    auto delta = std::make_shared<double>(-1.0);
    auto xstar = std::make_shared<std::string>();
    auto cert = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto sbudget = std::make_shared<std::int64_t>(10000000);
    auto budget = std::make_shared<std::int32_t>(0);
    auto out = std::make_shared<std::string>();
    c->add_option("--design", *design_path, "design file")->required();
    c->add_option("--adversary", *adversary,
                  "target:J | ball:C,R | random:B | list:i,j | file:PATH")
        ->required();
    c->add_option("--k", *k, "largest support size tried")->required();
    c->add_option("--delta", *delta, "residual budget (default 1e-9 ||y||_inf)");
    c->add_option("--xstar", *xstar, "ground-truth vector file")->required();
    c->add_option("--cert", *cert, "erasure certificate for the transfer bound");
    c->add_option("--seed", *seed, "adversary seed");
    c->add_option("--subset-budget", *sbudget, "support enumeration cap");
    c->add_option("--budget", *budget, "adversary erasure budget override");
    c->add_option("--out", *out, "result JSON output path");
    c->callback([=, &run]() {
      run = [=]() {
        return cmd_partial_recover(*design_path, *adversary, *k, *delta, *xstar, *cert,
                                   *seed, *sbudget, *budget, *out);
      };
    });
  }
  {
    auto* c = app.add_subcommand("run-experiment", "full failure-rate sweep from a config");
    auto config = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    c->add_option("--config", *config, "flat key = value config file")->required();
    c->add_option("--out-dir", *out_dir, "override the configured output directory");
    c->callback([=, &run]() {
      run = [=]() { return cmd_run_experiment(*config, *out_dir); };
    });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run ? run() : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
