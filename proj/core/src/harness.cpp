#include "erlasso/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "erlasso/errors.hpp"
#include "erlasso/numerics.hpp"
#include "erlasso/rng.hpp"

namespace erlasso::harness {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + v + "'", line);
  }
}

std::int32_t parse_i32(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < std::numeric_limits<std::int32_t>::min() ||
        x > std::numeric_limits<std::int32_t>::max())
      throw std::invalid_argument(v);
    return static_cast<std::int32_t>(x);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + v + "'", line);
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ParseError("expected an unsigned integer, got '" + v + "'", line);
  }
}

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

lasso::Outcome outcome_from_string(const std::string& s, int line) {
  if (s == "success") return lasso::Outcome::Success;
  if (s == "failure") return lasso::Outcome::Failure;
  if (s == "ambiguous") return lasso::Outcome::Ambiguous;
  if (s == "error") return lasso::Outcome::Error;
  throw ParseError("unknown outcome '" + s + "'", line);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string safe_filename(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    out.push_back(ok ? c : '-');
  }
  return out.empty() ? std::string("preconditioner") : out;
}

}  // namespace

instance::Preconditioner make_preconditioner(const std::string& label,
                                             const instance::HardInstance& inst,
                                             std::uint64_t master_seed) {
  const Eigen::Index n = inst.theta_tilde.rows();
  if (label == "identity") return instance::make_identity(n);
  if (label == "randinv")
    return instance::make_random_invertible(
        n, Rng::derive_seed(master_seed, {0x90ecull, fnv1a(label)}));
  if (label == "sqrt") return instance::make_whitening(inst);
  if (label == "invsqrt") return instance::make_ridge_root(inst);
  if (label.rfind("file:", 0) == 0) {
    instance::Preconditioner S = instance::load_preconditioner(label.substr(5));
    if (!instance::has_trivial_left_kernel(S))
      throw ParameterError("preconditioner '" + label +
                           "' has a nontrivial left kernel; the penalty could "
                           "vanish on a nonzero direction");
    return S;
  }
  throw ParameterError("unknown preconditioner '" + label +
                       "' (expected identity, randinv, sqrt, invsqrt or file:PATH)");
}

namespace {

json trial_to_json(const TrialRecord& t) {
  json j;
  j["type"] = "trial";
  j["cell"] = t.cell;
  j["preconditioner"] = t.preconditioner;
  j["m"] = t.m;
  j["trial"] = t.trial;
  j["outcome"] = lasso::to_string(t.outcome);
  j["objective_at_wstar"] = t.objective_at_wstar;
  j["objective_at_solution"] = t.objective_at_solution;
  j["improvement"] = t.improvement;
  j["recovery_error"] = t.recovery_error;
  j["branch"] = t.branch;
  j["solver_status"] = t.solver_status;
  j["error"] = t.error;
  return j;
}

json cell_to_json(const CellSummary& c) {
  json j;
  j["type"] = "cell";
  j["preconditioner"] = c.preconditioner;
  j["m"] = c.m;
  j["trials"] = c.trials;
  j["failures"] = c.failures;
  j["successes"] = c.successes;
  j["ambiguous"] = c.ambiguous;
  j["errors"] = c.errors;
  j["failure_rate"] = c.failure_rate;
  j["success_rate"] = c.success_rate;
  j["ambiguous_rate"] = c.ambiguous_rate;
  j["mean_objective_gap"] = c.mean_objective_gap;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool saw_preconditioners = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value', got '" + s + "'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line);

    if (key == "design.file") {
      cfg.design_file = val;
    } else if (key == "design.m") {
      cfg.design_m = parse_i32(val, line);
    } else if (key == "design.n") {
      cfg.design_n = parse_i32(val, line);
    } else if (key == "design.d") {
      cfg.design_d = parse_double(val, line);
    } else if (key == "design.seed") {
      cfg.design_seed = parse_u64(val, line);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(val, line);
    } else if (key == "signal") {
      if (val != "invertible" && val != "mixture")
        throw ParseError("signal must be 'invertible' or 'mixture', got '" + val + "'",
                         line);
      cfg.signal = val;
    } else if (key == "k") {
      cfg.k = parse_i32(val, line);
    } else if (key == "t") {
      cfg.t = parse_i32(val, line);
    } else if (key == "preconditioners") {
      cfg.preconditioners = split_list(val);
      saw_preconditioners = true;
      if (cfg.preconditioners.empty())
        throw ParseError("preconditioners list is empty", line);
    } else if (key == "m_list") {
      cfg.m_list.clear();
      for (const std::string& item : split_list(val))
        cfg.m_list.push_back(parse_i32(item, line));
      if (cfg.m_list.empty()) throw ParseError("m_list is empty", line);
    } else if (key == "trials") {
      cfg.trials = parse_i32(val, line);
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(val, line);
    } else if (key == "out_dir") {
      cfg.out_dir = val;
    } else if (key == "tol_gap") {
      cfg.tols.tol_gap = parse_double(val, line);
    } else if (key == "tol_obj_rel") {
      cfg.tols.tol_obj_rel = parse_double(val, line);
    } else if (key == "tol_rec") {
      cfg.tols.tol_rec = parse_double(val, line);
    } else if (key == "tol_feas") {
      cfg.tols.tol_feas = parse_double(val, line);
    } else if (key == "assert.failure_rate_min") {
      cfg.assert_failure_rate_min = parse_double(val, line);
    } else if (key == "assert.failure_rate_max") {
      cfg.assert_failure_rate_max = parse_double(val, line);
    } else if (key == "assert.no_errors") {
      if (val == "true" || val == "1") cfg.assert_no_errors = true;
      else if (val == "false" || val == "0") cfg.assert_no_errors = false;
      else throw ParseError("expected true/false, got '" + val + "'", line);
    } else {
      throw ParseError("unknown key '" + key + "'", line);
    }
  }
  (void)saw_preconditioners;
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<AssertionOutcome> evaluate_assertions(const ExperimentConfig& cfg,
                                                  const FailureReport& rep) {
  std::vector<AssertionOutcome> out;
  auto per_cell = [&](const std::string& name, auto&& pred, auto&& detail) {
    AssertionOutcome a;
    a.name = name;
    a.pass = true;
    for (const CellSummary& c : rep.cells) {
      if (!pred(c)) {
        a.pass = false;
        if (!a.detail.empty()) a.detail += "; ";
        a.detail += detail(c);
      }
    }
    if (a.pass) a.detail = "all cells";
    out.push_back(std::move(a));
  };
  if (cfg.assert_failure_rate_min) {
    const double lo = *cfg.assert_failure_rate_min;
    per_cell(
        "failure_rate_min", [&](const CellSummary& c) { return c.failure_rate >= lo; },
        [&](const CellSummary& c) {
          return c.preconditioner + "/m=" + std::to_string(c.m) + " rate " +
                 g17(c.failure_rate) + " < " + g17(lo);
        });
  }
  if (cfg.assert_failure_rate_max) {
    const double hi = *cfg.assert_failure_rate_max;
    per_cell(
        "failure_rate_max", [&](const CellSummary& c) { return c.failure_rate <= hi; },
        [&](const CellSummary& c) {
          return c.preconditioner + "/m=" + std::to_string(c.m) + " rate " +
                 g17(c.failure_rate) + " > " + g17(hi);
        });
  }
  if (cfg.assert_no_errors) {
    per_cell(
        "no_errors", [](const CellSummary& c) { return c.errors == 0; },
        [](const CellSummary& c) {
          return c.preconditioner + "/m=" + std::to_string(c.m) + " had " +
                 std::to_string(c.errors) + " errored trials";
        });
  }
  return out;
}

FailureReport run_failure_experiment(const ExperimentConfig& cfg) {
  if (cfg.m_list.empty())
    throw ParameterError("m_list must contain at least one sample count");
  if (cfg.trials < 1) throw ParameterError("trials must be >= 1");
  if (cfg.preconditioners.empty())
    throw ParameterError("preconditioners must contain at least one entry");
  if (cfg.signal != "invertible" && cfg.signal != "mixture")
    throw ParameterError("signal must be 'invertible' or 'mixture'");
  for (std::int32_t m : cfg.m_list)
    if (m < 1) throw ParameterError("every entry of m_list must be >= 1");

  const design::BinaryDesign M =
      cfg.design_file.empty()
          ? design::gen_bernoulli_design(cfg.design_m, cfg.design_n, cfg.design_d,
                                         cfg.design_seed)
          : design::load_design(cfg.design_file);
  const instance::HardInstance inst = instance::build_instance(M, cfg.epsilon);

  FailureReport rep;
  rep.design_m = M.m();
  rep.design_n = M.n();
  rep.design_d = M.d();
  rep.epsilon = cfg.epsilon;
  rep.signal = cfg.signal;
  rep.k = cfg.k;
  rep.t = cfg.t;
  rep.master_seed = cfg.master_seed;

  const std::size_t n_ms = cfg.m_list.size();
  for (std::size_t p_idx = 0; p_idx < cfg.preconditioners.size(); ++p_idx) {
    const instance::Preconditioner S =
        make_preconditioner(cfg.preconditioners[p_idx], inst, cfg.master_seed);
    for (std::size_t m_idx = 0; m_idx < n_ms; ++m_idx) {
      const std::int32_t m = cfg.m_list[m_idx];
      const std::int32_t cell = static_cast<std::int32_t>(p_idx * n_ms + m_idx);
      const auto t0 = std::chrono::steady_clock::now();

      CellSummary sum;
      sum.preconditioner = cfg.preconditioners[p_idx];
      sum.m = m;
      sum.trials = cfg.trials;
      double gap_total = 0.0;
      std::int32_t gap_count = 0;

      for (std::int32_t trial = 0; trial < cfg.trials; ++trial) {
        TrialRecord tr;
        tr.cell = cell;
        tr.preconditioner = cfg.preconditioners[p_idx];
        tr.m = m;
        tr.trial = trial;
        const std::uint64_t cov_seed = Rng::derive_seed(
            cfg.master_seed,
            {0xc311ull, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial), 0ull});
        const std::uint64_t sig_seed = Rng::derive_seed(
            cfg.master_seed,
            {0xc311ull, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial), 1ull});
        try {
          const Eigen::MatrixXd X = instance::sample_covariates(inst, m, cov_seed);
          const instance::SignalDraw draw =
              cfg.signal == "invertible"
                  ? instance::sample_signal_invertible(inst, cfg.k, cfg.t, sig_seed)
                  : instance::sample_signal_mixture(inst, cfg.k, cfg.t, sig_seed);
          tr.branch = instance::to_string(draw.branch);

          lasso::LassoProblem prob;
          prob.X = X;
          prob.y = X * draw.w_star;
          prob.S = S.S;
          prob.w_star = draw.w_star;

          const lasso::SolveResult sol = lasso::solve_preconditioned_lasso(prob, cfg.tols);
          const lasso::DirectionReport dir = lasso::improving_direction(prob, cfg.tols);
          const lasso::LassoVerdict v = lasso::adjudicate(prob, sol, dir, cfg.tols);

          tr.outcome = v.outcome;
          tr.objective_at_wstar = v.objective_at_wstar;
          tr.objective_at_solution = v.objective_at_solution;
          tr.improvement = v.improvement;
          tr.recovery_error = v.recovery_error;
          tr.solver_status = lp::to_string(v.solver_status);
          gap_total += v.objective_at_wstar - v.objective_at_solution;
          ++gap_count;
        } catch (const std::exception& e) {
          tr.outcome = lasso::Outcome::Error;
          tr.error = e.what();
        }

        switch (tr.outcome) {
          case lasso::Outcome::Success:
            ++sum.successes;
            break;
          case lasso::Outcome::Failure:
            ++sum.failures;
            break;
          case lasso::Outcome::Error:
            ++sum.errors;
            ++sum.ambiguous;  // errored trials count against the ambiguous bucket
            break;
          case lasso::Outcome::Ambiguous:
            ++sum.ambiguous;
            break;
        }
        rep.trials.push_back(std::move(tr));
      }

      const double nt = static_cast<double>(cfg.trials);
      sum.failure_rate = sum.failures / nt;
      sum.success_rate = sum.successes / nt;
      sum.ambiguous_rate = sum.ambiguous / nt;
      sum.mean_objective_gap = gap_count > 0 ? gap_total / gap_count : 0.0;
      sum.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "[cell %d] preconditioner=%s m=%d wall=%.3fs\n", cell,
                   sum.preconditioner.c_str(), m, sum.wall_seconds);
      rep.cells.push_back(std::move(sum));
    }
  }

  emit_report(rep, "json", cfg.out_dir);
  emit_report(rep, "csv", cfg.out_dir);
  emit_report(rep, "plotdata", cfg.out_dir);
  return rep;
}

std::string report_to_json_lines(const FailureReport& rep) {
  std::ostringstream out;
  json hdr;
  hdr["schema"] = "failure-report/1";
  hdr["design_m"] = rep.design_m;
  hdr["design_n"] = rep.design_n;
  hdr["design_d"] = rep.design_d;
  hdr["epsilon"] = rep.epsilon;
  hdr["signal"] = rep.signal;
  hdr["k"] = rep.k;
  hdr["t"] = rep.t;
  hdr["master_seed"] = rep.master_seed;
  out << hdr.dump() << "\n";
  for (const TrialRecord& t : rep.trials) out << trial_to_json(t).dump() << "\n";
  for (const CellSummary& c : rep.cells) out << cell_to_json(c).dump() << "\n";
  return out.str();
}

FailureReport report_from_json_lines(const std::string& text) {
  FailureReport rep;
  std::istringstream in(text);
  std::string linebuf;
  int line = 0;
  bool saw_header = false;
  while (std::getline(in, linebuf)) {
    ++line;
    const std::string s = trim(linebuf);
    if (s.empty()) continue;
    json j;
    try {
      j = json::parse(s);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    try {
      if (!saw_header) {
        if (j.value("schema", "") != "failure-report/1")
          throw ParseError("expected schema failure-report/1 header", line);
        rep.design_m = j.at("design_m").get<std::int32_t>();
        rep.design_n = j.at("design_n").get<std::int32_t>();
        rep.design_d = j.at("design_d").get<double>();
        rep.epsilon = j.at("epsilon").get<double>();
        rep.signal = j.at("signal").get<std::string>();
        rep.k = j.at("k").get<std::int32_t>();
        rep.t = j.at("t").get<std::int32_t>();
        rep.master_seed = j.at("master_seed").get<std::uint64_t>();
        saw_header = true;
        continue;
      }
      const std::string type = j.at("type").get<std::string>();
      if (type == "trial") {
        TrialRecord t;
        t.cell = j.at("cell").get<std::int32_t>();
        t.preconditioner = j.at("preconditioner").get<std::string>();
        t.m = j.at("m").get<std::int32_t>();
        t.trial = j.at("trial").get<std::int32_t>();
        t.outcome = outcome_from_string(j.at("outcome").get<std::string>(), line);
        t.objective_at_wstar = j.at("objective_at_wstar").get<double>();
        t.objective_at_solution = j.at("objective_at_solution").get<double>();
        t.improvement = j.at("improvement").get<double>();
        t.recovery_error = j.at("recovery_error").get<double>();
        t.branch = j.at("branch").get<std::string>();
        t.solver_status = j.at("solver_status").get<std::string>();
        t.error = j.at("error").get<std::string>();
        rep.trials.push_back(std::move(t));
      } else if (type == "cell") {
        CellSummary c;
        c.preconditioner = j.at("preconditioner").get<std::string>();
        c.m = j.at("m").get<std::int32_t>();
        c.trials = j.at("trials").get<std::int32_t>();
        c.failures = j.at("failures").get<std::int32_t>();
        c.successes = j.at("successes").get<std::int32_t>();
        c.ambiguous = j.at("ambiguous").get<std::int32_t>();
        c.errors = j.at("errors").get<std::int32_t>();
        c.failure_rate = j.at("failure_rate").get<double>();
        c.success_rate = j.at("success_rate").get<double>();
        c.ambiguous_rate = j.at("ambiguous_rate").get<double>();
        c.mean_objective_gap = j.at("mean_objective_gap").get<double>();
        rep.cells.push_back(std::move(c));
      } else {
        throw ParseError("unknown record type '" + type + "'", line);
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("missing or mistyped field: ") + e.what(), line);
    }
  }
  if (!saw_header) throw ParseError("missing failure-report/1 header line", 0);
  return rep;
}

void emit_report(const FailureReport& rep, const std::string& format,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (format == "json") {
    std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
    if (!out) throw ParameterError("cannot write report.json under '" + out_dir + "'");
    out << report_to_json_lines(rep);
  } else if (format == "csv") {
    std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::binary);
    if (!out) throw ParameterError("cannot write summary.csv under '" + out_dir + "'");
    out << "# schema failure-summary/1\n";
    out << "preconditioner,m,trials,failures,successes,ambiguous,errors,"
           "failure_rate,success_rate,ambiguous_rate,mean_objective_gap\n";
    for (const CellSummary& c : rep.cells) {
      out << c.preconditioner << ',' << c.m << ',' << c.trials << ',' << c.failures
          << ',' << c.successes << ',' << c.ambiguous << ',' << c.errors << ','
          << g17(c.failure_rate) << ',' << g17(c.success_rate) << ','
          << g17(c.ambiguous_rate) << ',' << g17(c.mean_objective_gap) << '\n';
    }
  } else if (format == "plotdata") {
    const fs::path dir = fs::path(out_dir) / "plotdata";
    fs::create_directories(dir);
    // group cells by preconditioner, preserving first-seen order
    std::vector<std::string> labels;
    for (const CellSummary& c : rep.cells)
      if (std::find(labels.begin(), labels.end(), c.preconditioner) == labels.end())
        labels.push_back(c.preconditioner);
    for (const std::string& label : labels) {
      std::ofstream out(dir / (safe_filename(label) + ".csv"), std::ios::binary);
      if (!out) throw ParameterError("cannot write plotdata under '" + out_dir + "'");
      out << "# schema failure-plotdata/1\n";
      out << "x,y\n";
      for (const CellSummary& c : rep.cells) {
        if (c.preconditioner != label) continue;
        const double x =
            rep.design_n > 0 ? static_cast<double>(c.m) / rep.design_n : 0.0;
        out << g17(x) << ',' << g17(c.failure_rate) << '\n';
      }
    }
  } else {
    throw ParameterError("unknown report format '" + format +
                         "' (expected json, csv or plotdata)");
  }
}

ProjectionValidation validate_projection_lemmas(const instance::HardInstance& inst,
                                                std::int32_t m, std::int32_t trials,
                                                std::uint64_t seed, double eta,
                                                std::int32_t tau, double slack,
                                                double c_near_kernel) {
  if (m < 1) throw ParameterError("m must be >= 1");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  const Eigen::Index n = inst.theta_tilde.rows();
  if (tau < 0 || tau > n) throw ParameterError("tau must lie in [0, n]");

  ProjectionValidation out;
  out.m = m;
  out.r = inst.r;
  out.trials = trials;
  out.slack = slack;
  out.vacuous = (inst.r <= 2 * static_cast<std::int64_t>(m));
  out.bound_no_alignment =
      inst.r > 0 ? std::max(0.0, 1.0 - 4.0 * m / (3.0 * inst.r)) : 0.0;
  out.bound_restricted = eta / 32.0;
  out.near_kernel_bound =
      inst.theta_zero || inst.lambda <= 0.0
          ? std::numeric_limits<double>::infinity()
          : c_near_kernel * std::sqrt(static_cast<double>(n) * inst.epsilon / inst.lambda);

  if (inst.r == 0) {
    // no kernel direction exists; every statement about kernel vectors is empty
    out.vacuous = true;
    out.no_alignment_ok = true;
    out.restricted_ok = true;
    return out;
  }

  // fixed unit vector in ker(theta), shared by all trials
  Rng vrng = Rng::derive(seed, {0x9200ull});
  Eigen::VectorXd g(inst.kernel.cols());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = vrng.normal();
  Eigen::VectorXd v = inst.kernel * g;
  if (v.norm() == 0.0) v = inst.kernel.col(0);
  v /= v.norm();

  std::int64_t hits_align = 0, hits_near = 0, hits_restricted = 0;
  for (std::int32_t trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd X = instance::sample_covariates(
        inst, m, Rng::derive_seed(seed, {0x9201ull, static_cast<std::uint64_t>(trial)}));
    const Eigen::MatrixXd Q = numerics::orthonormalize(X.transpose());

    // v'(I - P)v >= 1/8 for the fixed unit kernel vector
    const double residual = 1.0 - (Q.transpose() * v).squaredNorm();
    if (residual >= 0.125) ++hits_align;

    // sup_a ||Proj_{span theta} X'a|| / ||X'a|| over all a simultaneously:
    // the top singular value of (I - KK') Q, K = ker basis (span theta is its
    // orthogonal complement)
    const Eigen::MatrixXd R = Q - inst.kernel * (inst.kernel.transpose() * Q);
    const double ratio =
        Q.cols() > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()(0) : 0.0;
    out.max_kernel_ratio = std::max(out.max_kernel_ratio, ratio);
    if (ratio <= out.near_kernel_bound) ++hits_near;

    // restricted variant: drop a random tau-subset of coordinates, require
    // inf_a ||(v - X'a)_P|| >= (eta/32) ||v_P||
    Rng prng = Rng::derive(seed, {0x9202ull, static_cast<std::uint64_t>(trial)});
    const std::vector<std::int32_t> dropped =
        prng.subset(static_cast<std::int32_t>(n), tau);
    std::vector<char> keep(static_cast<std::size_t>(n), 1);
    for (std::int32_t j : dropped) keep[static_cast<std::size_t>(j)] = 0;
    const Eigen::Index np = n - tau;
    Eigen::VectorXd vP(np);
    Eigen::MatrixXd XtP(np, m);
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!keep[static_cast<std::size_t>(j)]) continue;
      vP[w] = v[j];
      XtP.row(w) = X.col(j).transpose();
      ++w;
    }
    const Eigen::MatrixXd QP = numerics::orthonormalize(XtP);
    const double res_restricted =
        std::sqrt(std::max(0.0, vP.squaredNorm() - (QP.transpose() * vP).squaredNorm()));
    if (res_restricted >= out.bound_restricted * vP.norm() * (1.0 - 1e-12))
      ++hits_restricted;
  }

  out.freq_no_alignment = static_cast<double>(hits_align) / trials;
  out.freq_near_kernel = static_cast<double>(hits_near) / trials;
  out.freq_restricted = static_cast<double>(hits_restricted) / trials;
  out.no_alignment_ok =
      out.vacuous || out.freq_no_alignment >= out.bound_no_alignment - slack;
  out.restricted_ok =
      out.vacuous || out.freq_restricted >= out.bound_no_alignment - slack;
  return out;
}

RandomSumValidation validate_random_sum_lemma(const std::vector<Eigen::VectorXd>& vectors,
                                              double delta, std::int32_t trials,
                                              std::uint64_t seed) {
  if (vectors.empty()) throw ParameterError("need at least one vector");
  if (!(delta > 0.0)) throw ParameterError("delta must be > 0");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  const Eigen::Index dim = vectors.front().size();
  for (const Eigen::VectorXd& v : vectors)
    if (v.size() != dim) throw ParameterError("vectors must share one dimension");

  RandomSumValidation out;
  out.trials = trials;
  out.delta = delta;
  // at delta >= 1 the bound is trivially satisfied and the variance term is 0
  out.std_err = std::sqrt(std::max(delta * (1.0 - delta), 0.0) / trials);

  double max_l1 = 0.0;
  for (const Eigen::VectorXd& v : vectors) max_l1 = std::max(max_l1, v.lpNorm<1>());
  if (max_l1 == 0.0) {
    // all vectors vanish: the event ||sum||_1 < delta * 0 is empty
    out.vacuous = true;
    out.pass = true;
    return out;
  }

  Rng rng = Rng::derive(seed, {0x2511ull});
  Eigen::VectorXd sum(dim);
  for (std::int32_t trial = 0; trial < trials; ++trial) {
    sum.setZero();
    for (const Eigen::VectorXd& v : vectors) sum += rng.uniform_pm1() * v;
    if (sum.lpNorm<1>() < delta * max_l1) ++out.violations;
  }
  out.freq = static_cast<double>(out.violations) / trials;
  out.pass = out.freq <= delta + 3.0 * out.std_err;
  return out;
}

}  // namespace erlasso::harness
