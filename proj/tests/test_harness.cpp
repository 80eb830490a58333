#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erlasso/design.hpp"
#include "erlasso/harness.hpp"
#include "erlasso/instance.hpp"
#include "erlasso/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace erlasso;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("erlasso_harness_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

harness::ExperimentConfig small_config(const std::string& out_dir) {
  harness::ExperimentConfig cfg;
  cfg.design_m = 8;
  cfg.design_n = 32;
  cfg.design_d = 2.0;
  cfg.design_seed = 4;
  cfg.epsilon = 1e-6;
  cfg.signal = "invertible";
  cfg.k = 2;
  cfg.t = 1;
  cfg.preconditioners = {"identity"};
  cfg.m_list = {32};
  cfg.trials = 5;
  cfg.master_seed = 11;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config text parses every key, with comments and spacing") {
  const std::string text =
      "# sweep configuration\n"
      "design.m = 8\n"
      "design.n = 32   # coordinates\n"
      "design.d = 2.5\n"
      "design.seed = 9\n"
      "epsilon = 1e-4\n"
      "signal = mixture\n"
      "k = 4\n"
      "t = 2\n"
      "preconditioners = identity, sqrt\n"
      "m_list = 8, 16, 32\n"
      "trials = 7\n"
      "master_seed = 123\n"
      "out_dir = /tmp/somewhere\n"
      "tol_gap = 1e-8\n"
      "assert.failure_rate_min = 0.5\n"
      "assert.no_errors = true\n";
  const harness::ExperimentConfig cfg = harness::parse_config(text);
  CHECK(cfg.design_m == 8);
  CHECK(cfg.design_n == 32);
  CHECK(cfg.design_d == 2.5);
  CHECK(cfg.design_seed == 9);
  CHECK(cfg.epsilon == 1e-4);
  CHECK(cfg.signal == "mixture");
  CHECK(cfg.k == 4);
  CHECK(cfg.t == 2);
  CHECK(cfg.preconditioners == std::vector<std::string>{"identity", "sqrt"});
  CHECK(cfg.m_list == std::vector<std::int32_t>{8, 16, 32});
  CHECK(cfg.trials == 7);
  CHECK(cfg.master_seed == 123);
  CHECK(cfg.out_dir == "/tmp/somewhere");
  CHECK(cfg.tols.tol_gap == 1e-8);
  REQUIRE(cfg.assert_failure_rate_min.has_value());
  CHECK(*cfg.assert_failure_rate_min == 0.5);
  CHECK(cfg.assert_no_errors);
}

TEST_CASE("config errors carry the offending line number") {
  try {
    harness::parse_config("design.m = 8\nnot_a_key = 3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(harness::parse_config("signal = banana\n"), ParseError);
  CHECK_THROWS_AS(harness::parse_config("m_list = \n"), ParseError);
  CHECK_THROWS_AS(harness::parse_config("design.m 8\n"), ParseError);
}

TEST_CASE("square identity-preconditioned systems never fail") {
  const fs::path dir = fresh_dir("square");
  const harness::ExperimentConfig cfg = small_config(dir.string());
  const harness::FailureReport rep = harness::run_failure_experiment(cfg);
  REQUIRE(rep.cells.size() == 1);
  CHECK(rep.cells[0].failure_rate == 0.0);
  CHECK(rep.cells[0].success_rate == 1.0);
  CHECK(rep.cells[0].errors == 0);
  fs::remove_all(dir);
}

TEST_CASE("rates are conserved and counts are consistent in every cell") {
  const fs::path dir = fresh_dir("rates");
  harness::ExperimentConfig cfg = small_config(dir.string());
  cfg.design_m = 16;
  cfg.design_n = 64;
  cfg.design_d = 4.0;
  cfg.m_list = {8, 64};
  cfg.trials = 10;
  const harness::FailureReport rep = harness::run_failure_experiment(cfg);
  REQUIRE(rep.cells.size() == 2);
  for (const harness::CellSummary& c : rep.cells) {
    CHECK(c.failures + c.successes + c.ambiguous == c.trials);
    CHECK(c.errors <= c.ambiguous);
    CHECK(c.failure_rate + c.success_rate + c.ambiguous_rate ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(static_cast<std::int64_t>(rep.trials.size()) == 2 * 10);
  fs::remove_all(dir);
}

TEST_CASE("underdetermined sampling fails at least as often as the square case") {
  const fs::path dir = fresh_dir("mono");
  harness::ExperimentConfig cfg = small_config(dir.string());
  cfg.design_m = 16;
  cfg.design_n = 64;
  cfg.design_d = 4.0;
  cfg.k = 3;
  cfg.t = 4;
  cfg.m_list = {8, 64};
  cfg.trials = 10;
  const harness::FailureReport rep = harness::run_failure_experiment(cfg);
  REQUIRE(rep.cells.size() == 2);
  CHECK(rep.cells[1].failure_rate == 0.0);  // m = n = 64: invertible
  CHECK(rep.cells[0].failure_rate >= rep.cells[1].failure_rate);
  fs::remove_all(dir);
}

TEST_CASE("identical configurations reproduce byte-identical artifacts") {
  const fs::path d1 = fresh_dir("repro1");
  const fs::path d2 = fresh_dir("repro2");
  harness::ExperimentConfig c1 = small_config(d1.string());
  harness::ExperimentConfig c2 = small_config(d2.string());
  const harness::FailureReport r1 = harness::run_failure_experiment(c1);
  const harness::FailureReport r2 = harness::run_failure_experiment(c2);
  CHECK(harness::report_to_json_lines(r1) == harness::report_to_json_lines(r2));
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(slurp(d1 / "plotdata" / "identity.csv") == slurp(d2 / "plotdata" / "identity.csv"));

  harness::ExperimentConfig c3 = small_config(d2.string());
  c3.master_seed = 12;  // different stream, different numbers
  const harness::FailureReport r3 = harness::run_failure_experiment(c3);
  CHECK(harness::report_to_json_lines(r1) != harness::report_to_json_lines(r3));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("per-trial streams depend only on the cell and trial indices") {
  const fs::path d1 = fresh_dir("lineage1");
  const fs::path d2 = fresh_dir("lineage2");
  harness::ExperimentConfig longer = small_config(d1.string());
  longer.trials = 4;
  harness::ExperimentConfig shorter = small_config(d2.string());
  shorter.trials = 2;
  const harness::FailureReport a = harness::run_failure_experiment(longer);
  const harness::FailureReport b = harness::run_failure_experiment(shorter);
  REQUIRE(a.trials.size() == 4);
  REQUIRE(b.trials.size() == 2);
  for (std::size_t i = 0; i < b.trials.size(); ++i) {
    CHECK(a.trials[i].outcome == b.trials[i].outcome);
    CHECK(a.trials[i].objective_at_wstar == b.trials[i].objective_at_wstar);
    CHECK(a.trials[i].objective_at_solution == b.trials[i].objective_at_solution);
    CHECK(a.trials[i].recovery_error == b.trials[i].recovery_error);
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("reports round-trip through json lines") {
  const fs::path dir = fresh_dir("roundtrip");
  const harness::FailureReport rep = harness::run_failure_experiment(small_config(dir.string()));
  const harness::FailureReport back =
      harness::report_from_json_lines(harness::report_to_json_lines(rep));
  CHECK(back.design_m == rep.design_m);
  CHECK(back.design_n == rep.design_n);
  CHECK(back.design_d == rep.design_d);
  CHECK(back.epsilon == rep.epsilon);
  CHECK(back.signal == rep.signal);
  CHECK(back.k == rep.k);
  CHECK(back.t == rep.t);
  CHECK(back.master_seed == rep.master_seed);
  REQUIRE(back.cells.size() == rep.cells.size());
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    CHECK(back.cells[i].preconditioner == rep.cells[i].preconditioner);
    CHECK(back.cells[i].m == rep.cells[i].m);
    CHECK(back.cells[i].failures == rep.cells[i].failures);
    CHECK(back.cells[i].failure_rate == rep.cells[i].failure_rate);
    CHECK(back.cells[i].mean_objective_gap == rep.cells[i].mean_objective_gap);
  }
  REQUIRE(back.trials.size() == rep.trials.size());
  for (std::size_t i = 0; i < rep.trials.size(); ++i) {
    CHECK(back.trials[i].outcome == rep.trials[i].outcome);
    CHECK(back.trials[i].recovery_error == rep.trials[i].recovery_error);
    CHECK(back.trials[i].branch == rep.trials[i].branch);
  }
  // the serialization itself is stable
  CHECK(harness::report_to_json_lines(back) == harness::report_to_json_lines(rep));
  fs::remove_all(dir);
}

TEST_CASE("an empty report emits headers-only artifacts") {
  const fs::path dir = fresh_dir("empty");
  harness::FailureReport rep;
  harness::emit_report(rep, "csv", dir.string());
  const std::string csv = slurp(dir / "summary.csv");
  CHECK(csv ==
        "# schema failure-summary/1\n"
        "preconditioner,m,trials,failures,successes,ambiguous,errors,"
        "failure_rate,success_rate,ambiguous_rate,mean_objective_gap\n");
  harness::emit_report(rep, "plotdata", dir.string());
  CHECK(fs::exists(dir / "plotdata"));
  CHECK(fs::is_empty(dir / "plotdata"));
  CHECK_THROWS_AS(harness::emit_report(rep, "yaml", dir.string()), ParameterError);
  fs::remove_all(dir);
}

TEST_CASE("single-cell csv row matches the in-memory summary") {
  const fs::path dir = fresh_dir("csvrow");
  const harness::FailureReport rep = harness::run_failure_experiment(small_config(dir.string()));
  REQUIRE(rep.cells.size() == 1);
  const std::string csv = slurp(dir / "summary.csv");
  std::istringstream lines(csv);
  std::string schema, header, row;
  REQUIRE(std::getline(lines, schema));
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row));
  std::ostringstream expect;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", rep.cells[0].failure_rate);
  expect << rep.cells[0].preconditioner << ',' << rep.cells[0].m << ','
         << rep.cells[0].trials << ',' << rep.cells[0].failures << ','
         << rep.cells[0].successes << ',' << rep.cells[0].ambiguous << ','
         << rep.cells[0].errors << ',' << buf;
  CHECK(row.rfind(expect.str(), 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("assertions pass and fail against the configured thresholds") {
  const fs::path dir = fresh_dir("asserts");
  harness::ExperimentConfig cfg = small_config(dir.string());
  cfg.assert_failure_rate_max = 0.0;
  cfg.assert_no_errors = true;
  const harness::FailureReport rep = harness::run_failure_experiment(cfg);
  for (const harness::AssertionOutcome& a : harness::evaluate_assertions(cfg, rep)) {
    CHECK(a.pass);
  }
  cfg.assert_failure_rate_min = 0.9;  // impossible here
  bool saw_failure = false;
  for (const harness::AssertionOutcome& a : harness::evaluate_assertions(cfg, rep)) {
    if (a.name == "failure_rate_min") {
      CHECK_FALSE(a.pass);
      saw_failure = true;
    }
  }
  CHECK(saw_failure);
  fs::remove_all(dir);
}

TEST_CASE("preconditioner labels map to the right constructions") {
  const design::BinaryDesign M = design::gen_bernoulli_design(6, 12, 2.0, 5);
  const instance::HardInstance inst = instance::build_instance(M, 1e-3);
  CHECK(harness::make_preconditioner("identity", inst, 1).kind ==
        instance::PrecondKind::Identity);
  CHECK(harness::make_preconditioner("randinv", inst, 1).kind ==
        instance::PrecondKind::RandomInvertible);
  CHECK(harness::make_preconditioner("sqrt", inst, 1).kind ==
        instance::PrecondKind::Whitening);
  CHECK(harness::make_preconditioner("invsqrt", inst, 1).kind ==
        instance::PrecondKind::RidgeRoot);
  CHECK_THROWS_AS(harness::make_preconditioner("banana", inst, 1), ParameterError);

  const instance::Preconditioner rnd = instance::make_random_invertible(12, 3);
  const fs::path path = fs::temp_directory_path() / "erlasso_harness_precond.txt";
  instance::save_preconditioner(rnd, path.string());
  const instance::Preconditioner loaded =
      harness::make_preconditioner("file:" + path.string(), inst, 1);
  CHECK(loaded.kind == instance::PrecondKind::CustomFile);
  CHECK((loaded.S - rnd.S).lpNorm<Eigen::Infinity>() == 0.0);
  fs::remove(path);
}

TEST_CASE("projection validation meets its advertised frequency bound") {
  // theta = 0: the kernel is everything, r = 32
  const instance::HardInstance inst =
      instance::build_instance(
          design::BinaryDesign::from_rows(1, 32, std::vector<design::IndexSet>(1)), 1.0);
  REQUIRE(inst.r == 32);
  const harness::ProjectionValidation val =
      harness::validate_projection_lemmas(inst, 8, 1000, 3, 1.0, 3);
  CHECK_FALSE(val.vacuous);
  CHECK(val.bound_no_alignment == doctest::Approx(1.0 - 4.0 * 8.0 / (3.0 * 32.0)));
  CHECK(val.freq_no_alignment >= val.bound_no_alignment - val.slack);
  CHECK(val.no_alignment_ok);
  CHECK(val.restricted_ok);
}

TEST_CASE("projection validation is vacuous once m reaches half the kernel dimension") {
  const instance::HardInstance inst =
      instance::build_instance(
          design::BinaryDesign::from_rows(1, 32, std::vector<design::IndexSet>(1)), 1.0);
  const harness::ProjectionValidation val =
      harness::validate_projection_lemmas(inst, 16, 50, 3, 1.0, 3);
  CHECK(val.vacuous);
}

TEST_CASE("random-sum validation: exact single-vector probability") {
  VectorXd v(3);
  v << 1, -2, 0.5;
  const harness::RandomSumValidation val =
      harness::validate_random_sum_lemma({v}, 0.1, 10000, 5);
  CHECK_FALSE(val.vacuous);
  // the event reduces to |Z| < 0.1 for Z uniform on [-1,1]: probability 0.1
  CHECK(std::abs(val.freq - 0.1) <= 3.0 * val.std_err + 1e-12);
  CHECK(val.pass);
}

TEST_CASE("random-sum validation: vacuous family and trivial threshold") {
  const harness::RandomSumValidation zero =
      harness::validate_random_sum_lemma({VectorXd::Zero(3)}, 0.1, 100, 5);
  CHECK(zero.vacuous);
  VectorXd v(2);
  v << 1, 1;
  const harness::RandomSumValidation triv =
      harness::validate_random_sum_lemma({v}, 1.0, 1000, 5);
  CHECK(triv.pass);  // the bound delta = 1 cannot be violated
}

TEST_CASE("random-sum validation holds for families of vectors") {
  Rng rng(0x05e1ull);
  std::vector<VectorXd> xs;
  for (int i = 0; i < 3; ++i) {
    VectorXd v(16);
    for (Eigen::Index j = 0; j < 16; ++j) v(j) = rng.normal();
    xs.push_back(v);
  }
  for (const double delta : {0.05, 0.1, 0.5}) {
    const harness::RandomSumValidation val =
        harness::validate_random_sum_lemma(xs, delta, 10000, 7);
    CHECK(val.pass);
    CHECK(val.trials == 10000);
  }
}

}  // TEST_SUITE
