#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qtm/experiment.hpp"

using namespace qtm;

namespace {

ExperimentConfig small_config(const std::string& experiment, long trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

std::string render(const RunResult& result, OutputFormat format) {
  std::ostringstream os;
  write_records(os, result.records, format);
  return os.str();
}

} // namespace

TEST_CASE("verify_bounds: identity-unitary debug trial evaluates on the thermal state") {
  ExperimentConfig cfg = small_config("verify_bounds", 1, 99);
  cfg.force_identity_u = true;
  RunResult result = run_experiment(cfg);
  REQUIRE(result.records.size() == 5);
  bool found = false;
  for (const TrialRecord& rec : result.records) {
    if (rec.report.id == BoundId::RelvarFloor && !rec.report.skipped) {
      found = true;
      CHECK(rec.report.satisfied);
    }
  }
  CHECK(found);
  CHECK(result.summary.violations == 0);
}

TEST_CASE("suites: small seeded runs have zero violations") {
  for (const char* name :
       {"verify_bounds", "hellinger", "coherence", "battery", "collision", "markov"}) {
    ExperimentConfig cfg = small_config(name, 120, 424242);
    RunResult result = run_experiment(cfg);
    CAPTURE(name);
    CHECK(result.summary.violations == 0);
    CHECK(result.summary.total ==
          result.summary.satisfied + result.summary.violations + result.summary.skipped);
    CHECK(result.summary.total > 0);
  }
}

TEST_CASE("saturate suite: one matched record per feasible pair") {
  ExperimentConfig cfg = small_config("saturate", 1, 5);
  RunResult result = run_experiment(cfg);
  REQUIRE(result.records.size() == 3); // d_e in {2,3,4}, d_s = 2
  for (const TrialRecord& rec : result.records) {
    CHECK(rec.report.satisfied);
    CHECK(std::abs(rec.report.lhs / rec.report.rhs - 1.0) <= 1e-9);
  }
}

TEST_CASE("hellinger suite: identity dynamics is recorded as skipped, not satisfied") {
  ExperimentConfig cfg = small_config("hellinger", 5, 11);
  cfg.force_identity_u = true;
  RunResult result = run_experiment(cfg);
  long skipped = 0;
  for (const TrialRecord& rec : result.records) {
    if (rec.report.id == BoundId::HellingerSigma || rec.report.id == BoundId::HellingerPhi) {
      CHECK(rec.report.skipped);
      ++skipped;
    }
    if (rec.report.id == BoundId::EntropyNonneg) CHECK(rec.report.satisfied);
  }
  CHECK(skipped == 10);
  CHECK(result.summary.skipped >= skipped);
  CHECK(result.summary.violations == 0);
}

TEST_CASE("determinism: identical config and seed render identical bytes") {
  for (const char* name : {"verify_bounds", "markov"}) {
    ExperimentConfig cfg = small_config(name, 60, 777);
    const RunResult a = run_experiment(cfg);
    const RunResult b = run_experiment(cfg);
    CHECK(render(a, OutputFormat::Csv) == render(b, OutputFormat::Csv));
    CHECK(render(a, OutputFormat::JsonLines) == render(b, OutputFormat::JsonLines));
  }
}

TEST_CASE("determinism: different seeds change the records") {
  ExperimentConfig cfg = small_config("verify_bounds", 30, 1);
  ExperimentConfig cfg2 = cfg;
  cfg2.seed = 2;
  CHECK(render(run_experiment(cfg), OutputFormat::Csv) !=
        render(run_experiment(cfg2), OutputFormat::Csv));
}

TEST_CASE("csv schema: fixed header and column count") {
  ExperimentConfig cfg = small_config("verify_bounds", 3, 15);
  RunResult result = run_experiment(cfg);
  std::istringstream in(render(result, OutputFormat::Csv));
  std::string header;
  std::getline(in, header);
  CHECK(header == "trial,bound_id,d_S,d_E,beta,lhs,rhs,slack,satisfied,seed");
  std::string line;
  long rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    long commas = std::count(line.begin(), line.end(), ',');
    CHECK(commas == 9);
  }
  CHECK(rows == static_cast<long>(result.records.size()));
}

TEST_CASE("json lines schema: every field appears once per record") {
  ExperimentConfig cfg = small_config("markov", 4, 21);
  RunResult result = run_experiment(cfg);
  std::istringstream in(render(result, OutputFormat::JsonLines));
  std::string line;
  long rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    for (const char* key : {"\"trial\":", "\"bound_id\":", "\"d_S\":", "\"d_E\":", "\"beta\":",
                            "\"lhs\":", "\"rhs\":", "\"slack\":", "\"satisfied\":", "\"seed\":"}) {
      CAPTURE(line);
      CHECK(line.find(key) != std::string::npos);
    }
    CHECK(line.front() == '{');
    CHECK(line.back() == '}');
  }
  CHECK(rows == static_cast<long>(result.records.size()));
}

TEST_CASE("beta spec parsing") {
  BetaPolicy fixed = parse_beta_spec("0.75");
  CHECK_FALSE(fixed.random);
  CHECK(fixed.fixed == doctest::Approx(0.75));

  BetaPolicy ranged = parse_beta_spec("random:0.5,1.5");
  CHECK(ranged.random);
  CHECK(ranged.lo == doctest::Approx(0.5));
  CHECK(ranged.hi == doctest::Approx(1.5));

  CHECK_THROWS_AS(parse_beta_spec("random:1"), Error);
  CHECK_THROWS_AS(parse_beta_spec("-1"), Error);
  CHECK_THROWS_AS(parse_beta_spec("abc"), Error);
}

TEST_CASE("moment order parsing") {
  CHECK(std::isinf(parse_order_spec("inf")));
  CHECK(parse_order_spec("2.5") == doctest::Approx(2.5));
  CHECK_THROWS_AS(parse_order_spec("two"), Error);
}

TEST_CASE("config file: load, defaults and validation") {
  const std::string path = "qtm_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"experiment":"battery","trials":17,"seed":991,"d_s":3,)"
        << R"("d_e_choices":[2,5],"beta":"random:0,1","petrov_s":"inf","format":"json"})";
  }
  ExperimentConfig cfg = config_from_json_file(path);
  std::remove(path.c_str());
  CHECK(cfg.experiment == "battery");
  CHECK(cfg.trials == 17);
  CHECK(cfg.seed == 991);
  CHECK(cfg.d_s == 3);
  REQUIRE(cfg.d_e_choices.size() == 2);
  CHECK(cfg.d_e_choices[1] == 5);
  CHECK(cfg.beta.random);
  CHECK(std::isinf(cfg.petrov.s));
  CHECK(cfg.format == OutputFormat::JsonLines);
  CHECK_NOTHROW(cfg.validate());

  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_THROWS_AS(config_from_json_file("missing_file.json"), Error);
}

TEST_CASE("environment seed override") {
  ExperimentConfig cfg = small_config("markov", 5, 1);
  setenv("QTM_SEED", "31337", 1);
  apply_env_seed(cfg);
  unsetenv("QTM_SEED");
  CHECK(cfg.seed == 31337);

  setenv("QTM_SEED", "not-a-number", 1);
  CHECK_THROWS_AS(apply_env_seed(cfg), Error);
  unsetenv("QTM_SEED");
}

TEST_CASE("config validation rejects unknown suites and bad dimensions") {
  ExperimentConfig cfg = small_config("nonsense", 5, 1);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.experiment = "markov";
  cfg.d_e_choices = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("output file writing reports io failures") {
  ExperimentConfig cfg = small_config("markov", 2, 3);
  RunResult result = run_experiment(cfg);
  cfg.out_path = "/nonexistent-dir/records.csv";
  CHECK_THROWS_AS(write_output_file(cfg, result.records), Error);
}
