#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtm/experiment.hpp"

namespace {

struct CliValues {
  std::optional<long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> d_s;
  std::optional<std::string> de_choices;
  std::optional<std::string> beta;
  std::optional<double> petrov_r;
  std::optional<std::string> petrov_s;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config_path;
  bool identity_u = false;
};

std::vector<int> parse_choices(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      qtm::fail(qtm::ErrorCode::ConfigError, "de-choices: bad entry '" + item + "'");
    }
  }
  if (out.empty()) qtm::fail(qtm::ErrorCode::ConfigError, "de-choices: empty list");
  return out;
}

void add_common_options(CLI::App* cmd, CliValues& v) {
  cmd->add_option("--trials", v.trials, "number of trials");
  cmd->add_option("--seed", v.seed, "master seed (QTM_SEED env overrides)");
  cmd->add_option("--ds", v.d_s, "system dimension");
  cmd->add_option("--de-choices", v.de_choices, "environment dimensions, e.g. 2,3,4");
  cmd->add_option("--beta", v.beta, "inverse temperature: value or random:lo,hi");
  cmd->add_option("--r", v.petrov_r, "lower moment order");
  cmd->add_option("--s", v.petrov_s, "upper moment order (number or inf)");
  cmd->add_option("--out", v.out, "record file path");
  cmd->add_option("--format", v.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--config", v.config_path, "JSON config file (flags override)");
  cmd->add_flag("--identity-u", v.identity_u, "debug: use the identity joint unitary");
}

qtm::ExperimentConfig assemble(const std::string& experiment, const CliValues& v) {
  qtm::ExperimentConfig cfg;
  if (v.config_path) cfg = qtm::config_from_json_file(*v.config_path);
  if (!experiment.empty()) cfg.experiment = experiment;
  if (v.trials) cfg.trials = *v.trials;
  if (v.seed) cfg.seed = *v.seed;
  if (v.d_s) cfg.d_s = *v.d_s;
  if (v.de_choices) cfg.d_e_choices = parse_choices(*v.de_choices);
  if (v.beta) cfg.beta = qtm::parse_beta_spec(*v.beta);
  if (v.petrov_r) cfg.petrov.r = *v.petrov_r;
  if (v.petrov_s) cfg.petrov.s = qtm::parse_order_spec(*v.petrov_s);
  if (v.out) cfg.out_path = *v.out;
  if (v.format) cfg.format = *v.format == "json" ? qtm::OutputFormat::JsonLines
                                                 : qtm::OutputFormat::Csv;
  if (v.identity_u) cfg.force_identity_u = true;
  qtm::apply_env_seed(cfg);
  cfg.validate();
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtm - precision-limit verification suites for finite quantum thermal machines"};
  app.require_subcommand(0, 1);

  const std::vector<std::pair<std::string, std::string>> suites = {
      {"verify_bounds", "relative-variance floor, expectation cap and the Petrov chain"},
      {"hellinger", "entropy production and the Hellinger uncertainty relations"},
      {"coherence", "coherent initial environments and the corrected floor"},
      {"battery", "charging precision trade-off"},
      {"collision", "repeated-interaction precision floor"},
      {"saturate", "equality-attaining configurations"},
      {"markov", "classical activity cap on entropy production rate"},
  };

  CliValues top_values;
  add_common_options(&app, top_values);
  std::vector<CliValues> sub_values(suites.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < suites.size(); ++i) {
    CLI::App* sub = app.add_subcommand(suites[i].first, suites[i].second);
    add_common_options(sub, sub_values[i]);
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::string experiment;
    CliValues* values = &top_values;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) {
        experiment = suites[i].first;
        values = &sub_values[i];
        break;
      }
    }
    if (experiment.empty() && !values->config_path) {
      std::cerr << "error: give a suite subcommand or --config with an experiment field\n";
      return 2;
    }

    const qtm::ExperimentConfig cfg = assemble(experiment, *values);
    const qtm::RunResult result = qtm::run_experiment(cfg);
    qtm::write_output_file(cfg, result.records);
    qtm::print_summary(std::cout, cfg, result.summary);
    return result.summary.violations == 0 ? 0 : 1;
  } catch (const qtm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == qtm::ErrorCode::ConfigError || e.code() == qtm::ErrorCode::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
