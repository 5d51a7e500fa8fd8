#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtm/bounds.hpp"
#include "qtm/machines.hpp"

namespace qtm {

enum class OutputFormat { Csv, JsonLines };

struct BetaPolicy {
  bool random = true;
  double fixed = 1.0;
  double lo = 0.0;
  double hi = 2.0;

  double draw(Rng& rng) const { return random ? rng.uniform(lo, hi) : fixed; }
  std::string describe() const;
};

/// "random:lo,hi" or a plain number.
BetaPolicy parse_beta_spec(const std::string& spec);
/// "inf" or a plain number.
double parse_order_spec(const std::string& spec);

struct ExperimentConfig {
  std::string experiment; // verify_bounds | hellinger | coherence | battery |
                          // collision | saturate | markov
  long trials = 10000;
  std::uint64_t seed = 20250515;
  int d_s = 2;
  std::vector<int> d_e_choices = {2, 3, 4};
  BetaPolicy beta;
  PetrovParams petrov;
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;
  bool force_identity_u = false; // debug: skip the random unitary

  void validate() const;
};

/// Load a config from a JSON file; missing keys keep their defaults.
ExperimentConfig config_from_json_file(const std::string& path);
/// QTM_SEED, when set, overrides the configured seed.
void apply_env_seed(ExperimentConfig& cfg);

struct TrialRecord {
  long trial = 0;
  BoundReport report;
};

struct RunSummary {
  long total = 0;
  long satisfied = 0;
  long violations = 0;
  long skipped = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::vector<std::pair<long, std::uint64_t>> violation_keys; // (trial, seed)
};

struct RunResult {
  RunSummary summary;
  std::vector<TrialRecord> records;
};

/// Dispatch on cfg.experiment. Every trial derives its own RNG stream from
/// (seed, trial index), so output is a pure function of the config.
RunResult run_experiment(const ExperimentConfig& cfg);

RunResult run_verify_bounds(const ExperimentConfig& cfg);
RunResult run_hellinger(const ExperimentConfig& cfg);
RunResult run_coherence(const ExperimentConfig& cfg);
RunResult run_battery(const ExperimentConfig& cfg);
RunResult run_collision(const ExperimentConfig& cfg);
RunResult run_saturate(const ExperimentConfig& cfg);
RunResult run_markov(const ExperimentConfig& cfg);

/// Shortest round-trip decimal form; CSV and JSON lines share it.
std::string format_double(double x);

void write_records(std::ostream& os, const std::vector<TrialRecord>& records, OutputFormat format);
/// Writes to cfg.out_path when set (IoError on failure); no-op otherwise.
void write_output_file(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

void print_summary(std::ostream& os, const ExperimentConfig& cfg, const RunSummary& summary);

} // namespace qtm
