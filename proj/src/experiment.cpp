#include "qtm/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace qtm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundContext make_context(double beta, int d_s, int d_e, double delta_eps, double lambda_min_s,
                          double lambda_min_e, int delta0, double coherence = 0.0) {
  BoundContext ctx;
  ctx.beta = beta;
  ctx.d_s = d_s;
  ctx.d_e = d_e;
  ctx.delta_eps = delta_eps;
  ctx.lambda_min_s = lambda_min_s;
  ctx.lambda_min_e = lambda_min_e;
  ctx.delta0 = delta0;
  ctx.coherence = coherence;
  return ctx;
}

// Pair the correct statistic of rho_e' with the matching limit for the
// given moment orders. Degenerate observables, saturated floors and failed
// coherent validity all downgrade to a skipped record.
BoundReport precision_record(BoundId id, const DensityOperator& rho_e_prime, const Observable& g,
                             const PetrovParams& p, const BoundContext& ctx, BoundFamily family,
                             std::uint64_t seed) {
  try {
    if (p.r == 1.0 && p.s == 2.0) {
      const double mean = expectation(rho_e_prime, g);
      if (mean <= 1e-12) return make_skipped_report(id, ctx, seed);
      const double lhs = variance(rho_e_prime, g) / (mean * mean);
      return make_report(id, lhs, fundamental_limit(ctx, p, family), BoundSense::LowerBound, ctx,
                         seed);
    }
    if (p.r == 1.0 && p.s_infinite()) {
      const double lhs = expectation(rho_e_prime, g);
      const double rhs = fundamental_limit(ctx, p, family, g.max_eigenvalue());
      return make_report(id, lhs, rhs, BoundSense::UpperBound, ctx, seed);
    }
    const double lhs = petrov_ratio(rho_e_prime, g, p);
    return make_report(id, lhs, fundamental_limit(ctx, p, family), BoundSense::LowerBound, ctx,
                       seed);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateObservable || e.code() == ErrorCode::Saturated ||
        e.code() == ErrorCode::ValidityViolated) {
      return make_skipped_report(id, ctx, seed);
    }
    throw;
  }
}

RunResult finalize(std::vector<TrialRecord> records) {
  RunResult out;
  out.records = std::move(records);
  for (const TrialRecord& rec : out.records) {
    ++out.summary.total;
    if (rec.report.skipped) {
      ++out.summary.skipped;
      continue;
    }
    out.summary.min_slack = std::min(out.summary.min_slack, rec.report.slack);
    if (rec.report.satisfied) {
      ++out.summary.satisfied;
    } else {
      ++out.summary.violations;
      out.summary.violation_keys.emplace_back(rec.trial, rec.report.seed);
    }
  }
  return out;
}

UnitaryOperator draw_unitary(const ExperimentConfig& cfg, std::size_t d, Rng& rng) {
  return cfg.force_identity_u ? UnitaryOperator::identity(d) : random_haar_unitary(d, rng);
}

} // namespace

std::string BetaPolicy::describe() const {
  std::ostringstream os;
  if (random) {
    os << "random:" << format_double(lo) << "," << format_double(hi);
  } else {
    os << format_double(fixed);
  }
  return os.str();
}

BetaPolicy parse_beta_spec(const std::string& spec) {
  BetaPolicy policy;
  if (spec.rfind("random:", 0) == 0) {
    const std::string body = spec.substr(7);
    const std::size_t comma = body.find(',');
    if (comma == std::string::npos) {
      fail(ErrorCode::ConfigError, "beta: expected random:lo,hi");
    }
    try {
      policy.random = true;
      policy.lo = std::stod(body.substr(0, comma));
      policy.hi = std::stod(body.substr(comma + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "beta: bad bounds in '" + spec + "'");
    }
    if (!(policy.lo >= 0.0) || !(policy.hi >= policy.lo)) {
      fail(ErrorCode::ConfigError, "beta: need 0 <= lo <= hi");
    }
    return policy;
  }
  try {
    policy.random = false;
    policy.fixed = std::stod(spec);
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "beta: bad value '" + spec + "'");
  }
  if (!(policy.fixed >= 0.0)) fail(ErrorCode::ConfigError, "beta: must be >= 0");
  return policy;
}

double parse_order_spec(const std::string& spec) {
  if (spec == "inf" || spec == "Inf" || spec == "INF") return kInf;
  try {
    return std::stod(spec);
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "moment order: bad value '" + spec + "'");
  }
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> known = {
      "verify_bounds", "hellinger", "coherence", "battery", "collision", "saturate", "markov"};
  if (std::find(known.begin(), known.end(), experiment) == known.end()) {
    fail(ErrorCode::ConfigError, "experiment: unknown suite '" + experiment + "'");
  }
  if (trials < 1) fail(ErrorCode::ConfigError, "trials: must be >= 1");
  if (d_s < 1) fail(ErrorCode::ConfigError, "d_s: must be >= 1");
  if (d_e_choices.empty()) fail(ErrorCode::ConfigError, "d_e_choices: must not be empty");
  for (int d : d_e_choices) {
    if (d < 1) fail(ErrorCode::ConfigError, "d_e_choices: entries must be >= 1");
  }
  try {
    petrov.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("petrov orders: ") + e.what());
  }
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::ConfigError, std::string("config: parse failure: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("experiment")) cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("d_s")) cfg.d_s = j.at("d_s").get<int>();
    if (j.contains("d_e_choices")) cfg.d_e_choices = j.at("d_e_choices").get<std::vector<int>>();
    if (j.contains("beta")) {
      if (j.at("beta").is_string()) {
        cfg.beta = parse_beta_spec(j.at("beta").get<std::string>());
      } else {
        cfg.beta.random = false;
        cfg.beta.fixed = j.at("beta").get<double>();
      }
    }
    if (j.contains("petrov_r")) cfg.petrov.r = j.at("petrov_r").get<double>();
    if (j.contains("petrov_s")) {
      if (j.at("petrov_s").is_string()) {
        cfg.petrov.s = parse_order_spec(j.at("petrov_s").get<std::string>());
      } else {
        cfg.petrov.s = j.at("petrov_s").get<double>();
      }
    }
    if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    if (j.contains("format")) {
      const std::string fmt = j.at("format").get<std::string>();
      if (fmt == "csv") {
        cfg.format = OutputFormat::Csv;
      } else if (fmt == "json") {
        cfg.format = OutputFormat::JsonLines;
      } else {
        fail(ErrorCode::ConfigError, "format: expected csv or json");
      }
    }
    if (j.contains("force_identity_u")) {
      cfg.force_identity_u = j.at("force_identity_u").get<bool>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::ConfigError, std::string("config: bad field: ") + e.what());
  }
  return cfg;
}

void apply_env_seed(ExperimentConfig& cfg) {
  const char* env = std::getenv("QTM_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    fail(ErrorCode::ConfigError, "QTM_SEED: not an unsigned integer");
  }
  cfg.seed = static_cast<std::uint64_t>(v);
}

RunResult run_verify_bounds(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials) * 5);
  const PetrovParams relvar_orders{1.0, 2.0, 0.0};
  const PetrovParams cap_orders{1.0, kInf, 0.0};

  for (long trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng rng(tseed);
    const int d_e = cfg.d_e_choices[rng.pick(cfg.d_e_choices.size())];
    const double beta = cfg.beta.draw(rng);
    const DensityOperator rho_s = random_density(cfg.d_s, rng);
    const Hamiltonian h_e{random_hermitian(d_e, rng)};
    const DensityOperator gamma_e = gibbs_state(h_e, beta);
    const UnitaryOperator u = draw_unitary(cfg, static_cast<std::size_t>(cfg.d_s) * d_e, rng);
    const Observable g = random_observable(d_e, rng);
    const JointEvolution ev = evolve_joint(rho_s, gamma_e, u);

    const BoundContext ctx =
        make_context(beta, cfg.d_s, d_e, h_e.bandwidth(), rho_s.min_eigenvalue(),
                     gamma_e.min_eigenvalue(), g.zero_degeneracy());

    records.push_back(
        {trial, precision_record(BoundId::RelvarFloor, ev.rho_e, g, relvar_orders, ctx,
                                 BoundFamily::Phi, tseed)});
    records.push_back(
        {trial, precision_record(BoundId::ExpectationCap, ev.rho_e, g, cap_orders, ctx,
                                 BoundFamily::Phi, tseed)});

    // chain: moment ratio >= 1/(1-P0) >= 1/(1-delta0 lambda_min) >= family floor
    try {
      const double ratio = petrov_ratio(ev.rho_e, g, cfg.petrov);
      const double p_zero = measurement_distribution(ev.rho_e, g).front().second;
      const double link1 = petrov_lower_bound(p_zero);
      const double link2 =
          petrov_lower_bound(std::max(0.0, minimize_pg0(ev.rho_e, g.zero_degeneracy())));
      const double link3 = 1.0 / (1.0 - pg0_floor(ctx, BoundFamily::Phi));
      records.push_back({trial, make_report(BoundId::PetrovChain1, ratio, link1,
                                            BoundSense::LowerBound, ctx, tseed)});
      records.push_back({trial, make_report(BoundId::PetrovChain2, link1, link2,
                                            BoundSense::LowerBound, ctx, tseed)});
      records.push_back({trial, make_report(BoundId::PetrovChain3, link2, link3,
                                            BoundSense::LowerBound, ctx, tseed)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateObservable && e.code() != ErrorCode::Saturated) throw;
      records.push_back({trial, make_skipped_report(BoundId::PetrovChain1, ctx, tseed)});
      records.push_back({trial, make_skipped_report(BoundId::PetrovChain2, ctx, tseed)});
      records.push_back({trial, make_skipped_report(BoundId::PetrovChain3, ctx, tseed)});
    }
  }
  return finalize(std::move(records));
}

RunResult run_hellinger(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials) * 6);

  for (long trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng rng(tseed);
    const int d_e = cfg.d_e_choices[rng.pick(cfg.d_e_choices.size())];
    const double beta = cfg.beta.draw(rng);
    const DensityOperator rho_s = random_density(cfg.d_s, rng);
    const Hamiltonian h_e{random_hermitian(d_e, rng)};
    const DensityOperator gamma_e = gibbs_state(h_e, beta);
    const UnitaryOperator u = draw_unitary(cfg, static_cast<std::size_t>(cfg.d_s) * d_e, rng);
    const Observable g = random_observable(d_e, rng);
    const JointEvolution ev = evolve_joint(rho_s, gamma_e, u);
    const ThermoReport thermo =
        entropy_production(rho_s, ev.rho_s, ev.rho_se, ev.rho_e, gamma_e, h_e, beta);

    const BoundContext ctx =
        make_context(beta, cfg.d_s, d_e, h_e.bandwidth(), rho_s.min_eigenvalue(),
                     gamma_e.min_eigenvalue(), g.zero_degeneracy());
    const double phi_cap = std::log(static_cast<double>(cfg.d_s)) + beta * h_e.bandwidth();

    records.push_back({trial, make_report(BoundId::EntropyNonneg, thermo.sigma, 0.0,
                                          BoundSense::LowerBound, ctx, tseed)});
    records.push_back({trial, make_report(BoundId::EntropySplit, thermo.sigma,
                                          thermo.mutual_info + thermo.rel_entropy_e,
                                          BoundSense::MatchValue, ctx, tseed)});
    records.push_back({trial, make_report(BoundId::EntropyCap, thermo.sigma, phi_cap,
                                          BoundSense::UpperBound, ctx, tseed)});
    records.push_back(
        {trial, hellinger_tur(ev.rho_e, gamma_e, g, thermo.sigma, HellingerMode::Sigma, ctx,
                              tseed)});
    records.push_back(
        {trial, hellinger_tur(ev.rho_e, gamma_e, g, phi_cap, HellingerMode::PhiCap, ctx, tseed)});

    const double rhs_sigma = std::expm1(thermo.sigma) <= 0.0 ? kInf : 1.0 / std::expm1(thermo.sigma);
    const double rhs_phi = std::expm1(phi_cap) <= 0.0 ? kInf : 1.0 / std::expm1(phi_cap);
    records.push_back({trial, make_report(BoundId::HellingerRhsOrder, rhs_sigma, rhs_phi,
                                          BoundSense::LowerBound, ctx, tseed)});
  }
  return finalize(std::move(records));
}

RunResult run_coherence(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials) * 3);

  for (long trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng rng(tseed);
    const int d_e = cfg.d_e_choices[rng.pick(cfg.d_e_choices.size())];
    const double beta = cfg.beta.draw(rng);
    const DensityOperator rho_s = random_density(cfg.d_s, rng);
    const Hamiltonian h_e{random_hermitian(d_e, rng)};
    const DensityOperator gamma_e = gibbs_state(h_e, beta);

    // zero-diagonal perturbation in the energy basis, scaled to a coherence
    // below lambda_min(gamma) so the perturbed state stays positive
    ComplexMatrix chi_raw = random_hermitian(d_e, rng).matrix();
    for (int i = 0; i < d_e; ++i) chi_raw(i, static_cast<std::size_t>(i)) = 0.0;
    const double raw_norm = frobenius_norm(chi_raw);
    const double target = rng.uniform(0.0, 0.98) * gamma_e.min_eigenvalue();
    const BoundContext plain_ctx =
        make_context(beta, cfg.d_s, d_e, h_e.bandwidth(), rho_s.min_eigenvalue(),
                     gamma_e.min_eigenvalue(), 1);
    if (raw_norm <= 1e-12 || d_e < 2) {
      records.push_back({trial, make_skipped_report(BoundId::CoherentMinEigLower, plain_ctx, tseed)});
      records.push_back({trial, make_skipped_report(BoundId::CoherentMinEigUpper, plain_ctx, tseed)});
      records.push_back({trial, make_skipped_report(BoundId::CoherentMomentFloor, plain_ctx, tseed)});
      continue;
    }
    chi_raw *= Complex(target / raw_norm);
    const CoherentPerturbation chi{HermitianMatrix(chi_raw)};
    const DensityOperator rho_c = coherent_gibbs(h_e, beta, chi);

    const UnitaryOperator u = draw_unitary(cfg, static_cast<std::size_t>(cfg.d_s) * d_e, rng);
    const Observable g = random_observable(d_e, rng);
    const JointEvolution ev = evolve_joint(rho_s, rho_c, u);

    const BoundContext ctx =
        make_context(beta, cfg.d_s, d_e, h_e.bandwidth(), rho_s.min_eigenvalue(),
                     rho_c.min_eigenvalue(), g.zero_degeneracy(), chi.coherence());

    records.push_back({trial, make_report(BoundId::CoherentMinEigLower, rho_c.min_eigenvalue(),
                                          gamma_e.min_eigenvalue() - chi.coherence(),
                                          BoundSense::LowerBound, ctx, tseed)});
    records.push_back({trial, make_report(BoundId::CoherentMinEigUpper, rho_c.min_eigenvalue(),
                                          gamma_e.min_eigenvalue(), BoundSense::UpperBound, ctx,
                                          tseed)});
    records.push_back({trial, precision_record(BoundId::CoherentMomentFloor, ev.rho_e, g,
                                               cfg.petrov, ctx, BoundFamily::Coherent, tseed)});
  }
  return finalize(std::move(records));
}

RunResult run_battery(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials) * 2);

  for (long trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng rng(tseed);
    const int d_e = cfg.d_e_choices[rng.pick(cfg.d_e_choices.size())];
    const double beta = cfg.beta.draw(rng);

    // default charger: diagonal populations sorted ascending, so the top
    // level is the most occupied
    std::vector<double> pops(static_cast<std::size_t>(cfg.d_s));
    double total = 0.0;
    for (double& p : pops) {
      p = rng.uniform(0.05, 1.0);
      total += p;
    }
    for (double& p : pops) p /= total;
    std::sort(pops.begin(), pops.end());
    const DensityOperator rho_s = DensityOperator::from_diagonal(pops);

    const Hamiltonian h_e{random_hermitian(d_e, rng)};
    const UnitaryOperator u = draw_unitary(cfg, static_cast<std::size_t>(cfg.d_s) * d_e, rng);
    const BatteryReport rep = battery_charge(rho_s, h_e, beta, u);

    const DensityOperator gamma_e = gibbs_state(h_e, beta);
    const BoundContext ctx =
        make_context(beta, cfg.d_s, d_e, h_e.bandwidth(), rho_s.min_eigenvalue(),
                     gamma_e.min_eigenvalue(), 1);

    if (rep.zero_charge || rep.stored_energy <= 0.0) {
      records.push_back({trial, make_skipped_report(BoundId::BatteryTradeoff, ctx, tseed)});
      records.push_back({trial, make_skipped_report(BoundId::BatteryChain, ctx, tseed)});
      continue;
    }
    records.push_back({trial, make_report(BoundId::BatteryTradeoff, rep.ratio, rep.bound_rhs,
                                          BoundSense::LowerBound, ctx, tseed)});
    records.push_back({trial, make_report(BoundId::BatteryChain, rep.ratio, rep.relvar,
                                          BoundSense::LowerBound, ctx, tseed)});
  }
  return finalize(std::move(records));
}

RunResult run_collision(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials));
  const std::vector<int> ancilla_choices = {2, 3, 4};

  for (long trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng rng(tseed);
    const int n = ancilla_choices[rng.pick(ancilla_choices.size())];
    const double beta = cfg.beta.draw(rng);
    const DensityOperator rho_s = random_density(cfg.d_s, rng);

    CollisionConfig ccfg;
    ccfg.ancilla_count = n;
    ccfg.gap = 1.0;
    ccfg.beta = beta;
    for (int j = 0; j < n; ++j) {
      ccfg.step_unitaries.push_back(draw_unitary(cfg, static_cast<std::size_t>(cfg.d_s) * 2, rng));
    }
    ccfg.weight = [](std::uint32_t m) { return static_cast<double>(std::popcount(m)); };
    const CollisionResult res = collision_run(ccfg, rho_s);

    const double p1 = std::exp(-beta) / (1.0 + std::exp(-beta));
    const BoundContext ctx =
        make_context(beta, cfg.d_s, 1 << n, static_cast<double>(n), rho_s.min_eigenvalue(),
                     std::pow(std::min(p1, 1.0 - p1), n), 1);

    if (res.mean_g <= 1e-12) {
      records.push_back({trial, make_skipped_report(BoundId::CollisionRelvarFloor, ctx, tseed)});
      continue;
    }
    records.push_back({trial, make_report(BoundId::CollisionRelvarFloor,
                                          res.var_g / (res.mean_g * res.mean_g), res.bound_rhs,
                                          BoundSense::LowerBound, ctx, tseed)});
  }
  return finalize(std::move(records));
}

RunResult run_saturate(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  long idx = 0;
  for (int d_e : cfg.d_e_choices) {
    if (d_e < 2 || d_e < cfg.d_s) continue;
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(idx));
    const SaturationScenario scen = saturation_scenario(cfg.d_s, d_e);
    const JointEvolution ev = evolve_joint(scen.rho_s, scen.gamma_e, scen.u);

    const double mean = expectation(ev.rho_e, scen.g);
    const double lhs = variance(ev.rho_e, scen.g) / (mean * mean);
    const BoundContext ctx = make_context(0.0, cfg.d_s, d_e, scen.h_e.bandwidth(),
                                          1.0 / cfg.d_s, 1.0 / d_e, 1);
    const double rhs = fundamental_limit(ctx, PetrovParams{1.0, 2.0, 0.0}, BoundFamily::Phi);
    records.push_back(
        {idx, make_report(BoundId::SaturationEquality, lhs, rhs, BoundSense::MatchRatio, ctx,
                          tseed)});
    ++idx;
  }
  if (records.empty()) {
    fail(ErrorCode::ConfigError, "saturate: no feasible (d_s, d_e) pair in d_e_choices");
  }
  return finalize(std::move(records));
}

RunResult run_markov(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.trials));
  for (long trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_stream(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng rng(tseed);
    const std::size_t n = 3 + rng.pick(4); // 3..6 states
    const MarkovChain chain = random_reversible_chain(n, rng);
    const MarkovReport rep = markov_rates_report(chain);

    BoundContext ctx;
    ctx.beta = 0.0;
    ctx.d_s = static_cast<int>(n);
    ctx.d_e = static_cast<int>(n);
    ctx.lambda_min_s = 1.0 / static_cast<double>(n);
    ctx.lambda_min_e = 1.0 / static_cast<double>(n);
    records.push_back({trial, make_report(BoundId::ActivityCap, rep.sigma_rate,
                                          rep.kappa * rep.activity_rate, BoundSense::UpperBound,
                                          ctx, tseed)});
  }
  return finalize(std::move(records));
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.experiment == "verify_bounds") return run_verify_bounds(cfg);
  if (cfg.experiment == "hellinger") return run_hellinger(cfg);
  if (cfg.experiment == "coherence") return run_coherence(cfg);
  if (cfg.experiment == "battery") return run_battery(cfg);
  if (cfg.experiment == "collision") return run_collision(cfg);
  if (cfg.experiment == "saturate") return run_saturate(cfg);
  if (cfg.experiment == "markov") return run_markov(cfg);
  fail(ErrorCode::ConfigError, "experiment: unknown suite '" + cfg.experiment + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string json_number(double x) {
  if (!std::isfinite(x)) return "null"; // JSON has no inf/nan
  return format_double(x);
}

} // namespace

void write_records(std::ostream& os, const std::vector<TrialRecord>& records,
                   OutputFormat format) {
  if (format == OutputFormat::Csv) {
    os << "trial,bound_id,d_S,d_E,beta,lhs,rhs,slack,satisfied,seed\n";
    for (const TrialRecord& rec : records) {
      const BoundReport& r = rec.report;
      os << rec.trial << ',' << bound_id_name(r.id) << ',' << r.context.d_s << ','
         << r.context.d_e << ',' << format_double(r.context.beta) << ',' << format_double(r.lhs)
         << ',' << format_double(r.rhs) << ',' << format_double(r.slack) << ','
         << (r.satisfied ? 1 : 0) << ',' << r.seed << '\n';
    }
    return;
  }
  for (const TrialRecord& rec : records) {
    const BoundReport& r = rec.report;
    os << "{\"trial\":" << rec.trial << ",\"bound_id\":\"" << bound_id_name(r.id)
       << "\",\"d_S\":" << r.context.d_s << ",\"d_E\":" << r.context.d_e
       << ",\"beta\":" << json_number(r.context.beta) << ",\"lhs\":" << json_number(r.lhs)
       << ",\"rhs\":" << json_number(r.rhs) << ",\"slack\":" << json_number(r.slack)
       << ",\"satisfied\":" << (r.satisfied ? "true" : "false") << ",\"seed\":" << r.seed
       << "}\n";
  }
}

void write_output_file(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  if (cfg.out_path.empty()) return;
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "output: cannot open '" + cfg.out_path + "'");
  write_records(out, records, cfg.format);
  out.flush();
  if (!out) fail(ErrorCode::IoError, "output: write failed on '" + cfg.out_path + "'");
}

void print_summary(std::ostream& os, const ExperimentConfig& cfg, const RunSummary& summary) {
  os << "experiment=" << cfg.experiment << " trials=" << cfg.trials << " seed=" << cfg.seed
     << " d_s=" << cfg.d_s << " d_e={";
  for (std::size_t i = 0; i < cfg.d_e_choices.size(); ++i) {
    os << (i ? "," : "") << cfg.d_e_choices[i];
  }
  os << "} beta=" << cfg.beta.describe() << " r=" << format_double(cfg.petrov.r)
     << " s=" << (cfg.petrov.s_infinite() ? "inf" : format_double(cfg.petrov.s)) << "\n";
  os << "records=" << summary.total << " satisfied=" << summary.satisfied
     << " skipped=" << summary.skipped << " violations=" << summary.violations;
  if (summary.total > summary.skipped) {
    os << " min_slack=" << format_double(summary.min_slack);
  }
  os << "\n";
  if (!summary.violation_keys.empty()) {
    os << "violating trials (trial:seed):";
    const std::size_t shown = std::min<std::size_t>(summary.violation_keys.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
      os << ' ' << summary.violation_keys[i].first << ':' << summary.violation_keys[i].second;
    }
    if (shown < summary.violation_keys.size()) os << " ...";
    os << "\n";
  }
}

} // namespace qtm
