#include "qtm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qtm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEigenZero = 1e-15;   // below this an eigenvalue counts as 0
constexpr double kSupportTol = 1e-12;  // population mass that makes a zero direction fatal

double moment(const DensityOperator& rho, const Observable& g, double power) {
  return expectation(rho, g, power);
}

double xlnx(double x) { return x > kEigenZero ? x * std::log(x) : 0.0; }

// Tr[rho ln sigma] over sigma's spectrum; -infinity when rho has mass on a
// null direction of sigma.
double trace_rho_ln_sigma(const ComplexMatrix& rho, const HermitianMatrix& sigma) {
  const EigenSystem& es = sigma.spectrum();
  const std::size_t d = sigma.dim();
  double acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    Complex pk = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += rho(i, j) * es.vectors(j, k);
      pk += std::conj(es.vectors(i, k)) * row;
    }
    const double p = pk.real();
    if (es.values[k] <= kEigenZero) {
      if (p > kSupportTol) return -kInf;
      continue;
    }
    acc += p * std::log(es.values[k]);
  }
  return acc;
}

} // namespace

void PetrovParams::validate() const {
  if (!(r > 0.0) || !(s > r)) {
    fail(ErrorCode::InvalidArgument, "PetrovParams: need 0 < r < s");
  }
  if (b != 0.0) fail(ErrorCode::InvalidArgument, "PetrovParams: b must be 0 here");
}

void BoundContext::validate() const {
  if (d_s < 1 || d_e < 1) fail(ErrorCode::InvalidArgument, "BoundContext: dims must be >= 1");
  if (!(beta >= 0.0)) fail(ErrorCode::InvalidArgument, "BoundContext: beta must be >= 0");
  if (!(lambda_min_s > 0.0) || !(lambda_min_e > 0.0)) {
    fail(ErrorCode::InvalidArgument, "BoundContext: lambda_min must be positive");
  }
  if (d_s * lambda_min_s > 1.0 + 1e-9 || d_e * lambda_min_e > 1.0 + 1e-9) {
    fail(ErrorCode::InvalidArgument, "BoundContext: d * lambda_min exceeds 1");
  }
  if (coherence < 0.0) fail(ErrorCode::InvalidArgument, "BoundContext: negative coherence");
  if (delta0 < 1) fail(ErrorCode::InvalidArgument, "BoundContext: delta0 must be >= 1");
}

double phi_exponent(const BoundContext& ctx) {
  return std::log(1.0 / ctx.lambda_min_s) + ctx.beta * ctx.delta_eps;
}

double psi_exponent(const BoundContext& ctx) {
  return -std::log(ctx.lambda_min_e) + ctx.beta * ctx.delta_sigma;
}

double omega_exponent(const BoundContext& ctx) {
  return std::log(static_cast<double>(ctx.d_e)) + ctx.beta * (ctx.delta_sigma + ctx.delta_eps);
}

double petrov_ratio(const DensityOperator& rho, const Observable& g, const PetrovParams& p) {
  p.validate();
  const double mr = moment(rho, g, p.r);
  if (mr <= 1e-12) {
    fail(ErrorCode::DegenerateObservable, "petrov_ratio: E[G^r] vanishes");
  }
  if (p.s_infinite()) {
    return std::pow(g.max_eigenvalue(), p.r) / mr;
  }
  const double ms = moment(rho, g, p.s);
  const double exps = p.r / (p.s - p.r);
  const double expr = p.s / (p.s - p.r);
  return std::pow(ms, exps) / std::pow(mr, expr);
}

double petrov_lower_bound(double p_g0) {
  if (p_g0 < 0.0) fail(ErrorCode::InvalidArgument, "petrov_lower_bound: negative probability");
  if (p_g0 >= 1.0 - 1e-12) {
    fail(ErrorCode::Saturated, "petrov_lower_bound: P(G=0) at 1");
  }
  return 1.0 / (1.0 - p_g0);
}

double minimize_pg0(const DensityOperator& rho_e_prime, int delta0) {
  if (delta0 < 1 || static_cast<std::size_t>(delta0) > rho_e_prime.dim()) {
    fail(ErrorCode::InvalidArgument, "minimize_pg0: delta0 out of range");
  }
  return static_cast<double>(delta0) * rho_e_prime.min_eigenvalue();
}

double achievable_min_lambda(const DensityOperator& rho_s, const DensityOperator& rho_e) {
  std::vector<double> products;
  products.reserve(rho_s.dim() * rho_e.dim());
  for (double a : rho_s.eigenvalues())
    for (double b : rho_e.eigenvalues()) products.push_back(a * b);
  std::sort(products.begin(), products.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < rho_s.dim(); ++i) sum += products[i];
  return sum;
}

double pg0_floor(const BoundContext& ctx, BoundFamily family) {
  ctx.validate();
  const double ds = static_cast<double>(ctx.d_s);
  const double de = static_cast<double>(ctx.d_e);
  double base = 0.0;
  switch (family) {
    case BoundFamily::Phi:
      base = ds / de * std::exp(-phi_exponent(ctx));
      break;
    case BoundFamily::Psi:
      base = std::exp(-psi_exponent(ctx));
      break;
    case BoundFamily::Omega:
      base = std::exp(-omega_exponent(ctx));
      break;
    case BoundFamily::Coherent:
      base = ds / de * std::exp(-phi_exponent(ctx)) - ds * ctx.lambda_min_s * ctx.coherence;
      if (!(base > 0.0)) {
        fail(ErrorCode::ValidityViolated, "pg0_floor: coherent correction exceeds the floor");
      }
      break;
  }
  return static_cast<double>(ctx.delta0) * base;
}

double fundamental_limit(const BoundContext& ctx, const PetrovParams& p, BoundFamily family,
                         double lambda_max_g) {
  p.validate();
  const double q = pg0_floor(ctx, family);
  if (q >= 1.0) fail(ErrorCode::Saturated, "fundamental_limit: floor reaches 1");
  if (p.r == 1.0 && p.s == 2.0) return 1.0 / (1.0 / q - 1.0);
  if (p.r == 1.0 && p.s_infinite()) return lambda_max_g * (1.0 - q);
  return 1.0 / (1.0 - q);
}

double von_neumann_entropy(const DensityOperator& rho) {
  double s = 0.0;
  for (double lam : rho.eigenvalues()) s -= xlnx(lam);
  return s;
}

double quantum_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    fail(ErrorCode::DimensionMismatch, "quantum_relative_entropy: dims differ");
  }
  double tr_rho_ln_rho = 0.0;
  for (double lam : rho.eigenvalues()) tr_rho_ln_rho += xlnx(lam);
  const double cross = trace_rho_ln_sigma(rho.matrix(), sigma.hermitian());
  if (cross == -kInf) return kInf; // support violation
  return tr_rho_ln_rho - cross;
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "fidelity: dims differ");
  HermitianMatrix root =
      spectral_function(rho.hermitian(), [](double x) { return std::sqrt(std::max(x, 0.0)); });
  HermitianMatrix inner(root.matrix() * sigma.matrix() * root.matrix());
  double acc = 0.0;
  for (double lam : inner.eigenvalues()) acc += std::sqrt(std::max(lam, 0.0));
  return acc * acc;
}

double hellinger_sq(const std::vector<double>& p1, const std::vector<double>& p2) {
  if (p1.size() != p2.size()) fail(ErrorCode::DimensionMismatch, "hellinger_sq: lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double a = std::sqrt(std::max(p1[i], 0.0));
    const double b = std::sqrt(std::max(p2[i], 0.0));
    acc += (a - b) * (a - b);
  }
  return 0.5 * acc;
}

ThermoReport entropy_production(const DensityOperator& rho_s, const DensityOperator& rho_s_prime,
                                const DensityOperator& rho_se_prime,
                                const DensityOperator& rho_e_prime, const DensityOperator& gamma_e,
                                const Hamiltonian& h_e, double beta) {
  ThermoReport rep;
  rep.entropy_s_before = von_neumann_entropy(rho_s);
  rep.entropy_s_after = von_neumann_entropy(rho_s_prime);
  rep.heat_term =
      beta * (energy_expectation(rho_e_prime, h_e) - energy_expectation(gamma_e, h_e));
  rep.sigma = rep.entropy_s_after - rep.entropy_s_before + rep.heat_term;
  rep.rel_entropy_e = quantum_relative_entropy(rho_e_prime, gamma_e);
  rep.mutual_info = rep.entropy_s_after + von_neumann_entropy(rho_e_prime) -
                    von_neumann_entropy(rho_se_prime);

  // conjugate form D(rho_s' x gamma_e || rho_se')
  const double entropy_product = rep.entropy_s_after + von_neumann_entropy(gamma_e);
  const double cross = trace_rho_ln_sigma(kron(rho_s_prime.matrix(), gamma_e.matrix()),
                                          rho_se_prime.hermitian());
  rep.sigma_star = cross == -kInf ? kInf : -entropy_product - cross;
  return rep;
}

const char* bound_id_name(BoundId id) {
  switch (id) {
    case BoundId::RelvarFloor: return "relvar_floor";
    case BoundId::ExpectationCap: return "expectation_cap";
    case BoundId::PetrovChain1: return "petrov_chain_1";
    case BoundId::PetrovChain2: return "petrov_chain_2";
    case BoundId::PetrovChain3: return "petrov_chain_3";
    case BoundId::HellingerSigma: return "hellinger_sigma";
    case BoundId::HellingerPhi: return "hellinger_phi";
    case BoundId::HellingerRhsOrder: return "hellinger_rhs_order";
    case BoundId::EntropyNonneg: return "entropy_nonneg";
    case BoundId::EntropySplit: return "entropy_split";
    case BoundId::EntropyCap: return "entropy_cap";
    case BoundId::CoherentMinEigLower: return "coherent_min_eig_lower";
    case BoundId::CoherentMinEigUpper: return "coherent_min_eig_upper";
    case BoundId::CoherentMomentFloor: return "coherent_moment_floor";
    case BoundId::BatteryTradeoff: return "battery_tradeoff";
    case BoundId::BatteryChain: return "battery_chain";
    case BoundId::CollisionRelvarFloor: return "collision_relvar_floor";
    case BoundId::SaturationEquality: return "saturation_equality";
    case BoundId::ActivityCap: return "activity_cap";
  }
  return "unknown";
}

BoundReport make_report(BoundId id, double lhs, double rhs, BoundSense sense,
                        const BoundContext& ctx, std::uint64_t seed) {
  BoundReport rep;
  rep.id = id;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.context = ctx;
  rep.seed = seed;
  switch (sense) {
    case BoundSense::LowerBound:
      rep.slack = lhs - rhs;
      break;
    case BoundSense::UpperBound:
      rep.slack = rhs - lhs;
      break;
    case BoundSense::MatchRatio:
      rep.slack = -std::abs(lhs / rhs - 1.0);
      break;
    case BoundSense::MatchValue:
      rep.slack = -std::abs(lhs - rhs);
      break;
  }
  if (std::isnan(rep.slack) && std::isinf(lhs) && std::isinf(rhs)) {
    rep.slack = 0.0; // both sides diverge together
  }
  const double tol = rhs == 0.0 || std::isinf(rhs) ? 1e-9 : 1e-9 * std::max(1.0, std::abs(rhs));
  rep.satisfied = rep.slack >= -tol;
  return rep;
}

BoundReport make_skipped_report(BoundId id, const BoundContext& ctx, std::uint64_t seed) {
  BoundReport rep;
  rep.id = id;
  rep.lhs = kInf;
  rep.rhs = 0.0;
  rep.slack = kInf;
  rep.satisfied = true;
  rep.skipped = true;
  rep.context = ctx;
  rep.seed = seed;
  return rep;
}

BoundReport hellinger_tur(const DensityOperator& rho_e_prime, const DensityOperator& gamma_e,
                          const Observable& g, double sigma_or_phi, HellingerMode mode,
                          const BoundContext& ctx, std::uint64_t seed) {
  const BoundId id = mode == HellingerMode::Sigma ? BoundId::HellingerSigma : BoundId::HellingerPhi;
  const double mean_shift = expectation(rho_e_prime, g) - expectation(gamma_e, g);
  if (std::abs(mean_shift) <= 1e-12) {
    return make_skipped_report(id, ctx, seed); // both sides diverge
  }
  const double spread =
      std::sqrt(variance(rho_e_prime, g)) + std::sqrt(variance(gamma_e, g));
  const double lhs = (spread / mean_shift) * (spread / mean_shift);
  const double expm1x = std::expm1(sigma_or_phi);
  const double rhs = expm1x <= 0.0 ? kInf : 1.0 / expm1x;
  return make_report(id, lhs, rhs, BoundSense::LowerBound, ctx, seed);
}

double salazar_f(double x) {
  if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "salazar_f: x must be positive");
  auto h = [](double y) { return y * std::tanh(0.5 * y); };
  double lo = 0.0;
  double hi = x + 2.0; // h(x+2) > x for every x >= 0
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < x ? lo : hi) = mid;
  }
  const double ginv = 0.5 * (lo + hi);
  const double sh = std::sinh(0.5 * ginv);
  return 1.0 / (sh * sh);
}

} // namespace qtm
