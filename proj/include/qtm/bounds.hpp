#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qtm/states.hpp"

namespace qtm {

/// Moment orders of the Petrov inequality, 0 < r < s (s may be infinite).
/// b stays 0 throughout this library.
struct PetrovParams {
  double r = 1.0;
  double s = 2.0;
  double b = 0.0;

  bool s_infinite() const { return std::isinf(s); }
  void validate() const;
};

/// Scalar inputs of the precision limits.
struct BoundContext {
  double beta = 0.0;
  int d_s = 1;
  int d_e = 1;
  double delta_eps = 0.0;   // environment bandwidth
  double delta_sigma = 0.0; // system bandwidth
  double lambda_min_s = 1.0;
  double lambda_min_e = 1.0;
  double coherence = 0.0;
  int delta0 = 1;

  void validate() const;
};

enum class BoundFamily { Phi, Psi, Omega, Coherent };

// cost exponents, in nats
double phi_exponent(const BoundContext& ctx);
double psi_exponent(const BoundContext& ctx);
double omega_exponent(const BoundContext& ctx);

/// E[G^s]^{r/(s-r)} / E[G^r]^{s/(s-r)}; for infinite s the limit form
/// lambda_max(G)^r / E[G^r]. Fails with DegenerateObservable when
/// E[G^r] <= 1e-12.
double petrov_ratio(const DensityOperator& rho, const Observable& g, const PetrovParams& p);

/// 1 / (1 - P(G=0)); Saturated when P(G=0) >= 1 - 1e-12.
double petrov_lower_bound(double p_g0);

/// Minimum of P(G=0) over all rank-delta0 zero projectors:
/// delta0 * lambda_min(rho_e_prime).
double minimize_pg0(const DensityOperator& rho_e_prime, int delta0);

/// Smallest reachable lambda_min of the evolved environment over all joint
/// unitaries: sum of the d_s smallest pairwise spectral products.
double achievable_min_lambda(const DensityOperator& rho_s, const DensityOperator& rho_e);

/// Dynamics-independent floor on P(G=0) for the given family (the quantity
/// the moment-ratio limits are built from). Fails with ValidityViolated
/// when the Coherent floor stops being positive.
double pg0_floor(const BoundContext& ctx, BoundFamily family);

/// Right-hand side of the precision limit for the given family and moment
/// orders: the generic ratio floor 1/(1-q); for (r,s)=(1,2) the relative
/// variance floor (1/q - 1)^{-1}; for (r,s)=(1,inf) the expectation cap
/// lambda_max_g (1 - q). Saturated when q >= 1.
double fundamental_limit(const BoundContext& ctx, const PetrovParams& p, BoundFamily family,
                         double lambda_max_g = 1.0);

// entropic functionals, in nats
double von_neumann_entropy(const DensityOperator& rho);
/// Tr[rho (ln rho - ln sigma)]; +infinity signals a support violation.
double quantum_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
/// Squared Hellinger distance of two aligned probability lists, in [0, 1].
double hellinger_sq(const std::vector<double>& p1, const std::vector<double>& p2);

struct ThermoReport {
  double entropy_s_before = 0.0;
  double entropy_s_after = 0.0;
  double heat_term = 0.0; // beta * (E'_E - E_E)
  double sigma = 0.0;
  double sigma_star = 0.0; // conjugate form, D(rho_s' x gamma_e || rho_se')
  double mutual_info = 0.0;
  double rel_entropy_e = 0.0;
};

/// Entropy production of one joint-unitary step with a thermal environment,
/// together with its mutual-information / relative-entropy split.
ThermoReport entropy_production(const DensityOperator& rho_s, const DensityOperator& rho_s_prime,
                                const DensityOperator& rho_se_prime,
                                const DensityOperator& rho_e_prime, const DensityOperator& gamma_e,
                                const Hamiltonian& h_e, double beta);

enum class BoundId {
  RelvarFloor,
  ExpectationCap,
  PetrovChain1,
  PetrovChain2,
  PetrovChain3,
  HellingerSigma,
  HellingerPhi,
  HellingerRhsOrder,
  EntropyNonneg,
  EntropySplit,
  EntropyCap,
  CoherentMinEigLower,
  CoherentMinEigUpper,
  CoherentMomentFloor,
  BatteryTradeoff,
  BatteryChain,
  CollisionRelvarFloor,
  SaturationEquality,
  ActivityCap,
};

const char* bound_id_name(BoundId id);

enum class BoundSense {
  LowerBound, // satisfied when lhs >= rhs
  UpperBound, // satisfied when lhs <= rhs
  MatchRatio, // satisfied when |lhs/rhs - 1| is small
  MatchValue, // satisfied when |lhs - rhs| is small
};

/// One verification record. slack is oriented so that >= 0 means satisfied;
/// the tolerance is -1e-9 max(1, |rhs|).
struct BoundReport {
  BoundId id = BoundId::RelvarFloor;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool satisfied = true;
  bool skipped = false;
  BoundContext context;
  std::uint64_t seed = 0;
};

BoundReport make_report(BoundId id, double lhs, double rhs, BoundSense sense,
                        const BoundContext& ctx, std::uint64_t seed);
BoundReport make_skipped_report(BoundId id, const BoundContext& ctx, std::uint64_t seed);

enum class HellingerMode { Sigma, PhiCap };

/// Hellinger-type uncertainty relation for the measured environment:
/// ((sqrt Var' + sqrt Var_gamma)/(E' - E_gamma))^2 >= 1/(e^x - 1) with
/// x = sigma, or x = Phi(beta, delta_eps, 1/d_s) in PhiCap mode. A vanishing
/// mean shift makes both sides diverge; the report is then skipped.
BoundReport hellinger_tur(const DensityOperator& rho_e_prime, const DensityOperator& gamma_e,
                          const Observable& g, double sigma_or_phi, HellingerMode mode,
                          const BoundContext& ctx, std::uint64_t seed);

/// f(x) = 1/sinh^2(g(x)/2) with g the inverse of h(y) = y tanh(y/2);
/// comparison curve of the conjugate-entropy relation.
double salazar_f(double x);

} // namespace qtm
