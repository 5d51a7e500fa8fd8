#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qtm/bounds.hpp"
#include "qtm/states.hpp"

namespace qtm {

struct BatteryReport {
  double stored_energy = 0.0; // mean energy gained by the battery
  double precision = 0.0;     // post-charging energy variance
  double ratio = 0.0;         // precision / stored_energy^2
  double relvar = 0.0;        // Var / E'^2, the middle link of the chain
  double bound_rhs = 0.0;     // relative-variance floor
  bool zero_charge = false;   // |stored_energy| <= 1e-12, trade-off vacuous
};

/// Charger-mediated charging step: battery starts in the Gibbs state of
/// h_e (ground level shifted to zero), the charger state rho_s and the
/// battery interact through u, and the battery energy is measured.
BatteryReport battery_charge(const DensityOperator& rho_s, const Hamiltonian& h_e, double beta,
                             const UnitaryOperator& u);

/// Sequential qubit-ancilla interactions with deferred measurement. Weights
/// map ancilla outcome bit-strings to non-negative values with
/// weight(0) = 0; ancilla 1 owns the most significant bit.
struct CollisionConfig {
  int ancilla_count = 1;
  double gap = 1.0; // ancilla level splitting
  double beta = 0.0;
  std::vector<UnitaryOperator> step_unitaries; // one per ancilla, each on d_s*2
  std::function<double(std::uint32_t)> weight;
};

struct CollisionResult {
  std::vector<double> distribution; // exact P(m) over all 2^N bit-strings
  double mean_g = 0.0;
  double var_g = 0.0;
  double bound_rhs = 0.0;
};

/// Full-composite evaluation (no sampling). The composite density matrix is
/// dense: ancilla_count = 12 with a qubit system touches ~2^26 complex
/// entries transiently, so budget memory accordingly.
CollisionResult collision_run(const CollisionConfig& cfg, const DensityOperator& rho_s);

/// Permutation that routes the d_s smallest diagonal entries of a diagonal
/// joint state onto the environment level 0 block {(n, 0)}.
UnitaryOperator min_routing_permutation(const std::vector<double>& joint_diag, int d_s, int d_e);

/// Two-outcome marker observable on the environment: 0 on level 0, 1
/// elsewhere.
Observable two_level_marker(int d_e);

struct SaturationScenario {
  DensityOperator rho_s;
  DensityOperator gamma_e; // beta = 0 thermal state
  Hamiltonian h_e;
  UnitaryOperator u;
  Observable g;
};

/// Configuration that attains the relative-variance floor exactly:
/// maximally mixed system, infinite-temperature environment, routing
/// permutation, aligned two-outcome observable. Requires 2 <= d_e and
/// d_s <= d_e.
SaturationScenario saturation_scenario(int d_s, int d_e);

/// Classical Markov jump process; rates_[to, from] with implied diagonal.
class MarkovChain {
public:
  explicit MarkovChain(std::size_t n_states);

  std::size_t size() const { return n_; }
  double rate(std::size_t to, std::size_t from) const { return rates_[to * n_ + from]; }
  void set_rate(std::size_t to, std::size_t from, double w);

  const std::vector<double>& distribution() const { return dist_; }
  bool stationary_flagged() const { return stationary_; }
  void set_distribution(std::vector<double> p, bool stationary);

  /// Dense null-space solve of W P = 0 with normalization; rejects chains
  /// whose kernel is not one-dimensional (multiple recurrent classes).
  void solve_stationary();

private:
  std::size_t n_;
  std::vector<double> rates_;
  std::vector<double> dist_;
  bool stationary_ = false;
};

struct MarkovReport {
  double sigma_rate = 0.0;    // entropy production rate
  double activity_rate = 0.0; // dynamical activity rate
  double ratio_cap = 1.0;     // max transition rate ratio R
  double kappa = 0.0;         // kappa(R)
  bool bound_ok = true;       // sigma_rate <= kappa * activity_rate
};

double kappa_of_ratio(double r);

/// Entropy production and activity rates at the flagged stationary
/// distribution; fails on one-way transitions (infinite rate ratio).
MarkovReport markov_rates_report(const MarkovChain& chain);

MarkovChain random_reversible_chain(std::size_t n_states, Rng& rng);

} // namespace qtm
