#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "qtm/matrix.hpp"
#include "qtm/rng.hpp"

namespace qtm {

class Hamiltonian {
public:
  explicit Hamiltonian(HermitianMatrix m);
  static Hamiltonian from_diagonal(const std::vector<double>& levels);

  std::size_t dim() const { return mat_.dim(); }
  const HermitianMatrix& hermitian() const { return mat_; }
  const ComplexMatrix& matrix() const { return mat_.matrix(); }
  const std::vector<double>& levels() const { return mat_.eigenvalues(); }
  double min_level() const { return mat_.min_eigenvalue(); }
  double max_level() const { return mat_.max_eigenvalue(); }
  double bandwidth() const { return max_level() - min_level(); }

  /// Same operator with the ground level moved to zero.
  Hamiltonian shifted_to_zero() const;

private:
  HermitianMatrix mat_;
};

/// Unit-trace positive-semidefinite operator (trace within 1e-12,
/// eigenvalues >= -1e-12). Spectrum computed at construction.
class DensityOperator {
public:
  explicit DensityOperator(HermitianMatrix m);
  static DensityOperator maximally_mixed(std::size_t d);
  static DensityOperator from_diagonal(const std::vector<double>& populations);

  std::size_t dim() const { return mat_.dim(); }
  const HermitianMatrix& hermitian() const { return mat_; }
  const ComplexMatrix& matrix() const { return mat_.matrix(); }
  const std::vector<double>& eigenvalues() const { return mat_.eigenvalues(); }
  double min_eigenvalue() const { return mat_.min_eigenvalue(); }

private:
  HermitianMatrix mat_;
};

class UnitaryOperator {
public:
  explicit UnitaryOperator(ComplexMatrix m);
  static UnitaryOperator identity(std::size_t d);
  /// SWAP on a d x d bipartite space (composite dimension d*d).
  static UnitaryOperator swap(std::size_t d);
  /// Permutation sending basis state source[i] to basis state i.
  static UnitaryOperator permutation(const std::vector<std::size_t>& source_of);

  std::size_t dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

private:
  ComplexMatrix mat_;
};

struct OutcomeGroup {
  double value;     // representative eigenvalue of the cluster
  int multiplicity; // projector rank
};

/// Observable with grouped spectrum and the min-eigenvalue-zero convention
/// (lambda_min within 1e-12 of 0, all eigenvalues >= -1e-12). delta0 is the
/// multiplicity of the zero cluster; clusters are split where the gap
/// exceeds 1e-8 max(1, ||G||_op).
class Observable {
public:
  explicit Observable(HermitianMatrix m);
  /// G - lambda_min(G) I, the shift used for generic Hermitian inputs.
  static Observable shifted(const HermitianMatrix& m);

  std::size_t dim() const { return mat_.dim(); }
  const HermitianMatrix& hermitian() const { return mat_; }
  const ComplexMatrix& matrix() const { return mat_.matrix(); }
  const std::vector<double>& eigenvalues() const { return mat_.eigenvalues(); }
  double max_eigenvalue() const { return mat_.max_eigenvalue(); }
  const std::vector<OutcomeGroup>& groups() const { return groups_; }
  int zero_degeneracy() const { return delta0_; }

private:
  HermitianMatrix mat_;
  std::vector<OutcomeGroup> groups_;
  int delta0_ = 1;
};

/// Traceless-diagonal Hermitian perturbation, expressed in the energy
/// eigenbasis of the Hamiltonian it will be added to. Coherence is its
/// Frobenius norm.
class CoherentPerturbation {
public:
  explicit CoherentPerturbation(HermitianMatrix chi);

  std::size_t dim() const { return chi_.dim(); }
  const HermitianMatrix& chi() const { return chi_; }
  double coherence() const { return coherence_; }

private:
  HermitianMatrix chi_;
  double coherence_ = 0.0;
};

/// exp(-beta H)/Z. beta must be finite and non-negative.
DensityOperator gibbs_state(const Hamiltonian& h, double beta);

/// Thermal state carrying off-diagonal coherence: populations of gibbs(h,
/// beta) plus chi, assembled in the energy eigenbasis and rotated back.
/// Fails with NotPositive when the sum stops being a state.
DensityOperator coherent_gibbs(const Hamiltonian& h_e, double beta,
                               const CoherentPerturbation& chi);

struct JointEvolution {
  DensityOperator rho_se;
  DensityOperator rho_e;
  DensityOperator rho_s;
};

/// rho_se' = U (rho_s x rho_e) U^dagger plus both reduced states.
JointEvolution evolve_joint(const DensityOperator& rho_s, const DensityOperator& rho_e,
                            const UnitaryOperator& u);

constexpr double kInfinitePower = std::numeric_limits<double>::infinity();

/// Tr[rho G^power] over the spectral measure of G; power = infinity returns
/// lambda_max(G).
double expectation(const DensityOperator& rho, const Observable& g, double power = 1.0);
double variance(const DensityOperator& rho, const Observable& g);

/// One (outcome, probability) entry per eigenvalue group, ascending; the
/// first entry is P(G = 0).
std::vector<std::pair<double, double>> measurement_distribution(const DensityOperator& rho,
                                                                const Observable& g);

double energy_expectation(const DensityOperator& rho, const Hamiltonian& h);

/// Haar unitary: modified Gram-Schmidt QR of a Ginibre matrix. The R
/// diagonal is real positive by construction, so the usual phase correction
/// divides by unity.
UnitaryOperator random_haar_unitary(std::size_t d, Rng& rng);
DensityOperator random_density(std::size_t d, Rng& rng);
Observable random_observable(std::size_t d, Rng& rng);
/// (B + B^dagger)/2 with B Ginibre.
HermitianMatrix random_hermitian(std::size_t d, Rng& rng);

} // namespace qtm
