#include "qtm/states.hpp"

#include <algorithm>
#include <cmath>

namespace qtm {

namespace {

ComplexMatrix diagonal_matrix(const std::vector<double>& d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

// population of eigenvector k of `es` under rho
double population(const EigenSystem& es, const ComplexMatrix& rho, std::size_t k) {
  const std::size_t d = rho.rows();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    Complex row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += rho(i, j) * es.vectors(j, k);
    acc += std::conj(es.vectors(i, k)) * row;
  }
  return acc.real();
}

std::vector<OutcomeGroup> group_spectrum(const std::vector<double>& ascending, double gap_tol) {
  std::vector<OutcomeGroup> groups;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= ascending.size(); ++i) {
    if (i == ascending.size() || ascending[i] - ascending[i - 1] > gap_tol) {
      double sum = 0.0;
      for (std::size_t j = start; j < i; ++j) sum += ascending[j];
      groups.push_back({sum / static_cast<double>(i - start), static_cast<int>(i - start)});
      start = i;
    }
  }
  return groups;
}

} // namespace

Hamiltonian::Hamiltonian(HermitianMatrix m) : mat_(std::move(m)) {
  mat_.spectrum(); // cache now; instances are shared read-only afterwards
}

Hamiltonian Hamiltonian::from_diagonal(const std::vector<double>& levels) {
  return Hamiltonian(HermitianMatrix(diagonal_matrix(levels)));
}

Hamiltonian Hamiltonian::shifted_to_zero() const {
  ComplexMatrix m = mat_.matrix();
  const double ground = min_level();
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= ground;
  return Hamiltonian(HermitianMatrix(m));
}

DensityOperator::DensityOperator(HermitianMatrix m) : mat_(std::move(m)) {
  const double tr = mat_.matrix().trace().real();
  if (std::abs(tr - 1.0) > 1e-12) {
    fail(ErrorCode::InvalidArgument, "DensityOperator: trace deviates from 1");
  }
  if (mat_.min_eigenvalue() < -1e-12) {
    fail(ErrorCode::NotPositive, "DensityOperator: negative eigenvalue beyond tolerance");
  }
}

DensityOperator DensityOperator::maximally_mixed(std::size_t d) {
  std::vector<double> p(d, 1.0 / static_cast<double>(d));
  return from_diagonal(p);
}

DensityOperator DensityOperator::from_diagonal(const std::vector<double>& populations) {
  return DensityOperator(HermitianMatrix(diagonal_matrix(populations)));
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : mat_(std::move(m)) {
  if (!mat_.square()) fail(ErrorCode::DimensionMismatch, "UnitaryOperator: not square");
  if (!mat_.all_finite()) fail(ErrorCode::InvalidArgument, "UnitaryOperator: non-finite entry");
  ComplexMatrix gram = mat_.adjoint() * mat_;
  gram -= ComplexMatrix::identity(mat_.rows());
  if (frobenius_norm(gram) > 1e-10) {
    fail(ErrorCode::InvalidArgument, "UnitaryOperator: U^dagger U deviates from identity");
  }
}

UnitaryOperator UnitaryOperator::identity(std::size_t d) {
  return UnitaryOperator(ComplexMatrix::identity(d));
}

UnitaryOperator UnitaryOperator::swap(std::size_t d) {
  ComplexMatrix m(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(j * d + i, i * d + j) = 1.0;
  return UnitaryOperator(m);
}

UnitaryOperator UnitaryOperator::permutation(const std::vector<std::size_t>& source_of) {
  const std::size_t d = source_of.size();
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (source_of[i] >= d) fail(ErrorCode::InvalidArgument, "permutation: index out of range");
    m(i, source_of[i]) = 1.0;
  }
  return UnitaryOperator(m);
}

Observable::Observable(HermitianMatrix m) : mat_(std::move(m)) {
  const auto& vals = mat_.eigenvalues();
  if (std::abs(vals.front()) > 1e-12) {
    fail(ErrorCode::InvalidArgument, "Observable: minimum eigenvalue not zero");
  }
  const double gap_tol = 1e-8 * std::max(1.0, std::max(std::abs(vals.front()), std::abs(vals.back())));
  groups_ = group_spectrum(vals, gap_tol);
  delta0_ = groups_.front().multiplicity;
}

Observable Observable::shifted(const HermitianMatrix& m) {
  ComplexMatrix shifted = m.matrix();
  const double lam_min = m.min_eigenvalue();
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= lam_min;
  return Observable(HermitianMatrix(shifted));
}

CoherentPerturbation::CoherentPerturbation(HermitianMatrix chi) : chi_(std::move(chi)) {
  for (std::size_t i = 0; i < chi_.dim(); ++i) {
    if (std::abs(chi_.matrix()(i, i)) > 1e-12) {
      fail(ErrorCode::InvalidArgument, "CoherentPerturbation: nonzero diagonal entry");
    }
  }
  coherence_ = frobenius_norm(chi_.matrix());
}

DensityOperator gibbs_state(const Hamiltonian& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    fail(ErrorCode::InvalidArgument, "gibbs_state: beta must be finite and >= 0");
  }
  // weights relative to the ground level; the shift cancels in the ratio
  const double ground = h.min_level();
  double z = 0.0;
  for (double level : h.levels()) z += std::exp(-beta * (level - ground));
  HermitianMatrix g = spectral_function(
      h.hermitian(), [&](double x) { return std::exp(-beta * (x - ground)) / z; });
  return DensityOperator(std::move(g));
}

DensityOperator coherent_gibbs(const Hamiltonian& h_e, double beta,
                               const CoherentPerturbation& chi) {
  if (chi.dim() != h_e.dim()) {
    fail(ErrorCode::DimensionMismatch, "coherent_gibbs: chi dimension mismatch");
  }
  const double ground = h_e.min_level();
  double z = 0.0;
  for (double level : h_e.levels()) z += std::exp(-beta * (level - ground));

  // energy-basis populations plus the perturbation
  ComplexMatrix core = chi.chi().matrix();
  for (std::size_t i = 0; i < core.rows(); ++i) {
    core(i, i) += std::exp(-beta * (h_e.levels()[i] - ground)) / z;
  }
  HermitianMatrix core_h(core);
  if (core_h.min_eigenvalue() < -1e-12) {
    fail(ErrorCode::NotPositive, "coherent_gibbs: gamma + chi has a negative eigenvalue");
  }

  const ComplexMatrix& v = h_e.hermitian().spectrum().vectors;
  return DensityOperator(HermitianMatrix(v * core_h.matrix() * v.adjoint()));
}

JointEvolution evolve_joint(const DensityOperator& rho_s, const DensityOperator& rho_e,
                            const UnitaryOperator& u) {
  const std::size_t d_s = rho_s.dim();
  const std::size_t d_e = rho_e.dim();
  if (u.dim() != d_s * d_e) {
    fail(ErrorCode::DimensionMismatch, "evolve_joint: dim(U) != d_s * d_e");
  }
  ComplexMatrix joint = u.matrix() * kron(rho_s.matrix(), rho_e.matrix()) * u.matrix().adjoint();
  DensityOperator rho_se{HermitianMatrix(joint)};
  DensityOperator out_e{HermitianMatrix(partial_trace_system(joint, d_s, d_e))};
  DensityOperator out_s{HermitianMatrix(partial_trace_env(joint, d_s, d_e))};
  return {std::move(rho_se), std::move(out_e), std::move(out_s)};
}

double expectation(const DensityOperator& rho, const Observable& g, double power) {
  if (rho.dim() != g.dim()) fail(ErrorCode::DimensionMismatch, "expectation: dims differ");
  if (!(power > 0.0)) fail(ErrorCode::InvalidArgument, "expectation: power must be positive");
  if (std::isinf(power)) return g.max_eigenvalue();

  const EigenSystem& es = g.hermitian().spectrum();
  double acc = 0.0;
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const double lam = std::max(es.values[k], 0.0); // clamp -1e-12 jitter
    if (lam == 0.0) continue;
    acc += std::pow(lam, power) * population(es, rho.matrix(), k);
  }
  return acc;
}

double variance(const DensityOperator& rho, const Observable& g) {
  const double mean = expectation(rho, g, 1.0);
  const double second = expectation(rho, g, 2.0);
  double var = second - mean * mean;
  if (var < 0.0 && var > -1e-12) var = 0.0;
  return var;
}

std::vector<std::pair<double, double>> measurement_distribution(const DensityOperator& rho,
                                                                const Observable& g) {
  if (rho.dim() != g.dim()) {
    fail(ErrorCode::DimensionMismatch, "measurement_distribution: dims differ");
  }
  const EigenSystem& es = g.hermitian().spectrum();
  std::vector<std::pair<double, double>> dist;
  dist.reserve(g.groups().size());
  std::size_t k = 0;
  for (const OutcomeGroup& grp : g.groups()) {
    double p = 0.0;
    for (int r = 0; r < grp.multiplicity; ++r, ++k) p += population(es, rho.matrix(), k);
    dist.emplace_back(grp.value, std::max(p, 0.0));
  }
  return dist;
}

double energy_expectation(const DensityOperator& rho, const Hamiltonian& h) {
  if (rho.dim() != h.dim()) fail(ErrorCode::DimensionMismatch, "energy_expectation: dims differ");
  return (rho.matrix() * h.matrix()).trace().real();
}

UnitaryOperator random_haar_unitary(std::size_t d, Rng& rng) {
  if (d < 1) fail(ErrorCode::InvalidArgument, "random_haar_unitary: d must be >= 1");
  ComplexMatrix g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.gaussian_complex();

  // modified Gram-Schmidt, one reorthogonalization pass
  for (std::size_t col = 0; col < d; ++col) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t prev = 0; prev < col; ++prev) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < d; ++i) proj += std::conj(g(i, prev)) * g(i, col);
        for (std::size_t i = 0; i < d; ++i) g(i, col) -= proj * g(i, prev);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += std::norm(g(i, col));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) g(i, col) /= norm;
  }
  return UnitaryOperator(std::move(g));
}

DensityOperator random_density(std::size_t d, Rng& rng) {
  if (d < 1) fail(ErrorCode::InvalidArgument, "random_density: d must be >= 1");
  ComplexMatrix x(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.gaussian_complex();
  ComplexMatrix rho = x * x.adjoint();
  rho *= Complex(1.0 / rho.trace().real());
  return DensityOperator(HermitianMatrix(rho));
}

Observable random_observable(std::size_t d, Rng& rng) {
  return Observable::shifted(random_hermitian(d, rng));
}

HermitianMatrix random_hermitian(std::size_t d, Rng& rng) {
  if (d < 1) fail(ErrorCode::InvalidArgument, "random_hermitian: d must be >= 1");
  ComplexMatrix b(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) b(i, j) = rng.gaussian_complex();
  ComplexMatrix h = b;
  h += b.adjoint();
  h *= Complex(0.5);
  return HermitianMatrix(h);
}

} // namespace qtm
