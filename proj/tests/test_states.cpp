#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtm/states.hpp"

using namespace qtm;

namespace {

ComplexMatrix diag(const std::vector<double>& d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

} // namespace

TEST_CASE("gibbs: beta zero is maximally mixed") {
  Rng rng(31);
  Hamiltonian h{random_hermitian(4, rng)};
  DensityOperator g = gibbs_state(h, 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(g.matrix()(i, i).real() == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("gibbs: qubit with beta*eps = ln 2") {
  Hamiltonian h = Hamiltonian::from_diagonal({0.0, 1.0});
  DensityOperator g = gibbs_state(h, std::log(2.0));
  CHECK(g.matrix()(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(g.matrix()(1, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gibbs: populations match the scalar exponential oracle") {
  Rng rng(32);
  const double beta = 0.7;
  Hamiltonian h{random_hermitian(5, rng)};
  DensityOperator g = gibbs_state(h, beta);

  double z = 0.0;
  for (double e : h.levels()) z += std::exp(-beta * e);
  // populations in the energy eigenbasis
  const EigenSystem& es = h.hermitian().spectrum();
  for (std::size_t k = 0; k < 5; ++k) {
    Complex pop = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < 5; ++j) row += g.matrix()(i, j) * es.vectors(j, k);
      pop += std::conj(es.vectors(i, k)) * row;
    }
    CHECK(std::abs(pop.real() - std::exp(-beta * es.values[k]) / z) <= 1e-12);
  }
}

TEST_CASE("gibbs: negative beta is rejected") {
  Hamiltonian h = Hamiltonian::from_diagonal({0.0, 1.0});
  CHECK_THROWS_AS(gibbs_state(h, -0.1), Error);
}

TEST_CASE("gibbs minimum eigenvalue floor") {
  Rng rng(33);
  for (int rep = 0; rep < 100; ++rep) {
    Hamiltonian h{random_hermitian(4, rng)};
    const double beta = rng.uniform(0.0, 5.0);
    DensityOperator g = gibbs_state(h, beta);
    const double floor = std::exp(-beta * h.max_level()) / (4.0 * std::exp(-beta * h.min_level()));
    CHECK(g.min_eigenvalue() >= floor - 1e-12);
  }
  // equality at beta = 0
  Hamiltonian h{random_hermitian(3, rng)};
  DensityOperator g = gibbs_state(h, 0.0);
  CHECK(g.min_eigenvalue() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("evolve_joint: identity leaves both marginals unchanged") {
  Rng rng(34);
  DensityOperator rho_s = random_density(2, rng);
  DensityOperator rho_e = random_density(3, rng);
  JointEvolution ev = evolve_joint(rho_s, rho_e, UnitaryOperator::identity(6));
  ComplexMatrix diff_e = ev.rho_e.matrix();
  diff_e -= rho_e.matrix();
  CHECK(frobenius_norm(diff_e) < 1e-13);
  ComplexMatrix diff_s = ev.rho_s.matrix();
  diff_s -= rho_s.matrix();
  CHECK(frobenius_norm(diff_s) < 1e-13);
}

TEST_CASE("evolve_joint: swap exchanges the marginals") {
  Rng rng(35);
  DensityOperator rho_s = random_density(2, rng);
  DensityOperator rho_e = random_density(2, rng);
  JointEvolution ev = evolve_joint(rho_s, rho_e, UnitaryOperator::swap(2));
  ComplexMatrix diff = ev.rho_e.matrix();
  diff -= rho_s.matrix();
  CHECK(frobenius_norm(diff) < 1e-13);
  diff = ev.rho_s.matrix();
  diff -= rho_e.matrix();
  CHECK(frobenius_norm(diff) < 1e-13);
}

TEST_CASE("evolve_joint: spectrum is the pairwise product set") {
  Rng rng(36);
  DensityOperator rho_s = random_density(2, rng);
  DensityOperator rho_e = random_density(3, rng);
  UnitaryOperator u = random_haar_unitary(6, rng);
  JointEvolution ev = evolve_joint(rho_s, rho_e, u);

  std::vector<double> products;
  for (double a : rho_s.eigenvalues())
    for (double b : rho_e.eigenvalues()) products.push_back(a * b);
  std::sort(products.begin(), products.end());
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(ev.rho_se.eigenvalues()[i] - products[i]) <= 1e-9);
  }
}

TEST_CASE("evolve_joint rejects mismatched unitary dimension") {
  Rng rng(37);
  DensityOperator rho_s = random_density(2, rng);
  DensityOperator rho_e = random_density(2, rng);
  CHECK_THROWS_AS(evolve_joint(rho_s, rho_e, UnitaryOperator::identity(5)), Error);
}

TEST_CASE("expectation: zero observable") {
  Rng rng(38);
  DensityOperator rho = random_density(3, rng);
  Observable zero{HermitianMatrix(ComplexMatrix(3, 3))};
  for (double k : {1.0, 2.0, 5.0}) CHECK(expectation(rho, zero, k) == 0.0);
}

TEST_CASE("expectation and variance: two-point diagonal case") {
  DensityOperator rho = DensityOperator::from_diagonal({0.25, 0.75});
  Observable g{HermitianMatrix(diag({0.0, 1.0}))};
  CHECK(expectation(rho, g, 1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(expectation(rho, g, 2.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(variance(rho, g) == doctest::Approx(0.1875).epsilon(1e-14));
}

TEST_CASE("expectation: third moment matches the spectral-measure oracle") {
  Rng rng(39);
  DensityOperator rho = random_density(4, rng);
  Observable g = random_observable(4, rng);
  double want = 0.0;
  auto dist = measurement_distribution(rho, g);
  for (auto [value, prob] : dist) want += value * value * value * prob;
  CHECK(std::abs(expectation(rho, g, 3.0) - want) <= 1e-10);
}

TEST_CASE("expectation: infinite power returns the top eigenvalue") {
  Rng rng(40);
  DensityOperator rho = random_density(4, rng);
  Observable g = random_observable(4, rng);
  CHECK(expectation(rho, g, kInfinitePower) == g.max_eigenvalue());
}

TEST_CASE("variance is non-negative and matches the central moment") {
  Rng rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    DensityOperator rho = random_density(3, rng);
    Observable g = random_observable(3, rng);
    const double var = variance(rho, g);
    CHECK(var >= 0.0);
    double mean = 0.0, second = 0.0;
    for (auto [value, prob] : measurement_distribution(rho, g)) {
      mean += value * prob;
      second += value * value * prob;
    }
    CHECK(std::abs(var - (second - mean * mean)) <= 1e-10);
  }
}

TEST_CASE("measurement_distribution: maximally mixed gives rank ratios") {
  DensityOperator rho = DensityOperator::maximally_mixed(4);
  Observable g{HermitianMatrix(diag({0.0, 0.0, 1.0, 1.0}))};
  auto dist = measurement_distribution(rho, g);
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dist[1].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.zero_degeneracy() == 2);
}

TEST_CASE("measurement_distribution: zero eigenstate has P(G=0) = 1") {
  DensityOperator rho = DensityOperator::from_diagonal({1.0, 0.0, 0.0});
  Observable g{HermitianMatrix(diag({0.0, 1.0, 2.0}))};
  auto dist = measurement_distribution(rho, g);
  CHECK(dist[0].second == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist[0].first == doctest::Approx(0.0));
}

TEST_CASE("measurement_distribution: degenerate zero against the projector oracle") {
  Rng rng(42);
  DensityOperator rho = random_density(4, rng);
  // G with a two-dimensional zero space spanned by a random pair
  UnitaryOperator basis = random_haar_unitary(4, rng);
  ComplexMatrix g(4, 4);
  const std::vector<double> vals = {0.0, 0.0, 1.3, 2.6};
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        g(i, j) += basis.matrix()(i, k) * vals[k] * std::conj(basis.matrix()(j, k));
  Observable obs{HermitianMatrix(g)};
  CHECK(obs.zero_degeneracy() == 2);

  // explicit Lambda_0 = sum of the two zero eigenvectors
  ComplexMatrix lambda0(4, 4);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        lambda0(i, j) += basis.matrix()(i, k) * std::conj(basis.matrix()(j, k));
  const double want = (rho.matrix() * lambda0).trace().real();

  auto dist = measurement_distribution(rho, obs);
  CHECK(std::abs(dist[0].second - want) <= 1e-10);
  double total = 0.0;
  for (auto [value, prob] : dist) total += prob;
  CHECK(std::abs(total - 1.0) <= 1e-10);
}

TEST_CASE("haar unitary: unit modulus at d = 1 and unitarity in general") {
  Rng rng(43);
  UnitaryOperator u1 = random_haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u1.matrix()(0, 0)) - 1.0) < 1e-12);
  for (std::size_t d : {2u, 5u, 9u}) {
    UnitaryOperator u = random_haar_unitary(d, rng);
    ComplexMatrix gram = u.matrix().adjoint() * u.matrix();
    gram -= ComplexMatrix::identity(d);
    CHECK(frobenius_norm(gram) <= 1e-10);
  }
}

TEST_CASE("haar unitary: first-entry moment matches 1/d") {
  Rng rng(44);
  const int samples = 10000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    UnitaryOperator u = random_haar_unitary(2, rng);
    sum += std::norm(u.matrix()(0, 0));
  }
  const double mean = sum / samples;
  // |U_00|^2 is uniform on [0,1] at d = 2: sd of the mean = sqrt(1/12/n)
  const double se = std::sqrt(1.0 / 12.0 / samples);
  CHECK(std::abs(mean - 0.5) <= 3.0 * se);
}

TEST_CASE("random density and observable invariants") {
  Rng rng(45);
  for (int rep = 0; rep < 25; ++rep) {
    DensityOperator rho = random_density(4, rng);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) <= 1e-12);
    CHECK(rho.min_eigenvalue() >= -1e-12);
    Observable g = random_observable(4, rng);
    CHECK(std::abs(g.eigenvalues().front()) <= 1e-12);
    CHECK(g.eigenvalues().front() >= -1e-12);
  }
  DensityOperator one = random_density(1, rng);
  CHECK(one.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coherent_gibbs: zero perturbation returns the thermal state") {
  Hamiltonian h = Hamiltonian::from_diagonal({0.0, 1.0});
  CoherentPerturbation chi{HermitianMatrix(ComplexMatrix(2, 2))};
  CHECK(chi.coherence() == 0.0);
  DensityOperator rc = coherent_gibbs(h, std::log(2.0), chi);
  CHECK(rc.matrix()(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(std::abs(rc.matrix()(0, 1)) < 1e-15);
}

TEST_CASE("coherent_gibbs: qubit closed form") {
  Hamiltonian h = Hamiltonian::from_diagonal({0.0, 1.0});
  const double beta = std::log(2.0); // populations 2/3, 1/3
  ComplexMatrix chi_m(2, 2);
  chi_m(0, 1) = 0.1;
  chi_m(1, 0) = 0.1;
  CoherentPerturbation chi{HermitianMatrix(chi_m)};
  CHECK(chi.coherence() == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-14));

  DensityOperator rc = coherent_gibbs(h, beta, chi);
  const double split = std::sqrt(1.0 / 36.0 + 0.01);
  CHECK(rc.eigenvalues()[0] == doctest::Approx(0.5 - split).epsilon(1e-12));
  CHECK(rc.eigenvalues()[1] == doctest::Approx(0.5 + split).epsilon(1e-12));
  // populations keep the thermal values
  CHECK(rc.matrix()(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(rc.matrix()(1, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("coherent_gibbs: perturbation scans to a positivity failure") {
  Hamiltonian h = Hamiltonian::from_diagonal({0.0, 1.0});
  const double beta = std::log(2.0);
  // 2x2 closed form: min eigenvalue 1/2 - sqrt(1/36 + c^2) < 0 iff c^2 > 2/9
  const double critical = std::sqrt(2.0) / 3.0;
  bool hit = false;
  for (double c = 0.05; c < 1.0; c += 0.05) {
    ComplexMatrix chi_m(2, 2);
    chi_m(0, 1) = c;
    chi_m(1, 0) = c;
    CoherentPerturbation chi{HermitianMatrix(chi_m)};
    if (c <= critical - 0.01) {
      CHECK_NOTHROW(coherent_gibbs(h, beta, chi));
    } else if (c >= critical + 0.01) {
      hit = true;
      CHECK_THROWS_AS(coherent_gibbs(h, beta, chi), Error);
    }
  }
  CHECK(hit);
}

TEST_CASE("coherent perturbation rejects diagonal entries") {
  ComplexMatrix chi_m(2, 2);
  chi_m(0, 0) = 0.2;
  CHECK_THROWS_AS(CoherentPerturbation{HermitianMatrix(chi_m)}, Error);
}

TEST_CASE("unitary conjugation preserves the spectrum") {
  Rng rng(46);
  for (int rep = 0; rep < 25; ++rep) {
    DensityOperator rho = random_density(4, rng);
    UnitaryOperator u = random_haar_unitary(4, rng);
    HermitianMatrix rotated(u.matrix() * rho.matrix() * u.matrix().adjoint());
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(rotated.eigenvalues()[i] - rho.eigenvalues()[i]) <= 1e-9);
    }
  }
}

TEST_CASE("coherent sandwich: schur-horn above, weyl below") {
  Rng rng(47);
  for (int rep = 0; rep < 50; ++rep) {
    Hamiltonian h{random_hermitian(3, rng)};
    const double beta = rng.uniform(0.0, 2.0);
    DensityOperator gamma = gibbs_state(h, beta);
    ComplexMatrix chi_m = random_hermitian(3, rng).matrix();
    for (std::size_t i = 0; i < 3; ++i) chi_m(i, i) = 0.0;
    const double norm = frobenius_norm(chi_m);
    if (norm < 1e-12) continue;
    chi_m *= Complex(rng.uniform(0.0, 0.95) * gamma.min_eigenvalue() / norm);
    CoherentPerturbation chi{HermitianMatrix(chi_m)};
    DensityOperator rc = coherent_gibbs(h, beta, chi);
    CHECK(rc.min_eigenvalue() <= gamma.min_eigenvalue() + 1e-12);
    CHECK(rc.min_eigenvalue() >= gamma.min_eigenvalue() - chi.coherence() - 1e-12);
  }
}
