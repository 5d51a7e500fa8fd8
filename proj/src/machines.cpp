#include "qtm/machines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace qtm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Apply U acting on (system, ancilla j) to the composite matrix in place,
// rows first, then columns with the conjugate.
void apply_step_unitary(ComplexMatrix& rho, const ComplexMatrix& u, std::size_t d_s, int n_anc,
                        int ancilla) {
  const std::size_t local = d_s * 2;
  const std::size_t dim = rho.rows();
  const std::size_t bit = std::size_t{1} << (n_anc - ancilla); // ancilla 1 = MSB
  const std::size_t env_dim = std::size_t{1} << n_anc;

  std::vector<std::size_t> slot(local);
  std::vector<Complex> buf(local);

  // rest = environment bits with the target ancilla removed
  const std::size_t rest_count = env_dim / 2;
  for (std::size_t rest = 0; rest < rest_count; ++rest) {
    const std::size_t low = rest & (bit - 1);
    const std::size_t high = (rest ^ low) << 1;
    const std::size_t base = high | low;
    for (std::size_t s = 0; s < d_s; ++s)
      for (std::size_t m = 0; m < 2; ++m) slot[s * 2 + m] = s * env_dim + base + m * bit;

    for (std::size_t col = 0; col < dim; ++col) {
      for (std::size_t a = 0; a < local; ++a) {
        Complex acc = 0.0;
        for (std::size_t b = 0; b < local; ++b) acc += u(a, b) * rho(slot[b], col);
        buf[a] = acc;
      }
      for (std::size_t a = 0; a < local; ++a) rho(slot[a], col) = buf[a];
    }
    for (std::size_t row = 0; row < dim; ++row) {
      for (std::size_t a = 0; a < local; ++a) {
        Complex acc = 0.0;
        for (std::size_t b = 0; b < local; ++b) acc += rho(row, slot[b]) * std::conj(u(a, b));
        buf[a] = acc;
      }
      for (std::size_t a = 0; a < local; ++a) rho(row, slot[a]) = buf[a];
    }
  }
}

} // namespace

BatteryReport battery_charge(const DensityOperator& rho_s, const Hamiltonian& h_e, double beta,
                             const UnitaryOperator& u) {
  const Hamiltonian battery = h_e.shifted_to_zero();
  const DensityOperator gamma = gibbs_state(battery, beta);
  const JointEvolution evolved = evolve_joint(rho_s, gamma, u);
  const Observable meter(battery.hermitian());

  BatteryReport rep;
  const double energy_after = expectation(evolved.rho_e, meter);
  rep.stored_energy = energy_after - expectation(gamma, meter);
  rep.precision = variance(evolved.rho_e, meter);
  rep.zero_charge = std::abs(rep.stored_energy) <= 1e-12;
  rep.ratio = rep.zero_charge ? kInf : rep.precision / (rep.stored_energy * rep.stored_energy);
  rep.relvar = energy_after <= 1e-12 ? kInf : rep.precision / (energy_after * energy_after);

  BoundContext ctx;
  ctx.beta = beta;
  ctx.d_s = static_cast<int>(rho_s.dim());
  ctx.d_e = static_cast<int>(battery.dim());
  ctx.delta_eps = battery.bandwidth();
  ctx.lambda_min_s = rho_s.min_eigenvalue();
  ctx.lambda_min_e = gamma.min_eigenvalue();
  ctx.delta0 = meter.zero_degeneracy();
  rep.bound_rhs = fundamental_limit(ctx, PetrovParams{1.0, 2.0, 0.0}, BoundFamily::Phi);
  return rep;
}

CollisionResult collision_run(const CollisionConfig& cfg, const DensityOperator& rho_s) {
  const int n = cfg.ancilla_count;
  if (n < 1) fail(ErrorCode::InvalidArgument, "collision_run: need at least one ancilla");
  if (n > 12) fail(ErrorCode::TooManyAncillae, "collision_run: ancilla_count beyond 12");
  if (!(cfg.gap > 0.0)) fail(ErrorCode::InvalidArgument, "collision_run: gap must be positive");
  if (!(cfg.beta >= 0.0)) fail(ErrorCode::InvalidArgument, "collision_run: beta must be >= 0");
  if (static_cast<int>(cfg.step_unitaries.size()) != n) {
    fail(ErrorCode::InvalidArgument, "collision_run: one unitary per ancilla required");
  }
  if (!cfg.weight) fail(ErrorCode::InvalidArgument, "collision_run: weight function missing");

  const std::size_t d_s = rho_s.dim();
  const std::size_t env_dim = std::size_t{1} << n;
  const std::size_t dim = d_s * env_dim;
  for (const UnitaryOperator& u : cfg.step_unitaries) {
    if (u.dim() != d_s * 2) {
      fail(ErrorCode::DimensionMismatch, "collision_run: step unitary must act on d_s*2");
    }
  }

  std::vector<double> weights(env_dim);
  for (std::size_t m = 0; m < env_dim; ++m) {
    weights[m] = cfg.weight(static_cast<std::uint32_t>(m));
    if (!(weights[m] >= 0.0)) {
      fail(ErrorCode::InvalidArgument, "collision_run: weight must be non-negative");
    }
  }
  if (weights[0] != 0.0) {
    fail(ErrorCode::InvalidArgument, "collision_run: weight of the all-zero string must be 0");
  }

  // thermal occupation of one ancilla
  const double p1 = std::exp(-cfg.beta * cfg.gap) / (1.0 + std::exp(-cfg.beta * cfg.gap));
  std::vector<double> env_pop(env_dim);
  for (std::size_t m = 0; m < env_dim; ++m) {
    const int excited = std::popcount(m);
    env_pop[m] = std::pow(p1, excited) * std::pow(1.0 - p1, n - excited);
  }

  // rho_s x gamma_A^(x n), then the collision sequence
  ComplexMatrix rho(dim, dim);
  for (std::size_t s = 0; s < d_s; ++s)
    for (std::size_t t = 0; t < d_s; ++t) {
      const Complex amp = rho_s.matrix()(s, t);
      if (amp == Complex(0.0)) continue;
      for (std::size_t m = 0; m < env_dim; ++m)
        rho(s * env_dim + m, t * env_dim + m) = amp * env_pop[m];
    }
  for (int j = 1; j <= n; ++j) {
    apply_step_unitary(rho, cfg.step_unitaries[j - 1].matrix(), d_s, n, j);
  }

  CollisionResult out;
  out.distribution.resize(env_dim);
  for (std::size_t m = 0; m < env_dim; ++m) {
    double p = 0.0;
    for (std::size_t s = 0; s < d_s; ++s) p += rho(s * env_dim + m, s * env_dim + m).real();
    out.distribution[m] = std::max(p, 0.0);
  }
  double mean = 0.0, second = 0.0;
  for (std::size_t m = 0; m < env_dim; ++m) {
    mean += weights[m] * out.distribution[m];
    second += weights[m] * weights[m] * out.distribution[m];
  }
  out.mean_g = mean;
  out.var_g = std::max(second - mean * mean, 0.0);

  BoundContext ctx;
  ctx.beta = cfg.beta;
  ctx.d_s = static_cast<int>(d_s);
  ctx.d_e = static_cast<int>(env_dim);
  ctx.delta_eps = static_cast<double>(n) * cfg.gap;
  ctx.lambda_min_s = rho_s.min_eigenvalue();
  ctx.lambda_min_e = std::pow(std::min(p1, 1.0 - p1), n);
  out.bound_rhs = fundamental_limit(ctx, PetrovParams{1.0, 2.0, 0.0}, BoundFamily::Phi);
  return out;
}

UnitaryOperator min_routing_permutation(const std::vector<double>& joint_diag, int d_s, int d_e) {
  const std::size_t dim = joint_diag.size();
  if (dim != static_cast<std::size_t>(d_s) * static_cast<std::size_t>(d_e)) {
    fail(ErrorCode::DimensionMismatch, "min_routing_permutation: diag length != d_s*d_e");
  }
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return joint_diag[a] < joint_diag[b]; });

  std::vector<std::size_t> targets;
  targets.reserve(dim);
  for (int s = 0; s < d_s; ++s) targets.push_back(static_cast<std::size_t>(s) * d_e);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    if (idx % d_e != 0 || idx / d_e >= static_cast<std::size_t>(d_s)) targets.push_back(idx);
  }

  std::vector<std::size_t> source_of(dim);
  for (std::size_t k = 0; k < dim; ++k) source_of[targets[k]] = order[k];
  return UnitaryOperator::permutation(source_of);
}

Observable two_level_marker(int d_e) {
  if (d_e < 2) fail(ErrorCode::InvalidArgument, "two_level_marker: need at least two levels");
  std::vector<double> diag(d_e, 1.0);
  diag[0] = 0.0;
  ComplexMatrix m(d_e, d_e);
  for (int i = 0; i < d_e; ++i) m(i, i) = diag[i];
  return Observable(HermitianMatrix(m));
}

SaturationScenario saturation_scenario(int d_s, int d_e) {
  if (d_s < 1 || d_e < 2 || d_s > d_e) {
    fail(ErrorCode::InfeasibleSaturation, "saturation_scenario: requires 1 <= d_s <= d_e, d_e >= 2");
  }
  DensityOperator rho_s = DensityOperator::maximally_mixed(d_s);
  DensityOperator gamma_e = DensityOperator::maximally_mixed(d_e);
  std::vector<double> levels(d_e);
  std::iota(levels.begin(), levels.end(), 0.0);
  Hamiltonian h_e = Hamiltonian::from_diagonal(levels);

  std::vector<double> joint(static_cast<std::size_t>(d_s) * d_e,
                            1.0 / static_cast<double>(d_s * d_e));
  UnitaryOperator u = min_routing_permutation(joint, d_s, d_e);
  Observable g = two_level_marker(d_e);
  return {std::move(rho_s), std::move(gamma_e), std::move(h_e), std::move(u), std::move(g)};
}

MarkovChain::MarkovChain(std::size_t n_states) : n_(n_states), rates_(n_states * n_states, 0.0) {
  if (n_states < 2) fail(ErrorCode::InvalidArgument, "MarkovChain: need at least two states");
}

void MarkovChain::set_rate(std::size_t to, std::size_t from, double w) {
  if (to == from) fail(ErrorCode::InvalidArgument, "MarkovChain: diagonal is implied");
  if (!(w >= 0.0)) fail(ErrorCode::InvalidArgument, "MarkovChain: negative rate");
  rates_[to * n_ + from] = w;
  stationary_ = false;
}

void MarkovChain::set_distribution(std::vector<double> p, bool stationary) {
  if (p.size() != n_) fail(ErrorCode::DimensionMismatch, "MarkovChain: distribution length");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) fail(ErrorCode::InvalidArgument, "MarkovChain: negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    fail(ErrorCode::InvalidArgument, "MarkovChain: distribution does not sum to 1");
  }
  if (stationary) {
    for (std::size_t to = 0; to < n_; ++to) {
      double flow = 0.0;
      for (std::size_t from = 0; from < n_; ++from) {
        if (from == to) continue;
        flow += rate(to, from) * p[from] - rate(from, to) * p[to];
      }
      if (std::abs(flow) > 1e-10) {
        fail(ErrorCode::NotStationary, "MarkovChain: flagged distribution is not stationary");
      }
    }
  }
  dist_ = std::move(p);
  stationary_ = stationary;
}

void MarkovChain::solve_stationary() {
  // generator with implied diagonal, last row replaced by normalization
  std::vector<double> a(n_ * n_);
  std::vector<double> rhs(n_, 0.0);
  for (std::size_t to = 0; to < n_; ++to)
    for (std::size_t from = 0; from < n_; ++from) {
      if (to == from) {
        double colsum = 0.0;
        for (std::size_t k = 0; k < n_; ++k)
          if (k != from) colsum += rate(k, from);
        a[to * n_ + from] = -colsum;
      } else {
        a[to * n_ + from] = rate(to, from);
      }
    }
  for (std::size_t j = 0; j < n_; ++j) a[(n_ - 1) * n_ + j] = 1.0;
  rhs[n_ - 1] = 1.0;

  // Gaussian elimination with partial pivoting
  std::vector<std::size_t> perm(n_);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t col = 0; col < n_; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < n_; ++r)
      if (std::abs(a[perm[r] * n_ + col]) > std::abs(a[perm[best] * n_ + col])) best = r;
    std::swap(perm[col], perm[best]);
    const double pivot = a[perm[col] * n_ + col];
    if (std::abs(pivot) < 1e-12) {
      fail(ErrorCode::NotStationary, "solve_stationary: singular system (chain not irreducible)");
    }
    for (std::size_t r = col + 1; r < n_; ++r) {
      const double factor = a[perm[r] * n_ + col] / pivot;
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n_; ++c) a[perm[r] * n_ + c] -= factor * a[perm[col] * n_ + c];
      rhs[perm[r]] -= factor * rhs[perm[col]];
    }
  }
  std::vector<double> p(n_);
  for (std::size_t i = n_; i-- > 0;) {
    double acc = rhs[perm[i]];
    for (std::size_t c = i + 1; c < n_; ++c) acc -= a[perm[i] * n_ + c] * p[c];
    p[i] = acc / a[perm[i] * n_ + i];
  }

  double sum = 0.0;
  for (double& x : p) {
    if (x < -1e-10) {
      fail(ErrorCode::NotStationary, "solve_stationary: negative stationary component");
    }
    x = std::max(x, 0.0);
    sum += x;
  }
  for (double& x : p) x /= sum;

  // residual check W P = 0
  for (std::size_t to = 0; to < n_; ++to) {
    double flow = 0.0;
    for (std::size_t from = 0; from < n_; ++from) {
      if (from == to) continue;
      flow += rate(to, from) * p[from] - rate(from, to) * p[to];
    }
    if (std::abs(flow) > 1e-10) {
      fail(ErrorCode::NotStationary, "solve_stationary: residual exceeds 1e-10");
    }
  }
  dist_ = std::move(p);
  stationary_ = true;
}

double kappa_of_ratio(double r) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "kappa_of_ratio: ratio must be positive");
  return std::log(r) * (r - 1.0) / (r + 1.0);
}

MarkovReport markov_rates_report(const MarkovChain& chain) {
  if (!chain.stationary_flagged()) {
    fail(ErrorCode::NotStationary, "markov_rates_report: stationary distribution required");
  }
  const std::size_t n = chain.size();
  const std::vector<double>& p = chain.distribution();

  MarkovReport rep;
  double ratio_max = 1.0;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = m + 1; k < n; ++k) {
      const double up = chain.rate(k, m);   // m -> k
      const double down = chain.rate(m, k); // k -> m
      if (up == 0.0 && down == 0.0) continue;
      if (up == 0.0 || down == 0.0) {
        fail(ErrorCode::IrreversibleEdge, "markov_rates_report: one-way transition");
      }
      const double j_up = p[m] * up;
      const double j_down = p[k] * down;
      rep.activity_rate += j_up + j_down;
      if (j_up > 0.0 && j_down > 0.0) {
        rep.sigma_rate += (j_up - j_down) * std::log(j_up / j_down);
      }
      ratio_max = std::max({ratio_max, up / down, down / up});
    }
  }
  rep.ratio_cap = ratio_max;
  rep.kappa = kappa_of_ratio(ratio_max);
  const double cap = rep.kappa * rep.activity_rate;
  rep.bound_ok = rep.sigma_rate <= cap + 1e-9 * std::max(1.0, std::abs(cap));
  return rep;
}

MarkovChain random_reversible_chain(std::size_t n_states, Rng& rng) {
  MarkovChain chain(n_states);
  for (std::size_t to = 0; to < n_states; ++to)
    for (std::size_t from = 0; from < n_states; ++from)
      if (to != from) chain.set_rate(to, from, rng.uniform(0.1, 2.0));
  chain.solve_stationary();
  return chain;
}

} // namespace qtm
