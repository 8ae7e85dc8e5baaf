#include "nlwave/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace nlwave {

EnergyBreakdown energy(const SpectralBasis& basis, const PhysicsConfig& config,
                       const State& state) {
  EnergyBreakdown e;
  const Real vn = l2_norm(basis, state.b);
  const Real gn = grad_norm(basis, state.a);
  e.kinetic = 0.5 * vn * vn;
  e.elastic = 0.5 * gn * gn;
  e.potential = potential_integral(config, basis, state.a);
  e.forcing = -config.h.dot(state.a);
  e.total = e.kinetic + e.elastic + e.potential + e.forcing;
  return e;
}

Real lyapunov(const SpectralBasis& basis, const PhysicsConfig& config,
              const State& state, Real eps) {
  return energy(basis, config, state).total + eps * state.b.dot(state.a);
}

Real epsilon_ceiling(const SpectralBasis& basis, Real mu0) {
  const Real lambda1 = basis.lambda1();
  if (!(mu0 > 0.0) || !(mu0 < lambda1))
    throw std::invalid_argument("epsilon_ceiling: mu0 must lie in (0, lambda1)");
  return 0.125 * (1.0 - mu0 / lambda1) * std::sqrt(lambda1);
}

Real default_mu0(const SpectralBasis& basis, const PhysicsConfig& config) {
  const Real lambda1 = basis.lambda1();
  const Real lo = std::max(0.0, -config.nonlinearity.mu);
  if (lo >= lambda1) return 0.5 * lambda1;
  return 0.5 * (lo + lambda1);
}

Real energy_identity_residual(const SpectralBasis& basis,
                              const PhysicsConfig& config, const State& before,
                              const State& after, Real dt) {
  if (!(dt > 0.0))
    throw std::invalid_argument("energy_identity_residual: dt must be > 0");
  auto rate = [&](const State& s) {
    const Real vn = l2_norm(basis, s.b);
    const Real dissipation = -config.k * std::pow(vn, config.p + 2.0);
    const Real injection = s.b.dot(config.kernel.modal_matrix * s.b);
    return dissipation + injection;
  };
  const Real de =
      (energy(basis, config, after).total - energy(basis, config, before).total) / dt;
  return std::abs(de - 0.5 * (rate(before) + rate(after)));
}

MonotonicityReport monotonicity_check(const VectorRef& x, const VectorRef& y,
                                      Real q) {
  if (!(q > 1.0)) throw std::invalid_argument("monotonicity_check: q must be > 1");
  const Real xn = x.norm();
  const Real yn = y.norm();
  if (xn == 0.0 && yn == 0.0)
    throw std::invalid_argument("monotonicity_check: (x, y) must not both vanish");

  MonotonicityReport report;
  report.exponent = q;
  report.branch_q_ge_2 = q >= 2.0;

  const Vector diff = x - y;
  const Real dn = diff.norm();
  report.lhs =
      (std::pow(xn, q - 2.0) * x - std::pow(yn, q - 2.0) * y).dot(diff);

  const Real scale = std::pow(xn + yn, q);
  report.pass = report.lhs >= -1e-14 * scale;

  if (dn == 0.0) {
    report.empirical_ratio = 0.0;
    return report;
  }
  const Real denom = report.branch_q_ge_2
                         ? std::pow(dn, q)
                         : dn * dn / std::pow(xn + yn, 2.0 - q);
  report.empirical_ratio = report.lhs / denom;
  return report;
}

Real pair_energy(const SpectralBasis& basis, const State& state_a,
                 const State& state_b) {
  if (state_a.a.size() != state_b.a.size() || state_a.b.size() != state_b.b.size())
    throw std::invalid_argument("pair_energy: basis mismatch");
  const Real g = grad_norm(basis, state_a.a - state_b.a);
  const Real v = (state_a.b - state_b.b).norm();
  return 0.5 * (g * g + v * v);
}

Real tail_energy_fraction(const SpectralBasis& basis, const State& state,
                          Index cutoff_index) {
  const Index n = basis.total_modes();
  if (cutoff_index < 0 || cutoff_index >= n)
    throw std::invalid_argument("tail_energy_fraction: cutoff out of range");
  Real total = 0.0;
  Real tail = 0.0;
  for (Index j = 0; j < n; ++j) {
    const Real ej = 0.5 * (basis.eigenvalues[j] * state.a[j] * state.a[j] +
                           state.b[j] * state.b[j]);
    total += ej;
    if (j >= cutoff_index) tail += ej;
  }
  return total == 0.0 ? 0.0 : tail / total;
}

}  // namespace nlwave
