#pragma once

#include "nlwave/model.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

/// E(u, u_t) = 1/2 (|u_t|^2 + |grad u|^2) + int F(u) - int h u, by parts.
struct EnergyBreakdown {
  Real kinetic = 0.0;
  Real elastic = 0.0;
  Real potential = 0.0;
  Real forcing = 0.0;
  Real total = 0.0;
};

EnergyBreakdown energy(const SpectralBasis& basis, const PhysicsConfig& config,
                       const State& state);

/// Perturbed functional V_eps = E + eps (u_t, u).
Real lyapunov(const SpectralBasis& basis, const PhysicsConfig& config,
              const State& state, Real eps);

/// Largest eps for which |eps (u_t, u)| <= (1/16)(1 - mu0/lambda1)
/// (|u_t|^2 + |grad u|^2) holds for every state; closed form
/// eps0 = (1/8)(1 - mu0/lambda1) sqrt(lambda1). Requires 0 < mu0 < lambda1.
Real epsilon_ceiling(const SpectralBasis& basis, Real mu0);

/// Default mu0: midpoint of (max(0, -mu), lambda1), per the dissipativity
/// estimate's admissible range. Falls back to lambda1/2 when the claimed mu
/// leaves the range empty.
Real default_mu0(const SpectralBasis& basis, const PhysicsConfig& config);

/// Audit of dE/dt = -k |u_t|^(p+2) + (Psi(u_t), u_t) between two states one
/// step apart: |Delta E / dt - trapezoidal average of the right side|. The
/// trapezoidal average matches the integrator's order, so the residual
/// isolates scheme error.
Real energy_identity_residual(const SpectralBasis& basis,
                              const PhysicsConfig& config, const State& before,
                              const State& after, Real dt);

/// One evaluation of the monotonicity inequality
///   (|x|^(q-2) x - |y|^(q-2) y, x - y) >= C_q * denom(q, x, y)
/// with denom = |x-y|^q for q >= 2 and |x-y|^2 / (|x|+|y|)^(2-q) for
/// 1 < q < 2. The empirical ratio lhs/denom lower-bounds nothing by itself;
/// its infimum over samples estimates C_q.
struct MonotonicityReport {
  Real exponent = 0.0;  // q
  Real lhs = 0.0;
  bool branch_q_ge_2 = true;
  Real empirical_ratio = 0.0;
  bool pass = false;  // lhs >= -1e-14 * scale
};

MonotonicityReport monotonicity_check(const VectorRef& x, const VectorRef& y,
                                      Real q);

/// E^{n,m} = 1/2 [ |grad(u_A - u_B)|^2 + |u_tA - u_tB|^2 ].
Real pair_energy(const SpectralBasis& basis, const State& state_a,
                 const State& state_b);

/// Share of the per-mode energy 1/2 (lambda_j a_j^2 + b_j^2) carried by modes
/// with (zero-based) storage index >= cutoff. Zero state -> 0.
Real tail_energy_fraction(const SpectralBasis& basis, const State& state,
                          Index cutoff_index);

}  // namespace nlwave
