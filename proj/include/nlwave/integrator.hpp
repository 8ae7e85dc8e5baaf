#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlwave/energy.hpp"
#include "nlwave/model.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

struct StepConfig {
  Real dt = 1e-2;
  std::string scheme = "strang";
  Real radial_tol = 1e-13;
  int radial_max_iter = 200;

  void validate() const;
};

/// Unique root rho >= 0 of rho (1 + c rho^p) = r_norm, the scalar core of the
/// implicit damping solve (the vector equation v + c|v|^p v = r forces v
/// parallel to r). Safeguarded Newton inside [0, r_norm] with bisection
/// fallback; converges for any c >= 0, p > 0 by strict monotonicity.
/// Throws std::runtime_error with the final bracket if max_iter is exhausted.
Real radial_damping_solve(Real r_norm, Real c, Real p, Real tol = 1e-13,
                          int max_iter = 200);

/// Exact solution of the implicit damping step v + k tau |v|^p v = b.
/// Never increases the norm.
Vector damping_substep(const SpectralBasis& basis, const PhysicsConfig& config,
                       const VectorRef& b, Real tau);

/// One Strang step of
///   a' = b,   b' = -lambda a - k|b|^p b - f(a) + Psi(b) + h
/// composed as source(dt/2) damping(dt/2) wave(dt) damping(dt/2) source(dt/2).
/// Each substep applies its own exact flow: the source substep has constant
/// position, so b' = Psi(b) + const is linear with constant coefficients and
/// is propagated by the precomputed pair Phi = exp(tau K),
/// Gamma = int_0^tau exp(s K) ds; the damping substep applies the closed-form
/// radial decay of b' = -k|b|^p b; the wave substep is a per-mode rotation by
/// sqrt(lambda) dt. A palindromic composition of exact flows, hence second
/// order, and the damping and wave parts never amplify.
class StrangStepper {
 public:
  StrangStepper(const SpectralBasis& basis, const PhysicsConfig& config,
                const StepConfig& step_config);

  State step(const State& state) const;

  const StepConfig& step_config() const { return config_; }
  /// Set when dt * hs_norm >= 1; the propagators stay exact but the
  /// configuration is outside the intended operating regime.
  const std::optional<std::string>& warning() const { return warning_; }

 private:
  const SpectralBasis& basis_;
  const PhysicsConfig& physics_;
  StepConfig config_;
  Vector cos_theta_, sin_theta_, sqrt_lambda_;  // wave rotation tables
  Matrix phi_, gamma_;                          // kernel propagators (empty if K = 0)
  bool kernel_zero_ = true;
  std::optional<std::string> warning_;

  void source_kick(Vector& b, const Vector& a, Real tau) const;
};

/// Single-call convenience form of the stepper.
State step(const SpectralBasis& basis, const PhysicsConfig& config,
           const State& state, const StepConfig& step_config);

/// Per-sample diagnostics row. `resid` is the largest per-step energy
/// identity residual since the previous record (0 on the first row).
struct ObservationRecord {
  Real t = 0.0;
  Real e_total = 0.0, e_kin = 0.0, e_el = 0.0, e_pot = 0.0, e_force = 0.0;
  Real l2_u = 0.0, l2_v = 0.0, h1_u = 0.0;
  Real v_eps = 0.0;
  Real resid = 0.0;
  Real tail_frac = 0.0;
};

struct ObserverConfig {
  Index record_stride = 1;    // steps between records
  Index snapshot_stride = 0;  // steps between stored states; 0 = none
  std::optional<Real> eps;    // V_eps parameter; default eps0(mu0)/2
  Index tail_cutoff = -1;     // default: total_modes / 2
};

struct Trajectory {
  std::vector<ObservationRecord> records;
  std::vector<State> snapshots;  // includes the initial state when enabled
  State final_state;
  std::vector<std::string> warnings;
  bool aborted = false;
  std::string diagnostic;
};

/// Integrates from state0 to time T = n_steps * dt (n_steps = round(T/dt)).
/// Deterministic given its inputs. A numerical failure (non-finite state or a
/// failed substep solve) stops the run and returns the partial trajectory
/// with `aborted` set.
Trajectory integrate(const SpectralBasis& basis, const PhysicsConfig& config,
                     const State& state0, Real T, const StepConfig& step_config,
                     const ObserverConfig& observers = {});

/// Stationary resolvent data (I + A)(u, v) = (f0, f1).
struct ResolventProblem {
  Vector f0;
  Vector f1;
};

struct ResolventSolution {
  Vector u;
  Vector v;
  Real sigma = 0.0;           // |v|
  Real residual_state = 0.0;  // H1 residual of -v + u = f0 (round-off only)
  Real residual_force = 0.0;  // L2 residual of -Lap u + k|v|^p v + v = f1
  int iterations = 0;
};

/// Solves the resolvent system by eliminating u: the velocity equation
/// (lambda_j + 1 + k sigma^p) v_j = f1_j - lambda_j f0_j closes over the
/// single scalar sigma = |v|, which is the unique fixed point of a strictly
/// decreasing map and is found by bracketed bisection. `sigma_upper_hint`
/// only changes the initial bracket; any bracket containing the root yields
/// the same sigma (uniqueness from monotonicity).
ResolventSolution resolvent_solve(const SpectralBasis& basis,
                                  const PhysicsConfig& config,
                                  const ResolventProblem& problem,
                                  Real tol = 1e-12,
                                  std::optional<Real> sigma_upper_hint = {});

/// Discrete accretivity form (A(U1) - A(U2), U1 - U2) in H1_0 x L2 for
/// A(u, v) = (-v, -Lap u + k|v|^p v); nonnegative by monotonicity.
Real accretivity_gap(const SpectralBasis& basis, const PhysicsConfig& config,
                     const State& state1, const State& state2);

}  // namespace nlwave
