#include "nlwave/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlwave {

void StepConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("StepConfig: dt must be > 0");
  if (scheme != "strang")
    throw std::invalid_argument("StepConfig: unknown scheme '" + scheme + "'");
  if (!(radial_tol > 0.0))
    throw std::invalid_argument("StepConfig: radial_tol must be > 0");
  if (radial_max_iter < 1)
    throw std::invalid_argument("StepConfig: radial_max_iter must be >= 1");
}

Real radial_damping_solve(Real r_norm, Real c, Real p, Real tol, int max_iter) {
  if (!(r_norm >= 0.0) || !(c >= 0.0) || !(p > 0.0))
    throw std::invalid_argument("radial_damping_solve: need r >= 0, c >= 0, p > 0");
  if (r_norm == 0.0) return 0.0;
  if (c == 0.0) return r_norm;

  auto value = [&](Real rho) { return rho * (1.0 + c * std::pow(rho, p)); };

  // phi is strictly increasing with phi(0) = 0 and phi(r) >= r, so the root
  // lies in [r/(1 + c r^p), r].
  Real lo = r_norm / (1.0 + c * std::pow(r_norm, p));
  Real hi = r_norm;
  Real rho = lo;
  const Real target = tol * (1.0 + r_norm);

  for (int iter = 0; iter < max_iter; ++iter) {
    const Real err = value(rho) - r_norm;
    if (std::abs(err) <= target) return rho;
    if (err > 0.0)
      hi = rho;
    else
      lo = rho;
    const Real slope = 1.0 + c * (p + 1.0) * std::pow(rho, p);
    Real next = rho - err / slope;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    rho = next;
  }
  std::ostringstream msg;
  msg << "radial_damping_solve: no convergence after " << max_iter
      << " iterations; bracket [" << lo << ", " << hi << "], r=" << r_norm
      << ", c=" << c << ", p=" << p;
  throw std::runtime_error(msg.str());
}

Vector damping_substep(const SpectralBasis& basis, const PhysicsConfig& config,
                       const VectorRef& b, Real tau) {
  if (!(tau >= 0.0))
    throw std::invalid_argument("damping_substep: tau must be >= 0");
  const Real r = l2_norm(basis, b);
  const Real c = config.k * tau;
  if (r == 0.0 || c == 0.0) return b;
  const Real rho = radial_damping_solve(r, c, config.p);
  return (rho / r) * b;
}

namespace {

// Exact flow of b' = -k |b|^p b over tau. The field is radial, so the
// direction is constant and the norm obeys rho' = -k rho^(p+1) with closed
// form rho(tau) = rho0 (1 + p k tau rho0^p)^(-1/p).
Vector damping_flow(const VectorRef& b, Real k, Real p, Real tau) {
  const Real r = b.norm();
  if (r == 0.0 || k == 0.0 || tau == 0.0) return b;
  const Real growth = p * k * tau * std::pow(r, p);
  const Real scale = std::exp(-std::log1p(growth) / p);
  return scale * b;
}

// Phi = exp(A) and Gamma0 = int_0^1 exp(sA) ds by scaling and squaring with a
// Taylor core; the caller rescales Gamma0 by the physical step length.
void propagator_pair(const Matrix& A, Matrix& phi, Matrix& gamma0) {
  const Index n = A.rows();
  int squarings = 0;
  Real norm = A.norm();
  while (norm > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  const Matrix B = A / std::ldexp(1.0, squarings);

  Matrix term = Matrix::Identity(n, n);
  phi = term;
  gamma0 = term;  // coefficients 1/(j+1)! accumulate below
  Real factorial = 1.0;
  Matrix power = term;
  for (int j = 1; j <= 13; ++j) {
    power = power * B;
    factorial *= static_cast<Real>(j);
    phi += power / factorial;
    gamma0 += power / (factorial * static_cast<Real>(j + 1));
  }
  gamma0 /= std::ldexp(1.0, squarings);
  for (int s = 0; s < squarings; ++s) {
    gamma0 = gamma0 + phi * gamma0;
    phi = phi * phi;
  }
}

}  // namespace

StrangStepper::StrangStepper(const SpectralBasis& basis,
                             const PhysicsConfig& config,
                             const StepConfig& step_config)
    : basis_(basis), physics_(config), config_(step_config) {
  config_.validate();
  config.validate(basis);

  const Index n = basis.total_modes();
  sqrt_lambda_ = basis.eigenvalues.cwiseSqrt();
  cos_theta_.resize(n);
  sin_theta_.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Real theta = sqrt_lambda_[j] * config_.dt;
    cos_theta_[j] = std::cos(theta);
    sin_theta_[j] = std::sin(theta);
  }

  kernel_zero_ = config.kernel.hs_norm == 0.0;
  if (!kernel_zero_) {
    const Real tau = 0.5 * config_.dt;
    propagator_pair(tau * config.kernel.modal_matrix, phi_, gamma_);
    gamma_ *= tau;
    if (config_.dt * config.kernel.hs_norm >= 1.0) {
      std::ostringstream msg;
      msg << "dt * hs_norm = " << config_.dt * config.kernel.hs_norm
          << " >= 1: anti-damping is under-resolved at this step size";
      warning_ = msg.str();
    }
  }
}

void StrangStepper::source_kick(Vector& b, const Vector& a, Real tau) const {
  Vector c = physics_.h;
  if (physics_.nonlinearity.kind != Nonlinearity::Kind::Zero)
    c -= nonlinearity_apply(physics_, basis_, a);
  if (kernel_zero_) {
    b += tau * c;
  } else {
    b = phi_ * b + gamma_ * c;
  }
}

State StrangStepper::step(const State& state) const {
  const Real dt = config_.dt;
  const Real tau = 0.5 * dt;
  State next = state;

  source_kick(next.b, next.a, tau);
  next.b = damping_flow(next.b, physics_.k, physics_.p, tau);

  for (Index j = 0; j < next.a.size(); ++j) {
    const Real alpha = next.a[j] * sqrt_lambda_[j];
    const Real aj = next.a[j] * cos_theta_[j] +
                    next.b[j] * sin_theta_[j] / sqrt_lambda_[j];
    next.b[j] = -alpha * sin_theta_[j] + next.b[j] * cos_theta_[j];
    next.a[j] = aj;
  }

  next.b = damping_flow(next.b, physics_.k, physics_.p, tau);
  source_kick(next.b, next.a, tau);

  next.time = state.time + dt;
  return next;
}

State step(const SpectralBasis& basis, const PhysicsConfig& config,
           const State& state, const StepConfig& step_config) {
  return StrangStepper(basis, config, step_config).step(state);
}

namespace {

ObservationRecord observe(const SpectralBasis& basis, const PhysicsConfig& config,
                          const State& state, Real eps, Index tail_cutoff,
                          Real resid) {
  ObservationRecord rec;
  rec.t = state.time;
  const EnergyBreakdown e = energy(basis, config, state);
  rec.e_total = e.total;
  rec.e_kin = e.kinetic;
  rec.e_el = e.elastic;
  rec.e_pot = e.potential;
  rec.e_force = e.forcing;
  rec.l2_u = l2_norm(basis, state.a);
  rec.l2_v = l2_norm(basis, state.b);
  rec.h1_u = grad_norm(basis, state.a);
  rec.v_eps = e.total + eps * state.b.dot(state.a);
  rec.resid = resid;
  rec.tail_frac = tail_energy_fraction(basis, state, tail_cutoff);
  return rec;
}

}  // namespace

Trajectory integrate(const SpectralBasis& basis, const PhysicsConfig& config,
                     const State& state0, Real T, const StepConfig& step_config,
                     const ObserverConfig& observers) {
  if (!(T >= 0.0)) throw std::invalid_argument("integrate: T must be >= 0");
  if (state0.a.size() != basis.total_modes() ||
      state0.b.size() != basis.total_modes())
    throw std::invalid_argument("integrate: state size mismatch");
  if (observers.record_stride < 1)
    throw std::invalid_argument("integrate: record_stride must be >= 1");

  const StrangStepper stepper(basis, config, step_config);

  Trajectory traj;
  if (stepper.warning()) traj.warnings.push_back(*stepper.warning());

  const Index tail_cutoff =
      observers.tail_cutoff >= 0 ? observers.tail_cutoff : basis.total_modes() / 2;
  const Real eps =
      observers.eps ? *observers.eps
                    : 0.5 * epsilon_ceiling(basis, default_mu0(basis, config));

  const long long n_steps = std::llround(T / step_config.dt);
  State current = state0;

  traj.records.push_back(observe(basis, config, current, eps, tail_cutoff, 0.0));
  if (observers.snapshot_stride > 0) traj.snapshots.push_back(current);

  Real resid_max = 0.0;
  for (long long n = 1; n <= n_steps; ++n) {
    State next;
    try {
      next = stepper.step(current);
    } catch (const std::runtime_error& err) {
      traj.aborted = true;
      traj.diagnostic = err.what();
      break;
    }
    if (!next.a.allFinite() || !next.b.allFinite()) {
      traj.aborted = true;
      std::ostringstream msg;
      msg << "non-finite state after step " << n << " (t = " << next.time << ")";
      traj.diagnostic = msg.str();
      break;
    }
    resid_max = std::max(resid_max, energy_identity_residual(
                                        basis, config, current, next,
                                        step_config.dt));
    current = next;

    const bool last = n == n_steps;
    if (n % observers.record_stride == 0 || last) {
      traj.records.push_back(
          observe(basis, config, current, eps, tail_cutoff, resid_max));
      resid_max = 0.0;
    }
    if (observers.snapshot_stride > 0 &&
        (n % observers.snapshot_stride == 0 || last))
      traj.snapshots.push_back(current);
  }
  traj.final_state = current;
  return traj;
}

ResolventSolution resolvent_solve(const SpectralBasis& basis,
                                  const PhysicsConfig& config,
                                  const ResolventProblem& problem, Real tol,
                                  std::optional<Real> sigma_upper_hint) {
  const Index n = basis.total_modes();
  if (problem.f0.size() != n || problem.f1.size() != n)
    throw std::invalid_argument("resolvent_solve: data size mismatch");
  if (!(config.k >= 0.0) || !(config.p > 0.0))
    throw std::invalid_argument("resolvent_solve: need k >= 0 and p > 0");

  const Vector g = problem.f1 - basis.eigenvalues.cwiseProduct(problem.f0);

  auto v_of_sigma = [&](Real sigma) -> Vector {
    const Real shift = 1.0 + config.k * std::pow(sigma, config.p);
    return g.array() / (basis.eigenvalues.array() + shift);
  };

  ResolventSolution sol;
  const Real norm0 = v_of_sigma(0.0).norm();
  if (config.k == 0.0 || norm0 == 0.0) {
    sol.sigma = norm0;
    sol.v = v_of_sigma(0.0);
  } else {
    // |v(sigma)| is strictly decreasing, so |v(sigma)| - sigma has exactly
    // one zero, inside [0, max(|v(0)|, hint)].
    Real lo = 0.0;
    Real hi = std::max(norm0, sigma_upper_hint.value_or(0.0));
    int iter = 0;
    while (hi - lo > 4.0 * std::numeric_limits<Real>::epsilon() * std::max(1.0, hi) &&
           iter < 200) {
      const Real mid = 0.5 * (lo + hi);
      if (v_of_sigma(mid).norm() > mid)
        lo = mid;
      else
        hi = mid;
      ++iter;
    }
    sol.iterations = iter;
    sol.sigma = 0.5 * (lo + hi);
    sol.v = v_of_sigma(sol.sigma);
  }

  sol.u = sol.v + problem.f0;
  sol.residual_state = grad_norm(basis, sol.u - sol.v - problem.f0);
  const Real actual = sol.v.norm();
  const Vector force_resid =
      basis.eigenvalues.cwiseProduct(sol.u) +
      (1.0 + config.k * std::pow(actual, config.p)) * sol.v - problem.f1;
  sol.residual_force = force_resid.norm();

  if (sol.residual_force > tol || sol.residual_state > tol) {
    std::ostringstream msg;
    msg << "resolvent_solve: residual " << sol.residual_force
        << " above tolerance " << tol;
    throw std::runtime_error(msg.str());
  }
  return sol;
}

Real accretivity_gap(const SpectralBasis& basis, const PhysicsConfig& config,
                     const State& state1, const State& state2) {
  const Vector da = state1.a - state2.a;
  const Vector db = state1.b - state2.b;
  // A(U) = (-v, lambda a + k|v|^p v) componentwise in modal coordinates.
  const Vector a_first = -db;
  const Vector a_second = basis.eigenvalues.cwiseProduct(da) +
                          damping(config, basis, state1.b) -
                          damping(config, basis, state2.b);
  return basis.eigenvalues.cwiseProduct(a_first).dot(da) + a_second.dot(db);
}

}  // namespace nlwave
