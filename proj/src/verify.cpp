#include "nlwave/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlwave/experiments.hpp"

namespace nlwave {

namespace {

std::string metric(const char* label, Real value) {
  std::ostringstream out;
  out << label << " = " << value;
  return out.str();
}

CheckResult check_transform_roundtrip(const SpectralBasis& basis, Rng& rng) {
  Real worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vector c = rng.normal_vector(basis.total_modes());
    worst = std::max(worst, (to_modal(basis, to_physical(basis, c)) - c)
                                .cwiseAbs()
                                .maxCoeff());
  }
  return {"transform round-trip", worst < 1e-12, metric("max abs error", worst)};
}

CheckResult check_parseval(const SpectralBasis& basis, Rng& rng) {
  Real worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector c = rng.normal_vector(basis.total_modes());
    const Vector grid = to_physical(basis, c);
    const Real quad = quadrature_integral(basis, grid.cwiseAbs2());
    const Real norm2 = c.squaredNorm();
    worst = std::max(worst, std::abs(norm2 - quad) / (1.0 + norm2));
  }
  return {"Parseval identity", worst < 1e-10, metric("max rel error", worst)};
}

CheckResult check_poincare(const SpectralBasis& basis, Rng& rng) {
  const Real lambda1 = basis.lambda1();
  Real worst_margin = std::numeric_limits<Real>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector c = rng.normal_vector(basis.total_modes());
    const Real g2 = grad_norm(basis, c) * grad_norm(basis, c);
    const Real l2 = c.squaredNorm();
    worst_margin = std::min(worst_margin, g2 - lambda1 * l2);
  }
  // Equality is attained only on pure first-mode input.
  Vector pure = Vector::Zero(basis.total_modes());
  pure[0] = 2.0;
  const Real g2 = grad_norm(basis, pure) * grad_norm(basis, pure);
  const bool equality_ok =
      std::abs(g2 - lambda1 * pure.squaredNorm()) <= 1e-12 * g2;
  return {"Poincare inequality", worst_margin >= -1e-12 && equality_ok,
          metric("min margin", worst_margin)};
}

CheckResult check_monotonicity(Rng& rng) {
  Real min_lhs = std::numeric_limits<Real>::infinity();
  Real min_ratio = std::numeric_limits<Real>::infinity();
  for (Real q : {1.5, 2.5, 3.0, 4.0}) {
    for (int trial = 0; trial < 10000; ++trial) {
      const Index dim = trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 16 : 64);
      const Vector x = rng.normal_vector(dim);
      const Vector y = rng.normal_vector(dim);
      const auto report = monotonicity_check(x, y, q);
      min_lhs = std::min(min_lhs, report.lhs);
      min_ratio = std::min(min_ratio, report.empirical_ratio);
    }
  }
  return {"monotonicity inequality", min_lhs >= -1e-12 && min_ratio > 0.0,
          metric("min ratio", min_ratio)};
}

CheckResult check_radial_solve(Rng& rng) {
  Real worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Real c = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const Real r = std::pow(10.0, rng.uniform(-3.0, 2.0));
    const Real rho = radial_damping_solve(r, c, 1.0, 1e-15, 200);
    const Real exact = 2.0 * r / (1.0 + std::sqrt(1.0 + 4.0 * c * r));
    worst = std::max(worst, std::abs(rho - exact) / (1.0 + exact));
  }
  const Real rho_exact = radial_damping_solve(2.0, 1.0, 2.0, 1e-15, 200);
  const bool point_ok = std::abs(rho_exact - 1.0) < 1e-13;
  return {"radial solve oracle", worst < 1e-12 && point_ok,
          metric("max p=1 deviation", worst)};
}

CheckResult check_kernel_bound(const SpectralBasis& basis,
                               const PhysicsConfig& config, Rng& rng) {
  Real worst = -std::numeric_limits<Real>::infinity();
  for (int trial = 0; trial < 2000; ++trial) {
    const Vector v = rng.normal_vector(basis.total_modes());
    const Real lhs = antidamping(config, basis, v).norm();
    worst = std::max(worst, lhs - config.kernel.hs_norm * v.norm());
  }
  return {"anti-damping bound", worst <= 1e-10, metric("max excess", worst)};
}

CheckResult check_accretivity(const SpectralBasis& basis,
                              const PhysicsConfig& config, Rng& rng) {
  Real min_gap = std::numeric_limits<Real>::infinity();
  for (int trial = 0; trial < 2000; ++trial) {
    State s1 = State::zero(basis);
    State s2 = State::zero(basis);
    s1.a = rng.normal_vector(basis.total_modes());
    s1.b = rng.normal_vector(basis.total_modes());
    s2.a = rng.normal_vector(basis.total_modes());
    s2.b = rng.normal_vector(basis.total_modes());
    const Real scale = s1.a.norm() + s1.b.norm() + s2.a.norm() + s2.b.norm();
    min_gap = std::min(min_gap,
                       accretivity_gap(basis, config, s1, s2) / (scale * scale));
  }
  return {"discrete accretivity", min_gap >= -1e-12,
          metric("min normalized gap", min_gap)};
}

CheckResult check_energy_identity(const SpectralBasis& basis,
                                  const PhysicsConfig& config, Rng& rng) {
  State init = random_h1_state(basis, 1.0, rng);
  std::vector<Real> residuals;
  for (Real dt : {1e-2, 5e-3, 2.5e-3}) {
    StepConfig sc;
    sc.dt = dt;
    const Trajectory traj = integrate(basis, config, init, 1.0, sc);
    Real max_resid = 0.0;
    for (const auto& rec : traj.records) max_resid = std::max(max_resid, rec.resid);
    residuals.push_back(max_resid);
  }
  const Real order1 = std::log2(residuals[0] / residuals[1]);
  const Real order2 = std::log2(residuals[1] / residuals[2]);
  const Real order = 0.5 * (order1 + order2);
  return {"energy identity refinement", order > 1.7 && order < 2.3,
          metric("measured order", order)};
}

CheckResult check_assumptions(const SpectralBasis& basis,
                              const PhysicsConfig& config) {
  const AssumptionReport report = validate_assumptions(config, basis, 10.0, 4001);
  std::ostringstream detail;
  detail << "M = " << report.growth_constant << ", mu = " << report.mu_estimate;
  return {"assumption validation", report.dissipativity_pass, detail.str()};
}

}  // namespace

std::vector<CheckResult> run_verification(const LoadedConfig& config,
                                          std::uint64_t seed) {
  Rng rng(seed ^ 0x6e6c7761766500ULL);
  std::vector<CheckResult> results;
  results.push_back(check_transform_roundtrip(config.basis, rng));
  results.push_back(check_parseval(config.basis, rng));
  results.push_back(check_poincare(config.basis, rng));
  results.push_back(check_monotonicity(rng));
  results.push_back(check_radial_solve(rng));
  results.push_back(check_kernel_bound(config.basis, config.physics, rng));
  results.push_back(check_accretivity(config.basis, config.physics, rng));
  results.push_back(check_energy_identity(config.basis, config.physics, rng));
  results.push_back(check_assumptions(config.basis, config.physics));
  return results;
}

}  // namespace nlwave
