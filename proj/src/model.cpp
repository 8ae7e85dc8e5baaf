#include "nlwave/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlwave {

Kernel Kernel::zero(const SpectralBasis& basis) {
  Kernel k;
  k.modal_matrix = Matrix::Zero(basis.total_modes(), basis.total_modes());
  k.hs_norm = 0.0;
  return k;
}

Kernel Kernel::from_matrix(Matrix modal) {
  if (modal.rows() != modal.cols())
    throw std::invalid_argument("Kernel::from_matrix: matrix must be square");
  Kernel k;
  k.hs_norm = modal.norm();
  k.modal_matrix = std::move(modal);
  return k;
}

Kernel Kernel::separable(const SpectralBasis& basis,
                         const std::vector<SeparableTerm>& terms) {
  const Index n = basis.total_modes();
  Matrix K = Matrix::Zero(n, n);

  // Sample one pointwise factor on the quadrature grid.
  auto sample = [&](const std::function<Real(Real, Real)>& fn) {
    Vector vals(basis.grid_points());
    if (basis.dim == 1) {
      for (Index i = 0; i < basis.grid[0].size(); ++i)
        vals[i] = fn(basis.grid[0][i], 0.0);
    } else {
      const Index n1 = basis.grid[1].size();
      for (Index i0 = 0; i0 < basis.grid[0].size(); ++i0)
        for (Index i1 = 0; i1 < n1; ++i1)
          vals[i0 * n1 + i1] = fn(basis.grid[0][i0], basis.grid[1][i1]);
    }
    return vals;
  };

  for (const auto& term : terms) {
    if (!term.g || !term.h)
      throw std::invalid_argument("Kernel::separable: term factors must be set");
    const Vector ghat = to_modal(basis, sample(term.g));
    const Vector hhat = to_modal(basis, sample(term.h));
    K.noalias() += term.coeff * ghat * hhat.transpose();
  }
  return from_matrix(std::move(K));
}

Nonlinearity Nonlinearity::zero() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::odd_polynomial(std::vector<Real> coeffs, int N) {
  Nonlinearity nl;
  nl.kind = Kind::OddPolynomial;
  nl.odd_coeffs = std::move(coeffs);
  nl.growth_dimension = N;
  // liminf of f' at infinity: the top even power dominates.
  nl.mu = 0.0;
  for (std::size_t m = nl.odd_coeffs.size(); m-- > 0;) {
    if (nl.odd_coeffs[m] == 0.0) continue;
    if (m == 0)
      nl.mu = nl.odd_coeffs[0];
    else
      nl.mu = nl.odd_coeffs[m] > 0.0 ? std::numeric_limits<Real>::infinity()
                                     : -std::numeric_limits<Real>::infinity();
    break;
  }
  return nl;
}

Nonlinearity Nonlinearity::custom(std::function<Real(Real)> f,
                                  std::function<Real(Real)> F, int N, Real mu,
                                  std::function<Real(Real)> fprime) {
  if (!f || !F)
    throw std::invalid_argument("Nonlinearity::custom: both f and F are required");
  if (!(std::abs(F(0.0)) <= 1e-12))
    throw std::invalid_argument("Nonlinearity::custom: F must satisfy F(0) = 0");
  Nonlinearity nl;
  nl.kind = Kind::CustomPointwise;
  nl.custom_f = std::move(f);
  nl.custom_F = std::move(F);
  nl.custom_fprime = std::move(fprime);
  nl.growth_dimension = N;
  nl.mu = mu;
  return nl;
}

Real Nonlinearity::f(Real s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::OddPolynomial: {
      // Horner in s^2, then one factor of s.
      const Real s2 = s * s;
      Real acc = 0.0;
      for (std::size_t m = odd_coeffs.size(); m-- > 0;) acc = acc * s2 + odd_coeffs[m];
      return acc * s;
    }
    case Kind::CustomPointwise:
      return custom_f(s);
  }
  return 0.0;
}

Real Nonlinearity::F(Real s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::OddPolynomial: {
      const Real s2 = s * s;
      Real acc = 0.0;
      for (std::size_t m = odd_coeffs.size(); m-- > 0;)
        acc = acc * s2 + odd_coeffs[m] / static_cast<Real>(2 * m + 2);
      return acc * s2;
    }
    case Kind::CustomPointwise:
      return custom_F(s);
  }
  return 0.0;
}

Real Nonlinearity::fprime(Real s) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::OddPolynomial: {
      const Real s2 = s * s;
      Real acc = 0.0;
      for (std::size_t m = odd_coeffs.size(); m-- > 0;)
        acc = acc * s2 + static_cast<Real>(2 * m + 1) * odd_coeffs[m];
      return acc;
    }
    case Kind::CustomPointwise: {
      if (custom_fprime) return custom_fprime(s);
      const Real step = 1e-6 * (1.0 + std::abs(s));
      return (custom_f(s + step) - custom_f(s - step)) / (2.0 * step);
    }
  }
  return 0.0;
}

void PhysicsConfig::validate(const SpectralBasis& basis) const {
  // k = 0 is tolerated as a conservative control configuration; the
  // assumption audit flags it.
  if (!(k >= 0.0)) throw std::invalid_argument("PhysicsConfig: k must be >= 0");
  if (!(p > 0.0)) throw std::invalid_argument("PhysicsConfig: p must be > 0");
  const Index n = basis.total_modes();
  if (h.size() != n)
    throw std::invalid_argument("PhysicsConfig: forcing size mismatch");
  if (kernel.modal_matrix.rows() != n || kernel.modal_matrix.cols() != n)
    throw std::invalid_argument("PhysicsConfig: kernel size mismatch");
  if (nonlinearity.growth_dimension < 3)
    throw std::invalid_argument("PhysicsConfig: growth dimension N must be >= 3");
}

Vector damping(const PhysicsConfig& config, const SpectralBasis& basis,
               const VectorRef& b) {
  const Real norm = l2_norm(basis, b);
  if (norm == 0.0) return Vector::Zero(b.size());
  return (config.k * std::pow(norm, config.p)) * b;
}

Vector antidamping(const PhysicsConfig& config, const SpectralBasis& basis,
                   const VectorRef& b) {
  if (config.kernel.modal_matrix.cols() != b.size())
    throw std::invalid_argument("antidamping: dimension mismatch");
  (void)basis;
  return config.kernel.modal_matrix * b;
}

Vector nonlinearity_apply(const PhysicsConfig& config, const SpectralBasis& basis,
                          const VectorRef& a) {
  if (config.nonlinearity.kind == Nonlinearity::Kind::Zero)
    return Vector::Zero(a.size());
  Vector u = to_physical(basis, a);
  for (Index i = 0; i < u.size(); ++i) u[i] = config.nonlinearity.f(u[i]);
  return to_modal(basis, u);
}

Real potential_integral(const PhysicsConfig& config, const SpectralBasis& basis,
                        const VectorRef& a) {
  if (a.size() != basis.total_modes())
    throw std::invalid_argument("potential_integral: size mismatch");
  if (config.nonlinearity.kind == Nonlinearity::Kind::Zero) return 0.0;
  Vector u = to_physical(basis, a);
  for (Index i = 0; i < u.size(); ++i) u[i] = config.nonlinearity.F(u[i]);
  return quadrature_integral(basis, u);
}

AssumptionReport validate_assumptions(const PhysicsConfig& config,
                                      const SpectralBasis& basis,
                                      Real sample_half_range, Index sample_count) {
  if (!(sample_half_range > 0.0) || sample_count < 2)
    throw std::invalid_argument(
        "validate_assumptions: need positive range and >= 2 samples");

  AssumptionReport report;
  report.lambda1 = basis.lambda1();
  const int N = config.nonlinearity.growth_dimension;
  report.growth_exponent = 2.0 / static_cast<Real>(N - 2);

  Real max_ratio = 0.0;
  Real outer_min = std::numeric_limits<Real>::infinity();
  const Real S = sample_half_range;
  for (Index i = 0; i < sample_count; ++i) {
    const Real s =
        -S + 2.0 * S * static_cast<Real>(i) / static_cast<Real>(sample_count - 1);
    const Real fp = config.nonlinearity.fprime(s);
    const Real bound = std::pow(std::abs(s), report.growth_exponent) + 1.0;
    max_ratio = std::max(max_ratio, std::abs(fp) / bound);
    if (std::abs(s) >= 0.5 * S) outer_min = std::min(outer_min, fp);
  }
  report.growth_constant = max_ratio;
  report.mu_estimate = outer_min;
  report.dissipativity_pass = outer_min > -report.lambda1;
  if (!report.dissipativity_pass)
    report.warnings.push_back(
        "dissipativity condition violated: sampled liminf f' <= -lambda1");
  if (config.k == 0.0)
    report.warnings.push_back("k = 0 violates the damping positivity assumption");
  if (std::isfinite(config.nonlinearity.mu) &&
      config.nonlinearity.mu <= -report.lambda1)
    report.warnings.push_back("claimed mu <= -lambda1");
  return report;
}

}  // namespace nlwave
