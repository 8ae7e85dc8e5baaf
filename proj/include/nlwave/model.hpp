#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlwave/basis.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

/// Phase point: modal coefficients of position u and velocity u_t.
struct State {
  Vector a;  // u
  Vector b;  // u_t
  Real time = 0.0;

  static State zero(const SpectralBasis& basis) {
    State s;
    s.a = Vector::Zero(basis.total_modes());
    s.b = Vector::Zero(basis.total_modes());
    return s;
  }
};

/// Integral velocity operator v -> int K(x,y) v(y) dy, held as its matrix in
/// the eigenbasis. The Hilbert-Schmidt norm equals the Frobenius norm of that
/// matrix and bounds the operator: |Kv| <= hs_norm |v|.
struct Kernel {
  Matrix modal_matrix;
  Real hs_norm = 0.0;

  static Kernel zero(const SpectralBasis& basis);
  static Kernel from_matrix(Matrix modal);

  /// One separable factor pair of K(x,y) = sum_i c_i g_i(x) h_i(y); g and h
  /// are pointwise functions on the domain (arguments: the coordinates of one
  /// point).
  struct SeparableTerm {
    Real coeff = 1.0;
    std::function<Real(Real, Real)> g;  // second argument unused in 1D
    std::function<Real(Real, Real)> h;
  };
  static Kernel separable(const SpectralBasis& basis,
                          const std::vector<SeparableTerm>& terms);
};

/// Source term f with primitive F(s) = int_0^s f, plus the bookkeeping used
/// by assumption validation: growth dimension N (exponent 2/(N-2)) and the
/// claimed liminf of f' at infinity.
struct Nonlinearity {
  enum class Kind { Zero, OddPolynomial, CustomPointwise };

  Kind kind = Kind::Zero;
  std::vector<Real> odd_coeffs;  // f(s) = sum_m odd_coeffs[m] s^(2m+1)
  std::function<Real(Real)> custom_f;
  std::function<Real(Real)> custom_F;
  std::function<Real(Real)> custom_fprime;  // optional; else central difference
  int growth_dimension = 3;                  // N >= 3
  Real mu = 0.0;                             // claimed liminf f'

  static Nonlinearity zero();
  static Nonlinearity odd_polynomial(std::vector<Real> coeffs, int N = 3);
  static Nonlinearity custom(std::function<Real(Real)> f,
                             std::function<Real(Real)> F, int N = 3,
                             Real mu = 0.0,
                             std::function<Real(Real)> fprime = nullptr);

  Real f(Real s) const;
  Real F(Real s) const;
  Real fprime(Real s) const;
};

/// Everything on the right-hand side of the wave equation
///   u_tt - Lap u + k |u_t|^p u_t + f(u) = Psi(u_t) + h.
struct PhysicsConfig {
  Real k = 1.0;  // damping gain; > 0 assumed, = 0 allowed as a control
  Real p = 2.0;  // damping exponent, > 0
  Kernel kernel;
  Vector h;  // modal coefficients of the forcing
  Nonlinearity nonlinearity;

  /// Throws std::invalid_argument unless k >= 0, p > 0 and sizes match.
  void validate(const SpectralBasis& basis) const;
};

/// Nonlocal damping term k |b| ^p b (modal). Radial: a nonnegative multiple
/// of b.
Vector damping(const PhysicsConfig& config, const SpectralBasis& basis,
               const VectorRef& b);

/// Anti-damping term Psi(b) = modal_matrix * b.
Vector antidamping(const PhysicsConfig& config, const SpectralBasis& basis,
                   const VectorRef& b);

/// Modal coefficients of f(u), evaluated pseudo-spectrally on the de-aliased
/// grid.
Vector nonlinearity_apply(const PhysicsConfig& config, const SpectralBasis& basis,
                          const VectorRef& a);

/// int_Omega F(u) dx by quadrature.
Real potential_integral(const PhysicsConfig& config, const SpectralBasis& basis,
                        const VectorRef& a);

/// Sampled audit of the growth bound |f'(s)| <= M (|s|^(2/(N-2)) + 1) and the
/// dissipativity condition liminf f' > -lambda1. Warns, never throws.
struct AssumptionReport {
  Real growth_constant = 0.0;   // smallest M valid on the samples
  Real growth_exponent = 0.0;   // 2/(N-2)
  Real mu_estimate = 0.0;       // min f' on the outer half of the range
  Real lambda1 = 0.0;
  bool dissipativity_pass = true;
  std::vector<std::string> warnings;
};

AssumptionReport validate_assumptions(const PhysicsConfig& config,
                                      const SpectralBasis& basis,
                                      Real sample_half_range, Index sample_count);

}  // namespace nlwave
