#pragma once

#include <array>
#include <vector>

#include "nlwave/types.hpp"

namespace nlwave {

/// Dirichlet sine eigenbasis of -Laplace on an interval (0,L1) or a rectangle
/// (0,L1)x(0,L2).
///
/// Modal coefficients are taken with respect to the L2-orthonormal
/// eigenfunctions
///
///   1D:  e_k(x)      = sqrt(2/L) sin(k pi x / L),            k = 1..M
///   2D:  e_{k1,k2}   = e_{k1}(x1) e_{k2}(x2),                lexicographic
///
/// so Parseval holds without weights: |u|^2 = sum a_j^2 and
/// |grad u|^2 = sum lambda_j a_j^2.
///
/// The quadrature grid is the interior of the uniform sine-transform grid
/// with 2M points per axis. Discrete orthogonality of the sine samples makes
/// the transform pair mutually inverse to round-off, and 2M points leave the
/// retained modes of a pointwise cubic free of aliasing.
struct SpectralBasis {
  int dim = 1;                      // 1 or 2
  Index modes_per_axis = 0;         // M
  std::array<Real, 2> lengths{};    // L1[, L2]
  Vector eigenvalues;               // lambda_j, lexicographic in (k1[,k2])
  std::array<Vector, 2> grid;       // interior nodes per axis
  std::array<Matrix, 2> eval;       // eval[d](i,k) = e_{k+1}(x_i) on axis d
  std::array<Real, 2> quad_weight;  // L_d / (n_d + 1) per axis

  Index total_modes() const {
    return dim == 1 ? modes_per_axis : modes_per_axis * modes_per_axis;
  }
  Index grid_points() const {
    const Index n0 = grid[0].size();
    return dim == 1 ? n0 : n0 * grid[1].size();
  }
  /// First Dirichlet eigenvalue (pi/L1)^2 [+ (pi/L2)^2 in 2D].
  Real lambda1() const { return eigenvalues.minCoeff(); }
};

/// Builds the basis. Throws std::invalid_argument on non-positive lengths,
/// modes_per_axis < 1 or dim outside {1,2}.
SpectralBasis build_basis(int dim, Index modes_per_axis,
                          const std::vector<Real>& lengths);

/// Modal coefficients -> values on the quadrature grid (flattened row-major
/// in 2D, axis-0 slow). Throws std::invalid_argument on size mismatch.
Vector to_physical(const SpectralBasis& basis, const VectorRef& modal);

/// Grid values -> modal coefficients of the retained modes. Left inverse of
/// to_physical to round-off.
Vector to_modal(const SpectralBasis& basis, const VectorRef& grid_values);

/// Quadrature of a grid field over the domain. Exact for band-limited
/// integrands vanishing on the boundary.
Real quadrature_integral(const SpectralBasis& basis, const VectorRef& grid_values);

/// L2 norm via Parseval: sqrt(sum a_j^2).
Real l2_norm(const SpectralBasis& basis, const VectorRef& modal);

/// H1_0 seminorm via Parseval: sqrt(sum lambda_j a_j^2).
Real grad_norm(const SpectralBasis& basis, const VectorRef& modal);

}  // namespace nlwave
