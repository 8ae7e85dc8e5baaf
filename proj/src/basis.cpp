#include "nlwave/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nlwave {

namespace {

void check_modal_size(const SpectralBasis& basis, Index n, const char* what) {
  if (n != basis.total_modes()) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(basis.total_modes()) +
                                " modal coefficients, got " + std::to_string(n));
  }
}

}  // namespace

SpectralBasis build_basis(int dim, Index modes_per_axis,
                          const std::vector<Real>& lengths) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("build_basis: dim must be 1 or 2");
  if (modes_per_axis < 1)
    throw std::invalid_argument("build_basis: modes_per_axis must be >= 1");
  if (static_cast<int>(lengths.size()) != dim)
    throw std::invalid_argument("build_basis: lengths size must equal dim");
  for (Real L : lengths)
    if (!(L > 0.0)) throw std::invalid_argument("build_basis: lengths must be > 0");

  SpectralBasis basis;
  basis.dim = dim;
  basis.modes_per_axis = modes_per_axis;

  const Index M = modes_per_axis;
  const Index n_grid = 2 * M;  // interior points per axis; alias-free cubics

  for (int d = 0; d < dim; ++d) {
    const Real L = lengths[static_cast<std::size_t>(d)];
    basis.lengths[d] = L;

    const Index P = n_grid + 1;
    Vector nodes(n_grid);
    for (Index i = 0; i < n_grid; ++i)
      nodes[i] = L * static_cast<Real>(i + 1) / static_cast<Real>(P);
    basis.grid[d] = nodes;
    basis.quad_weight[d] = L / static_cast<Real>(P);

    // eval(i,k) = sqrt(2/L) sin((k+1) pi x_i / L); columns are discretely
    // orthogonal with (E^T E) = (P/L) I.
    Matrix E(n_grid, M);
    const Real scale = std::sqrt(2.0 / L);
    for (Index i = 0; i < n_grid; ++i)
      for (Index k = 0; k < M; ++k)
        E(i, k) = scale * std::sin(M_PI * static_cast<Real>((i + 1) * (k + 1)) /
                                   static_cast<Real>(P));
    basis.eval[d] = std::move(E);
  }

  if (dim == 1) {
    basis.eigenvalues.resize(M);
    const Real f = M_PI / basis.lengths[0];
    for (Index k = 0; k < M; ++k) {
      const Real kf = static_cast<Real>(k + 1) * f;
      basis.eigenvalues[k] = kf * kf;
    }
  } else {
    basis.eigenvalues.resize(M * M);
    const Real f0 = M_PI / basis.lengths[0];
    const Real f1 = M_PI / basis.lengths[1];
    for (Index k0 = 0; k0 < M; ++k0)
      for (Index k1 = 0; k1 < M; ++k1) {
        const Real a = static_cast<Real>(k0 + 1) * f0;
        const Real b = static_cast<Real>(k1 + 1) * f1;
        basis.eigenvalues[k0 * M + k1] = a * a + b * b;
      }
  }
  return basis;
}

Vector to_physical(const SpectralBasis& basis, const VectorRef& modal) {
  check_modal_size(basis, modal.size(), "to_physical");
  if (basis.dim == 1) return basis.eval[0] * modal;

  const Index M = basis.modes_per_axis;
  const Index n0 = basis.grid[0].size();
  const Index n1 = basis.grid[1].size();
  Eigen::Map<const RowMatrix> A(modal.data(), M, M);
  Vector out(n0 * n1);
  Eigen::Map<RowMatrix> V(out.data(), n0, n1);
  V = basis.eval[0] * A * basis.eval[1].transpose();
  return out;
}

Vector to_modal(const SpectralBasis& basis, const VectorRef& grid_values) {
  if (grid_values.size() != basis.grid_points())
    throw std::invalid_argument("to_modal: grid size mismatch");
  if (basis.dim == 1)
    return basis.quad_weight[0] * (basis.eval[0].transpose() * grid_values);

  const Index M = basis.modes_per_axis;
  const Index n0 = basis.grid[0].size();
  const Index n1 = basis.grid[1].size();
  Eigen::Map<const RowMatrix> V(grid_values.data(), n0, n1);
  Vector out(M * M);
  Eigen::Map<RowMatrix> A(out.data(), M, M);
  A = (basis.quad_weight[0] * basis.quad_weight[1]) *
      (basis.eval[0].transpose() * V * basis.eval[1]);
  return out;
}

Real quadrature_integral(const SpectralBasis& basis, const VectorRef& grid_values) {
  if (grid_values.size() != basis.grid_points())
    throw std::invalid_argument("quadrature_integral: grid size mismatch");
  Real w = basis.quad_weight[0];
  if (basis.dim == 2) w *= basis.quad_weight[1];
  return w * grid_values.sum();
}

Real l2_norm(const SpectralBasis& basis, const VectorRef& modal) {
  check_modal_size(basis, modal.size(), "l2_norm");
  return modal.norm();
}

Real grad_norm(const SpectralBasis& basis, const VectorRef& modal) {
  check_modal_size(basis, modal.size(), "grad_norm");
  return std::sqrt(basis.eigenvalues.dot(modal.cwiseAbs2()));
}

}  // namespace nlwave
