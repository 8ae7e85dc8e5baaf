#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlwave/basis.hpp"
#include "nlwave/rng.hpp"

using namespace nlwave;

namespace {

// Composite Simpson quadrature, independent of the spectral machinery.
template <typename F>
Real simpson(F f, Real a, Real b, int n = 20000) {
  const Real h = (b - a) / n;
  Real acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("eigenvalues follow the analytic sine formula") {
  SUBCASE("interval (0,pi), four modes") {
    const auto basis = build_basis(1, 4, {M_PI});
    REQUIRE(basis.eigenvalues.size() == 4);
    for (Index k = 0; k < 4; ++k)
      CHECK(basis.eigenvalues[k] ==
            doctest::Approx(static_cast<Real>((k + 1) * (k + 1))).epsilon(1e-14));
  }
  SUBCASE("unit interval, first eigenvalue is pi^2") {
    const auto basis = build_basis(1, 1, {1.0});
    CHECK(basis.eigenvalues[0] == doctest::Approx(M_PI * M_PI).epsilon(1e-14));
    CHECK(basis.lambda1() == doctest::Approx(M_PI * M_PI).epsilon(1e-14));
  }
  SUBCASE("square (0,pi)^2, lexicographic order") {
    const auto basis = build_basis(2, 2, {M_PI, M_PI});
    REQUIRE(basis.eigenvalues.size() == 4);
    CHECK(basis.eigenvalues[0] == doctest::Approx(2.0));  // (1,1)
    CHECK(basis.eigenvalues[1] == doctest::Approx(5.0));  // (1,2)
    CHECK(basis.eigenvalues[2] == doctest::Approx(5.0));  // (2,1)
    CHECK(basis.eigenvalues[3] == doctest::Approx(8.0));  // (2,2)
    CHECK(basis.lambda1() == doctest::Approx(2.0));
  }
  SUBCASE("general rectangle") {
    const auto basis = build_basis(2, 3, {1.5, 2.5});
    for (Index k0 = 0; k0 < 3; ++k0)
      for (Index k1 = 0; k1 < 3; ++k1) {
        const Real expected = std::pow((k0 + 1) * M_PI / 1.5, 2) +
                              std::pow((k1 + 1) * M_PI / 2.5, 2);
        CHECK(basis.eigenvalues[k0 * 3 + k1] ==
              doctest::Approx(expected).epsilon(1e-14));
      }
  }
}

TEST_CASE("invalid construction is rejected") {
  CHECK_THROWS_AS(build_basis(1, 0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(1, 4, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(1, 4, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(3, 4, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(2, 4, {1.0}), std::invalid_argument);
}

TEST_CASE("to_physical evaluates basis functions on the grid") {
  const auto basis = build_basis(1, 8, {M_PI});
  Vector modal = Vector::Zero(8);
  modal[0] = 1.0;
  const Vector grid = to_physical(basis, modal);
  const Real scale = std::sqrt(2.0 / M_PI);
  for (Index i = 0; i < grid.size(); ++i)
    CHECK(grid[i] ==
          doctest::Approx(scale * std::sin(basis.grid[0][i])).epsilon(1e-14));

  // sin(x) itself carries the coefficient sqrt(pi/2) on mode one.
  const Vector sin_modal = to_modal(basis, basis.grid[0].array().sin().matrix());
  CHECK(sin_modal[0] == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-14));
  for (Index k = 1; k < 8; ++k) CHECK(std::abs(sin_modal[k]) < 1e-13);
}

TEST_CASE("zero coefficients map to the zero field and back") {
  const auto basis = build_basis(2, 4, {M_PI, M_PI});
  const Vector zero = Vector::Zero(basis.total_modes());
  CHECK(to_physical(basis, zero).cwiseAbs().maxCoeff() == 0.0);
  CHECK(to_modal(basis, Vector::Zero(basis.grid_points())).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("transform round-trip is identity to round-off") {
  Rng rng(20250811);
  SUBCASE("1D, sizes up to 256") {
    for (Index m : {3, 32, 256}) {
      const auto basis = build_basis(1, m, {2.0});
      Real worst = 0.0;
      const int trials = m <= 32 ? 1000 : 20;
      for (int t = 0; t < trials; ++t) {
        const Vector c = rng.normal_vector(m);
        worst = std::max(worst, (to_modal(basis, to_physical(basis, c)) - c)
                                    .cwiseAbs()
                                    .maxCoeff());
      }
      CHECK(worst < 1e-12);
    }
  }
  SUBCASE("2D, up to 64 modes per axis") {
    for (Index m : {4, 16, 64}) {
      const auto basis = build_basis(2, m, {M_PI, 1.3});
      Real worst = 0.0;
      const int trials = m <= 16 ? 100 : 5;
      for (int t = 0; t < trials; ++t) {
        const Vector c = rng.normal_vector(m * m);
        worst = std::max(worst, (to_modal(basis, to_physical(basis, c)) - c)
                                    .cwiseAbs()
                                    .maxCoeff());
      }
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("transform rejects mismatched sizes") {
  const auto basis = build_basis(1, 8, {1.0});
  CHECK_THROWS_AS(to_physical(basis, Vector::Zero(7)), std::invalid_argument);
  CHECK_THROWS_AS(to_modal(basis, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(l2_norm(basis, Vector::Zero(9)), std::invalid_argument);
}

TEST_CASE("norms of sin(x) on (0,pi)") {
  const auto basis = build_basis(1, 6, {M_PI});
  const Vector modal = to_modal(basis, basis.grid[0].array().sin().matrix());
  CHECK(l2_norm(basis, modal) ==
        doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-13));
  CHECK(grad_norm(basis, modal) ==
        doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-13));
}

TEST_CASE("Parseval against quadrature on random fields") {
  Rng rng(7);
  for (int dim : {1, 2}) {
    const auto basis =
        dim == 1 ? build_basis(1, 24, {2.5}) : build_basis(2, 8, {2.5, 1.0});
    for (int t = 0; t < 1000; ++t) {
      const Vector c = rng.normal_vector(basis.total_modes());
      const Vector grid = to_physical(basis, c);
      const Real quad = quadrature_integral(basis, grid.cwiseAbs2());
      const Real n2 = c.squaredNorm();
      CHECK(std::abs(n2 - quad) < 1e-10 * (1.0 + n2));
    }
  }
}

TEST_CASE("Poincare inequality with equality only on the first mode") {
  Rng rng(11);
  const auto basis = build_basis(1, 16, {M_PI});
  const Real lambda1 = basis.lambda1();
  for (int t = 0; t < 1000; ++t) {
    const Vector c = rng.normal_vector(16);
    const Real g = grad_norm(basis, c);
    const Real l = l2_norm(basis, c);
    CHECK(g * g >= lambda1 * l * l * (1.0 - 1e-14));
  }
  Vector pure = Vector::Zero(16);
  pure[0] = 3.0;
  const Real g = grad_norm(basis, pure);
  CHECK(g * g == doctest::Approx(lambda1 * pure.squaredNorm()).epsilon(1e-14));

  Vector mixed = pure;
  mixed[4] = 0.5;
  const Real gm = grad_norm(basis, mixed);
  CHECK(gm * gm > lambda1 * mixed.squaredNorm() * (1.0 + 1e-6));
}

TEST_CASE("quadrature matches an independent rule for smooth integrands") {
  const auto basis = build_basis(1, 16, {M_PI});
  Vector field(basis.grid_points());
  for (Index i = 0; i < field.size(); ++i) {
    const Real x = basis.grid[0][i];
    field[i] = std::sin(x) * std::sin(x) * std::sin(x) * std::sin(x);
  }
  const Real oracle = simpson(
      [](Real x) { return std::pow(std::sin(x), 4); }, 0.0, M_PI);
  CHECK(quadrature_integral(basis, field) ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(3.0 * M_PI / 8.0).epsilon(1e-12));
}
