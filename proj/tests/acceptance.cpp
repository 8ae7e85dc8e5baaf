// Acceptance suite: one pass/fail line per criterion, tolerances pinned in
// code. Criterion 10 drives the installed CLI binary end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nlwave/experiments.hpp"
#include "nlwave/rng.hpp"

using namespace nlwave;

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("criterion %2d [%s] %-28s %s (%.2f s)\n", criterion,
              pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
}

PhysicsConfig empty_physics(const SpectralBasis& basis) {
  PhysicsConfig config;
  config.kernel = Kernel::zero(basis);
  config.h = Vector::Zero(basis.total_modes());
  config.nonlinearity = Nonlinearity::zero();
  return config;
}

// 32-mode cubic configuration with a separable anti-damping kernel.
PhysicsConfig kernel_cubic_config(const SpectralBasis& basis) {
  PhysicsConfig config = empty_physics(basis);
  config.k = 1.0;
  config.p = 2.0;
  config.nonlinearity = Nonlinearity::odd_polynomial({0.0, 1.0}, 3);
  std::vector<Kernel::SeparableTerm> terms(1);
  terms[0].coeff = 0.4;
  terms[0].g = [](Real x, Real) { return std::sin(x); };
  terms[0].h = [](Real y, Real) { return std::sin(2.0 * y); };
  config.kernel = Kernel::separable(basis, terms);
  return config;
}

// Cubic source with first-mode forcing, no kernel (criterion 6 configuration).
PhysicsConfig forced_cubic_config(const SpectralBasis& basis) {
  PhysicsConfig config = empty_physics(basis);
  config.k = 1.0;
  config.p = 2.0;
  config.nonlinearity = Nonlinearity::odd_polynomial({0.0, 1.0}, 3);
  config.h[0] = 0.5;
  return config;
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("criterion 1: monotonicity suite") {
  Timer timer;
  Rng rng(101);
  bool nonneg = true;
  bool positive_cq = true;
  Real c4 = std::numeric_limits<Real>::infinity();
  std::ostringstream detail;

  for (Real q : {1.5, 2.5, 3.0, 4.0}) {
    Real min_ratio = std::numeric_limits<Real>::infinity();
    const Index dims[3] = {2, 16, 256};
    for (int block = 0; block < 3; ++block) {
      const Index dim = dims[block];
      for (int t = 0; t < 33334; ++t) {
        const Vector x = rng.normal_vector(dim);
        const Vector y = rng.normal_vector(dim);
        const auto rep = monotonicity_check(x, y, q);
        nonneg = nonneg && rep.pass;
        min_ratio = std::min(min_ratio, rep.empirical_ratio);
      }
    }
    if (q == 4.0) {
      Vector hx(2), hy(2);
      hx << 1.0, 0.0;
      hy << 0.0, 1.0;
      min_ratio = std::min(min_ratio, monotonicity_check(hx, hy, 4.0).empirical_ratio);
      c4 = min_ratio;
    }
    positive_cq = positive_cq && min_ratio > 0.0;
    detail << "C_" << q << "=" << min_ratio << " ";
  }

  const double elapsed = timer.seconds();
  const bool pass = nonneg && positive_cq && c4 <= 0.5 && elapsed < 10.0;
  report(1, "monotonicity", pass, detail.str(), elapsed);
  CHECK(nonneg);
  CHECK(positive_cq);
  CHECK(c4 <= 0.5);
  CHECK(elapsed < 10.0);
}

TEST_CASE("criterion 2: energy identity convergence order") {
  Timer timer;
  const auto basis = build_basis(1, 32, {M_PI});
  const auto config = kernel_cubic_config(basis);
  Rng rng(102);
  const State init = random_h1_state(basis, 1.0, rng);

  const std::vector<Real> dts = {1e-2, 5e-3, 2.5e-3};
  std::vector<Real> residuals;
  for (Real dt : dts) {
    StepConfig sc;
    sc.dt = dt;
    const Trajectory traj = integrate(basis, config, init, 1.0, sc);
    Real worst = 0.0;
    for (const auto& rec : traj.records) worst = std::max(worst, rec.resid);
    residuals.push_back(worst);
  }

  // Least-squares slope of log(resid) against log(dt).
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const Real x = std::log(dts[i]);
    const Real y = std::log(residuals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Real n = static_cast<Real>(dts.size());
  const Real order = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "order=" << order << " residuals=" << residuals[0] << ","
         << residuals[1] << "," << residuals[2];
  const bool pass = order >= 1.7 && order <= 2.3 && elapsed < 30.0;
  report(2, "energy identity order", pass, detail.str(), elapsed);
  CHECK(order >= 1.7);
  CHECK(order <= 2.3);
  CHECK(elapsed < 30.0);
}

TEST_CASE("criterion 3: conservation control") {
  Timer timer;
  const auto basis = build_basis(1, 64, {M_PI});
  auto config = empty_physics(basis);
  config.k = 0.0;
  config.p = 2.0;

  Rng rng(103);
  const State init = random_h1_state(basis, 1.0, rng);
  StepConfig sc;
  sc.dt = 1e-2;
  ObserverConfig obs;
  obs.record_stride = 10;
  const Trajectory traj = integrate(basis, config, init, 100.0, sc, obs);

  const Real e0 = traj.records.front().e_total;
  Real drift = 0.0;
  for (const auto& rec : traj.records)
    drift = std::max(drift, std::abs(rec.e_total - e0) / e0);

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "relative drift=" << drift << " over 1e4 steps";
  const bool pass = drift < 1e-9;
  report(3, "conservation control", pass, detail.str(), elapsed);
  CHECK(drift < 1e-9);
}

TEST_CASE("criterion 4: resolvent residual and uniqueness") {
  Timer timer;
  const auto basis = build_basis(1, 32, {M_PI});
  auto config = empty_physics(basis);
  config.k = 1.0;

  Rng rng(104);
  Real worst_residual = 0.0;
  Real worst_sigma_gap = 0.0;
  for (Real p : {0.5, 2.0, 5.0}) {
    config.p = p;
    for (int t = 0; t < 100; ++t) {
      ResolventProblem problem{rng.normal_vector(32), rng.normal_vector(32)};
      const auto sol1 = resolvent_solve(basis, config, problem, 1e-10);
      const auto sol2 =
          resolvent_solve(basis, config, problem, 1e-10, 3.0 * sol1.sigma + 11.0);
      worst_residual = std::max(
          worst_residual, std::max(sol1.residual_force, sol1.residual_state));
      worst_sigma_gap = std::max(worst_sigma_gap, std::abs(sol1.sigma - sol2.sigma));
    }
  }

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "max residual=" << worst_residual
         << " max sigma gap=" << worst_sigma_gap;
  const bool pass =
      worst_residual < 1e-10 && worst_sigma_gap < 1e-12 && elapsed < 5.0;
  report(4, "resolvent", pass, detail.str(), elapsed);
  CHECK(worst_residual < 1e-10);
  CHECK(worst_sigma_gap < 1e-12);
  CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 5: radial solve closed-form oracle") {
  Timer timer;
  Real worst = 0.0;
  for (int ci = 0; ci < 32; ++ci)
    for (int ri = 0; ri < 32; ++ri) {
      const Real c = std::pow(10.0, -3.0 + 6.0 * ci / 31.0);
      const Real r = std::pow(10.0, -3.0 + 5.0 * ri / 31.0);
      const Real exact = 2.0 * r / (1.0 + std::sqrt(1.0 + 4.0 * c * r));
      const Real rho = radial_damping_solve(r, c, 1.0, 1e-15);
      worst = std::max(worst, std::abs(rho - exact) / (1.0 + exact));
    }
  const Real point = radial_damping_solve(2.0, 1.0, 2.0, 1e-15);
  const Real point_err = std::abs(point - 1.0);

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "max p=1 deviation=" << worst << " |rho(2;1,2)-1|=" << point_err;
  const bool pass = worst <= 1e-12 && point_err <= 1e-13;
  report(5, "radial solve oracle", pass, detail.str(), elapsed);
  CHECK(worst <= 1e-12);
  CHECK(point_err <= 1e-13);
}

TEST_CASE("criterion 6: dissipativity sweep") {
  Timer timer;
  const auto basis = build_basis(1, 32, {M_PI});
  const auto config = forced_cubic_config(basis);
  StepConfig sc;
  sc.dt = 1e-2;
  SweepOptions options;
  options.seed = 106;
  options.workers = 3;

  const auto sweep =
      dissipativity_sweep(basis, config, {1.0, 10.0, 100.0}, 200.0, sc, options);

  bool no_failures = true;
  Real lo = std::numeric_limits<Real>::infinity(), hi = 0.0;
  for (const auto& e : sweep.entries) {
    no_failures = no_failures && !e.failed;
    lo = std::min(lo, e.tail_sup);
    hi = std::max(hi, e.tail_sup);
  }
  const bool factor_two = hi <= 2.0 * lo;
  const bool below_initial = sweep.entries[1].tail_sup < sweep.entries[1].initial_norm &&
                             sweep.entries[2].tail_sup < sweep.entries[2].initial_norm;

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "tail sups=" << sweep.entries[0].tail_sup << ","
         << sweep.entries[1].tail_sup << "," << sweep.entries[2].tail_sup
         << " spread=" << hi / lo;
  const bool pass = no_failures && factor_two && below_initial && elapsed < 60.0;
  report(6, "dissipativity sweep", pass, detail.str(), elapsed);
  CHECK(no_failures);
  CHECK(factor_two);
  CHECK(below_initial);
  CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 7: anti-damping bound") {
  Timer timer;
  const auto basis = build_basis(1, 16, {M_PI});
  auto config = empty_physics(basis);

  Rng rng(107);
  bool bound_ok = true;
  for (int kernel_no = 0; kernel_no < 10; ++kernel_no) {
    Matrix K(16, 16);
    for (Index i = 0; i < 16; ++i)
      for (Index j = 0; j < 16; ++j) K(i, j) = rng.normal();
    config.kernel = Kernel::from_matrix(K);
    for (int t = 0; t < 1000; ++t) {
      const Vector v = rng.normal_vector(16);
      const Real lhs = antidamping(config, basis, v).norm();
      bound_ok =
          bound_ok && lhs <= config.kernel.hs_norm * v.norm() * (1.0 + 1e-13);
    }
  }

  // Rank-one analytic kernel (2/pi) sin x sin y on (0,pi).
  std::vector<Kernel::SeparableTerm> terms(1);
  terms[0].coeff = 2.0 / M_PI;
  terms[0].g = [](Real x, Real) { return std::sin(x); };
  terms[0].h = [](Real y, Real) { return std::sin(y); };
  config.kernel = Kernel::separable(basis, terms);
  const Vector sin_hat =
      to_modal(basis, basis.grid[0].array().sin().matrix());
  const Real reproduction =
      (antidamping(config, basis, sin_hat) - sin_hat).cwiseAbs().maxCoeff();
  const Real hs_err = std::abs(config.kernel.hs_norm - 1.0);

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "Psi(sin) error=" << reproduction << " |hs-1|=" << hs_err;
  const bool pass = bound_ok && reproduction < 1e-12 && hs_err < 1e-12;
  report(7, "anti-damping bound", pass, detail.str(), elapsed);
  CHECK(bound_ok);
  CHECK(reproduction < 1e-12);
  CHECK(hs_err < 1e-12);
}

TEST_CASE("criterion 8: pair contraction and tail decay") {
  Timer timer;
  const auto basis = build_basis(1, 32, {M_PI});
  const auto config = forced_cubic_config(basis);
  StepConfig sc;
  sc.dt = 1e-2;

  Rng rng(108);
  const State s1 = random_h1_state(basis, 1.0, rng);
  const State s2 = random_h1_state(basis, 1.0, rng);

  const auto pair = pair_contraction_experiment(basis, config, {s1, s2},
                                                {10.0, 100.0}, sc, 2);
  const bool contraction = pair.min_pair[1] < pair.min_pair[0];

  ObserverConfig obs;
  obs.record_stride = 100;
  obs.tail_cutoff = 16;  // M/2
  const Trajectory traj = integrate(basis, config, s1, 100.0, sc, obs);
  const Real tail_start = traj.records.front().tail_frac;
  const Real tail_end = traj.records.back().tail_frac;
  const bool tail_decay = tail_end < tail_start;

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "E(10)=" << pair.min_pair[0] << " E(100)=" << pair.min_pair[1]
         << " tail " << tail_start << " -> " << tail_end;
  const bool pass = contraction && tail_decay;
  report(8, "pair contraction", pass, detail.str(), elapsed);
  CHECK(contraction);
  CHECK(tail_decay);
}

TEST_CASE("criterion 9: weak-form residual") {
  Timer timer;
  const auto basis = build_basis(1, 32, {M_PI});
  const auto config = kernel_cubic_config(basis);
  Rng rng(109);
  const State init = random_h1_state(basis, 1.0, rng);

  auto residual_at = [&](Real dt) {
    StepConfig sc;
    sc.dt = dt;
    ObserverConfig obs;
    obs.snapshot_stride = 1;
    const Trajectory traj = integrate(basis, config, init, 1.0, sc, obs);
    return weak_form_residual(basis, config, traj, {0, 1, 2, 3, 4});
  };
  const Real coarse = residual_at(2e-3);
  const Real fine = residual_at(1e-3);

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "residual(1e-3)=" << fine << " residual(2e-3)=" << coarse;
  const bool pass = fine < 1e-3 && fine < coarse;
  report(9, "weak-form residual", pass, detail.str(), elapsed);
  CHECK(fine < 1e-3);
  CHECK(fine < coarse);
}

TEST_CASE("criterion 10: CLI determinism") {
  Timer timer;
  const std::filesystem::path cli = NLWAVE_CLI_PATH;
  const std::filesystem::path config =
      std::filesystem::path(NLWAVE_CONFIG_DIR) / "linear_damped.json";
  REQUIRE(std::filesystem::exists(cli));
  REQUIRE(std::filesystem::exists(config));

  const auto base = std::filesystem::temp_directory_path() / "nlwave_acceptance";
  std::filesystem::remove_all(base);
  const auto out1 = base / "run1";
  const auto out2 = base / "run2";

  auto invoke = [&](const std::filesystem::path& out) {
    std::ostringstream cmd;
    cmd << cli.string() << " simulate --config " << config.string() << " --out "
        << out.string() << " --seed 42 > /dev/null";
    return run_command(cmd.str());
  };
  const int rc1 = invoke(out1);
  const int rc2 = invoke(out2);

  const std::string csv1 = read_file(out1 / "records.csv");
  const std::string csv2 = read_file(out2 / "records.csv");
  const bool identical = !csv1.empty() && csv1 == csv2;

  // The bundled linear-damped run must show monotone energy decay.
  const auto records = load_records(out1 / "records.csv");
  bool monotone = records.size() > 2;
  for (std::size_t i = 1; i < records.size(); ++i)
    monotone = monotone &&
               records[i].e_total <= records[i - 1].e_total * (1.0 + 1e-12);

  const double elapsed = timer.seconds();
  std::ostringstream detail;
  detail << "exit codes " << rc1 << "/" << rc2 << ", " << csv1.size()
         << " bytes, monotone=" << (monotone ? "yes" : "no");
  const bool pass = rc1 == 0 && rc2 == 0 && identical && monotone;
  report(10, "CLI determinism", pass, detail.str(), elapsed);
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  CHECK(identical);
  CHECK(monotone);
  std::filesystem::remove_all(base);
}
