// Command-line front end: simulate | verify | sweep | pair | resolvent.
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlwave/config_io.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/verify.hpp"
#include "nlwave/version.hpp"

namespace {

using namespace nlwave;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::vector<std::string> overrides;
};

std::filesystem::path resolve_out_dir(const CommonOptions& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv("NLWAVE_OUT")) return env;
  return "nlwave_out";
}

LoadedConfig load_or_default(const CommonOptions& opts) {
  if (!opts.config_path.empty())
    return load_config(opts.config_path, opts.overrides, opts.seed);
  nlohmann::json doc = default_config_json();
  for (const auto& assignment : opts.overrides) apply_override(doc, assignment);
  if (opts.seed) doc["seed"] = *opts.seed;
  return build_config(std::move(doc));
}

RunManifest make_manifest(const LoadedConfig& config) {
  RunManifest manifest;
  manifest.config_digest = config.digest;
  manifest.basis_dim = config.basis.dim;
  manifest.basis_modes = config.basis.modes_per_axis;
  manifest.basis_lengths.assign(config.basis.lengths.begin(),
                                config.basis.lengths.begin() + config.basis.dim);
  manifest.step = config.step;
  manifest.seed = config.seed;
  manifest.version = kVersionTag;
  return manifest;
}

int cmd_simulate(const CommonOptions& opts) {
  const LoadedConfig config = load_or_default(opts);
  const auto sim = config.section("simulate");

  Rng rng(config.seed);
  const State initial = parse_initial_state(
      sim.contains("initial") ? sim["initial"] : nlohmann::json(), config.basis,
      rng);

  ObserverConfig observers;
  observers.record_stride = sim.value("record_stride", Index{1});
  observers.snapshot_stride = sim.value("snapshot_stride", Index{0});
  if (sim.contains("eps")) observers.eps = sim["eps"].get<Real>();
  const Real T = sim.value("T", 10.0);

  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj =
      integrate(config.basis, config.physics, initial, T, config.step, observers);
  const std::chrono::duration<Real> elapsed = std::chrono::steady_clock::now() - t0;

  for (const auto& warning : traj.warnings)
    std::cerr << "warning: " << warning << "\n";

  RunManifest manifest = make_manifest(config);
  manifest.duration_seconds = elapsed.count();

  const auto out_dir = resolve_out_dir(opts);
  persist_run(manifest, traj.records, traj.snapshots, out_dir);

  std::cout << std::setprecision(17);
  std::cout << "steps      " << std::llround(T / config.step.dt) << "\n"
            << "records    " << traj.records.size() << "\n"
            << "E(0)       " << traj.records.front().e_total << "\n"
            << "E(T)       " << traj.records.back().e_total << "\n"
            << "out        " << out_dir.string() << "\n";

  if (traj.aborted) {
    std::cerr << "numerical failure: " << traj.diagnostic << "\n";
    return 2;
  }
  return 0;
}

int cmd_verify(const CommonOptions& opts) {
  const LoadedConfig config = load_or_default(opts);
  const auto results = run_verification(config, config.seed);
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(28)
              << r.name << " " << r.detail << "\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 2;
}

int cmd_sweep(const CommonOptions& opts) {
  const LoadedConfig config = load_or_default(opts);
  const auto section = config.section("sweep");
  const std::vector<Real> scales =
      section.value("scales", std::vector<Real>{1.0, 10.0, 100.0});
  const Real T = section.value("T", 200.0);

  SweepOptions sweep_options;
  sweep_options.burn_in = section.value("burn_in", -1.0);
  sweep_options.seed = config.seed;
  sweep_options.workers = opts.workers;

  const AbsorbingReport report = dissipativity_sweep(
      config.basis, config.physics, scales, T, config.step, sweep_options);

  nlohmann::json out;
  out["conclusive"] = report.conclusive;
  if (report.conclusive) {
    out["radius"] = report.radius;
    out["ratio_spread"] = report.ratio_spread;
  }
  out["entries"] = nlohmann::json::array();
  bool any_failed = false;
  for (const auto& e : report.entries) {
    out["entries"].push_back({{"scale", e.scale},
                              {"initial_norm", e.initial_norm},
                              {"tail_sup", e.tail_sup},
                              {"half_sup", e.half_sup},
                              {"quarter_sup", e.quarter_sup},
                              {"settled", e.settled},
                              {"failed", e.failed},
                              {"diagnostic", e.diagnostic}});
    any_failed = any_failed || e.failed;
  }

  const auto out_dir = resolve_out_dir(opts);
  std::filesystem::create_directories(out_dir);
  const auto report_path = out_dir / "absorbing_report.json";
  std::ofstream file(report_path);
  file << out.dump(2) << "\n";

  std::cout << std::setprecision(17);
  for (const auto& e : report.entries)
    std::cout << "scale " << e.scale << "  initial " << e.initial_norm
              << "  tail sup " << e.tail_sup
              << (e.failed ? "  FAILED" : e.settled ? "" : "  (not settled)")
              << "\n";
  if (report.conclusive)
    std::cout << "absorbing radius estimate " << report.radius
              << " (spread " << report.ratio_spread << ")\n";
  else
    std::cout << "inconclusive: trajectories did not settle within T\n";
  std::cout << "report " << report_path.string() << "\n";
  return any_failed ? 2 : 0;
}

int cmd_pair(const CommonOptions& opts) {
  const LoadedConfig config = load_or_default(opts);
  const auto section = config.section("pair");
  const int count = section.value("count", 2);
  const Real energy = section.value("energy", 1.0);
  const std::vector<Real> T_list =
      section.value("T_list", std::vector<Real>{10.0, 100.0});

  Rng rng(config.seed);
  std::vector<State> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    states.push_back(random_h1_state(config.basis, energy, rng));

  const PairReport report = pair_contraction_experiment(
      config.basis, config.physics, states, T_list, config.step, opts.workers);

  nlohmann::json out;
  out["times"] = report.times;
  out["min_pair"] = report.min_pair;
  out["matrices"] = nlohmann::json::array();
  for (const auto& E : report.pair_energy) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < E.rows(); ++i) {
      std::vector<Real> row(static_cast<std::size_t>(E.cols()));
      for (Index j = 0; j < E.cols(); ++j) row[static_cast<std::size_t>(j)] = E(i, j);
      rows.push_back(row);
    }
    out["matrices"].push_back(rows);
  }

  const auto out_dir = resolve_out_dir(opts);
  std::filesystem::create_directories(out_dir);
  const auto report_path = out_dir / "pair_report.json";
  std::ofstream file(report_path);
  file << out.dump(2) << "\n";

  std::cout << std::setprecision(17);
  for (std::size_t i = 0; i < report.times.size(); ++i)
    std::cout << "T = " << report.times[i] << "  min pair energy "
              << report.min_pair[i] << "\n";
  std::cout << "report " << report_path.string() << "\n";
  return 0;
}

int cmd_resolvent(const CommonOptions& opts) {
  const LoadedConfig config = load_or_default(opts);
  const auto section = config.section("resolvent");

  Rng rng(config.seed);
  ResolventProblem problem;
  problem.f0 = parse_vector_spec(
      section.contains("f0") ? section["f0"] : nlohmann::json(), config.basis,
      &rng, "f0");
  problem.f1 = parse_vector_spec(
      section.contains("f1") ? section["f1"] : nlohmann::json(), config.basis,
      &rng, "f1");
  const Real tol = section.value("tol", 1e-10);

  const ResolventSolution sol =
      resolvent_solve(config.basis, config.physics, problem, tol);
  std::cout << std::setprecision(17);
  std::cout << "sigma          " << sol.sigma << "\n"
            << "residual state " << sol.residual_state << "\n"
            << "residual force " << sol.residual_force << "\n"
            << "iterations     " << sol.iterations << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersionTag) +
               " — spectral simulator for the dissipative wave equation with "
               "nonlocal damping"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* config_opt =
        cmd->add_option("--config", opts.config_path, "configuration file (JSON)");
    if (config_required) config_opt->required();
    cmd->add_option("--out", opts.out_dir,
                    "output directory (default: $NLWAVE_OUT or ./nlwave_out)");
    cmd->add_option("--seed", opts.seed, "override the configured seed");
    cmd->add_option("--workers", opts.workers, "max parallel trajectories");
    cmd->add_option("--set", opts.overrides,
                    "dotted-path config override, e.g. physics.p=3 (repeatable)");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate, true);
  auto* verify = app.add_subcommand("verify", "run the property suite");
  add_common(verify, false);
  auto* sweep = app.add_subcommand("sweep", "absorbing-set experiment");
  add_common(sweep, true);
  auto* pair = app.add_subcommand("pair", "pair-contraction experiment");
  add_common(pair, true);
  auto* resolvent = app.add_subcommand("resolvent", "stationary resolvent solve");
  add_common(resolvent, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;  // --help and friends
    std::cerr << "\n" << app.help();
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (verify->parsed()) return cmd_verify(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (pair->parsed()) return cmd_pair(opts);
    if (resolvent->parsed()) return cmd_resolvent(opts);
  } catch (const std::invalid_argument& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 1;
  } catch (const std::runtime_error& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
