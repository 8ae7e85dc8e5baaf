#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlwave/integrator.hpp"
#include "nlwave/rng.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

/// Random phase point with modal decay ~ 1/(index+1) in both components,
/// rescaled so the quadratic energy 1/2 (|grad u|^2 + |u_t|^2) equals
/// `energy`. Bounded-set samples for sweeps and pair probes.
State random_h1_state(const SpectralBasis& basis, Real energy, Rng& rng);

/// Reproducibility record of one run.
struct RunManifest {
  std::string config_digest;
  int basis_dim = 1;
  Index basis_modes = 0;
  std::vector<Real> basis_lengths;
  StepConfig step;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;
  Real duration_seconds = 0.0;
};

struct SweepOptions {
  Real burn_in = -1.0;  // < 0: T/2
  std::uint64_t seed = 0;
  int workers = 1;
};

/// One trajectory's row in the absorbing-set experiment.
struct SweepEntry {
  Real scale = 0.0;          // target initial quadratic energy
  Real initial_norm = 0.0;   // |(u, u_t)| in H1_0 x L2 at t = 0
  Real tail_sup = 0.0;       // sup over [burn_in, T]
  Real half_sup = 0.0;       // sup over the last half of [burn_in, T]
  Real quarter_sup = 0.0;    // sup over the last quarter
  bool settled = false;      // quarter_sup within 5% of half_sup
  bool failed = false;
  std::string diagnostic;
};

/// Empirical absorbing-radius report. `radius` is only populated when every
/// trajectory settled; otherwise the sweep is explicitly inconclusive rather
/// than extrapolated.
struct AbsorbingReport {
  std::vector<SweepEntry> entries;
  bool conclusive = false;
  Real radius = 0.0;        // max tail_sup across scales, when conclusive
  Real ratio_spread = 0.0;  // max/min of tail suprema over successful runs
};

AbsorbingReport dissipativity_sweep(const SpectralBasis& basis,
                                    const PhysicsConfig& config,
                                    const std::vector<Real>& initial_scales,
                                    Real T, const StepConfig& step_config,
                                    const SweepOptions& options = {});

/// Pairwise trajectory separation E^{n,m}(T) for every unordered pair of
/// initial states at each requested time.
struct PairReport {
  std::vector<Real> times;
  std::vector<Matrix> pair_energy;  // one symmetric matrix per time
  std::vector<Real> min_pair;       // min over off-diagonal pairs per time
};

PairReport pair_contraction_experiment(const SpectralBasis& basis,
                                       const PhysicsConfig& config,
                                       const std::vector<State>& initial_states,
                                       const std::vector<Real>& T_list,
                                       const StepConfig& step_config,
                                       int workers = 1);

/// Audits the time-integrated weak identity against basis test functions,
/// with trapezoidal quadrature over the trajectory's snapshots. Returns the
/// largest residual normalized by the largest participating term. Requires
/// at least 3 snapshots.
Real weak_form_residual(const SpectralBasis& basis, const PhysicsConfig& config,
                        const Trajectory& trajectory,
                        const std::vector<Index>& test_mode_indices);

/// Writes manifest.json, records.csv and snapshots/NNNNN.bin under out_dir
/// and returns the file list (also recorded in the manifest copy on disk).
std::vector<std::string> persist_run(RunManifest manifest,
                                     const std::vector<ObservationRecord>& records,
                                     const std::vector<State>& snapshots,
                                     const std::filesystem::path& out_dir);

/// Reads back a records.csv written by persist_run; values round-trip
/// bit-exactly.
std::vector<ObservationRecord> load_records(const std::filesystem::path& csv_path);

void write_snapshot(const std::filesystem::path& path, const State& state);
State load_snapshot(const std::filesystem::path& path);

/// FNV-1a-64 over a canonical serialization; stable under field reordering.
std::string digest_hex(const std::string& canonical);

}  // namespace nlwave
