#include "nlwave/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string_view>
#include <thread>

#include <json.hpp>

namespace nlwave {

namespace {

// Runs fn(0..n-1), spreading indices over up to `workers` threads. Each index
// writes only its own slot, so scheduling cannot affect results. The first
// exception, if any, is rethrown on the calling thread.
void run_indexed(Index n, int workers, const std::function<void(Index)>& fn) {
  const int used = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (used == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> counter{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  for (int w = 0; w < used; ++w)
    pool.emplace_back([&] {
      try {
        for (Index i = counter.fetch_add(1); i < n; i = counter.fetch_add(1))
          fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Real phase_norm(const ObservationRecord& rec) {
  return std::sqrt(rec.h1_u * rec.h1_u + rec.l2_v * rec.l2_v);
}

// Locale-independent, round-trip exact formatting.
std::string format_real(Real value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Real parse_real(std::string_view token) {
  Real value = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{})
    throw std::runtime_error("load_records: malformed number '" +
                             std::string(token) + "'");
  return value;
}

constexpr char kCsvHeader[] =
    "t,E_total,E_kin,E_el,E_pot,E_force,l2_u,l2_v,h1_u,V_eps,resid,tail_frac";
constexpr char kSnapshotMagic[8] = {'N', 'L', 'W', 'S', 'N', 'A', 'P', '1'};

}  // namespace

State random_h1_state(const SpectralBasis& basis, Real energy, Rng& rng) {
  const Index n = basis.total_modes();
  State s = State::zero(basis);
  for (Index j = 0; j < n; ++j) {
    const Real decay = 1.0 / static_cast<Real>(j + 1);
    s.a[j] = decay * rng.normal();
    s.b[j] = decay * rng.normal();
  }
  const Real gn = grad_norm(basis, s.a);
  const Real q = 0.5 * (gn * gn + s.b.squaredNorm());
  if (q > 0.0 && energy > 0.0) {
    const Real scale = std::sqrt(energy / q);
    s.a *= scale;
    s.b *= scale;
  } else {
    s.a.setZero();
    s.b.setZero();
  }
  return s;
}

AbsorbingReport dissipativity_sweep(const SpectralBasis& basis,
                                    const PhysicsConfig& config,
                                    const std::vector<Real>& initial_scales,
                                    Real T, const StepConfig& step_config,
                                    const SweepOptions& options) {
  if (initial_scales.size() < 2)
    throw std::invalid_argument("dissipativity_sweep: need >= 2 scales");
  for (Real s : initial_scales)
    if (!(s > 0.0))
      throw std::invalid_argument("dissipativity_sweep: scales must be > 0");
  const Real burn_in = options.burn_in < 0.0 ? 0.5 * T : options.burn_in;
  if (!(burn_in < T))
    throw std::invalid_argument("dissipativity_sweep: burn-in must be < T");

  Rng rng(options.seed);
  const State base = random_h1_state(basis, 1.0, rng);

  AbsorbingReport report;
  report.entries.resize(initial_scales.size());

  run_indexed(static_cast<Index>(initial_scales.size()), options.workers,
              [&](Index i) {
                SweepEntry& entry = report.entries[static_cast<std::size_t>(i)];
                entry.scale = initial_scales[static_cast<std::size_t>(i)];

                State init = base;
                const Real amp = std::sqrt(entry.scale);
                init.a *= amp;
                init.b *= amp;
                const Real g0 = grad_norm(basis, init.a);
                entry.initial_norm =
                    std::sqrt(g0 * g0 + init.b.squaredNorm());

                const Trajectory traj =
                    integrate(basis, config, init, T, step_config);
                if (traj.aborted) {
                  entry.failed = true;
                  entry.diagnostic = traj.diagnostic;
                  return;
                }
                const Real half_start = burn_in + 0.5 * (T - burn_in);
                const Real quarter_start = burn_in + 0.75 * (T - burn_in);
                Real prev_quarter_sum = 0.0, last_quarter_sum = 0.0;
                long prev_quarter_n = 0, last_quarter_n = 0;
                for (const auto& rec : traj.records) {
                  if (rec.t < burn_in) continue;
                  const Real norm = phase_norm(rec);
                  entry.tail_sup = std::max(entry.tail_sup, norm);
                  if (rec.t >= half_start)
                    entry.half_sup = std::max(entry.half_sup, norm);
                  if (rec.t >= quarter_start) {
                    entry.quarter_sup = std::max(entry.quarter_sup, norm);
                    last_quarter_sum += norm;
                    ++last_quarter_n;
                  } else if (rec.t >= half_start) {
                    prev_quarter_sum += norm;
                    ++prev_quarter_n;
                  }
                }
                // Nested sups share the right endpoint, so they cannot flag
                // monotone growth; disjoint quarter means can.
                const Real prev_mean =
                    prev_quarter_n ? prev_quarter_sum / prev_quarter_n : 0.0;
                const Real last_mean =
                    last_quarter_n ? last_quarter_sum / last_quarter_n : 0.0;
                const bool growing = last_mean > 1.05 * prev_mean;
                entry.settled =
                    !growing &&
                    (entry.half_sup > 0.0
                         ? std::abs(entry.quarter_sup - entry.half_sup) <=
                               0.05 * entry.half_sup
                         : true);
              });

  Real lo = std::numeric_limits<Real>::infinity();
  Real hi = 0.0;
  bool all_settled = true;
  for (const auto& entry : report.entries) {
    if (entry.failed || !entry.settled) {
      all_settled = false;
      continue;
    }
    lo = std::min(lo, entry.tail_sup);
    hi = std::max(hi, entry.tail_sup);
  }
  report.conclusive = all_settled;
  if (report.conclusive) {
    report.radius = hi;
    report.ratio_spread = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : INFINITY);
  }
  return report;
}

PairReport pair_contraction_experiment(const SpectralBasis& basis,
                                       const PhysicsConfig& config,
                                       const std::vector<State>& initial_states,
                                       const std::vector<Real>& T_list,
                                       const StepConfig& step_config,
                                       int workers) {
  const Index n = static_cast<Index>(initial_states.size());
  if (n < 2)
    throw std::invalid_argument("pair_contraction_experiment: need >= 2 states");
  if (T_list.empty())
    throw std::invalid_argument("pair_contraction_experiment: empty T_list");
  for (std::size_t i = 1; i < T_list.size(); ++i)
    if (!(T_list[i] > T_list[i - 1]))
      throw std::invalid_argument(
          "pair_contraction_experiment: T_list must be increasing");

  std::vector<long long> target_steps(T_list.size());
  for (std::size_t i = 0; i < T_list.size(); ++i)
    target_steps[i] = std::llround(T_list[i] / step_config.dt);

  // states_at[time][trajectory]
  std::vector<std::vector<State>> states_at(
      T_list.size(), std::vector<State>(static_cast<std::size_t>(n)));

  run_indexed(n, workers, [&](Index traj_idx) {
    const StrangStepper stepper(basis, config, step_config);
    State current = initial_states[static_cast<std::size_t>(traj_idx)];
    long long step_no = 0;
    for (std::size_t ti = 0; ti < target_steps.size(); ++ti) {
      while (step_no < target_steps[ti]) {
        current = stepper.step(current);
        ++step_no;
        if (!current.a.allFinite() || !current.b.allFinite())
          throw std::runtime_error(
              "pair_contraction_experiment: non-finite state");
      }
      states_at[ti][static_cast<std::size_t>(traj_idx)] = current;
    }
  });

  PairReport report;
  report.times = T_list;
  report.pair_energy.reserve(T_list.size());
  report.min_pair.reserve(T_list.size());
  for (std::size_t ti = 0; ti < T_list.size(); ++ti) {
    Matrix E = Matrix::Zero(n, n);
    Real min_pair = std::numeric_limits<Real>::infinity();
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const Real e = pair_energy(basis, states_at[ti][static_cast<std::size_t>(i)],
                                   states_at[ti][static_cast<std::size_t>(j)]);
        E(i, j) = e;
        E(j, i) = e;
        min_pair = std::min(min_pair, e);
      }
    report.pair_energy.push_back(std::move(E));
    report.min_pair.push_back(min_pair);
  }
  return report;
}

Real weak_form_residual(const SpectralBasis& basis, const PhysicsConfig& config,
                        const Trajectory& trajectory,
                        const std::vector<Index>& test_mode_indices) {
  const auto& snaps = trajectory.snapshots;
  if (snaps.size() < 3)
    throw std::invalid_argument("weak_form_residual: need >= 3 snapshots");
  for (Index j : test_mode_indices)
    if (j < 0 || j >= basis.total_modes())
      throw std::invalid_argument("weak_form_residual: test mode out of range");

  const std::size_t m = test_mode_indices.size();
  const std::size_t K = snaps.size();

  // Per-snapshot values of the five right-hand-side terms for each test mode.
  enum { kPsi = 0, kForce, kStiff, kDamp, kNonlin, kTermCount };
  std::vector<std::array<std::vector<Real>, kTermCount>> terms(m);
  for (auto& t : terms)
    for (auto& v : t) v.resize(K);

  for (std::size_t s = 0; s < K; ++s) {
    const State& st = snaps[s];
    const Vector psi = config.kernel.modal_matrix * st.b;
    const Vector fa = nonlinearity_apply(config, basis, st.a);
    const Real damp_coeff = config.k * std::pow(st.b.norm(), config.p);
    for (std::size_t q = 0; q < m; ++q) {
      const Index j = test_mode_indices[q];
      terms[q][kPsi][s] = psi[j];
      terms[q][kForce][s] = config.h[j];
      terms[q][kStiff][s] = -basis.eigenvalues[j] * st.a[j];
      terms[q][kDamp][s] = -damp_coeff * st.b[j];
      terms[q][kNonlin][s] = -fa[j];
    }
  }

  auto trapezoid = [&](const std::vector<Real>& values) {
    Real acc = 0.0;
    for (std::size_t s = 0; s + 1 < K; ++s)
      acc += 0.5 * (values[s] + values[s + 1]) *
             (snaps[s + 1].time - snaps[s].time);
    return acc;
  };

  Real worst = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    const Index j = test_mode_indices[q];
    const Real lhs = snaps.back().b[j];
    const Real init = snaps.front().b[j];
    Real integral = 0.0;
    Real scale = std::max(std::abs(lhs), std::abs(init));
    for (int term = 0; term < kTermCount; ++term) {
      const Real part = trapezoid(terms[q][static_cast<std::size_t>(term)]);
      integral += part;
      scale = std::max(scale, std::abs(part));
    }
    const Real resid = std::abs(lhs - init - integral);
    worst = std::max(worst, resid / std::max(scale, 1e-300));
  }
  return worst;
}

std::string digest_hex(const std::string& canonical) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf, 16);
}

void write_snapshot(const std::filesystem::path& path, const State& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_snapshot: cannot open " + path.string());
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  const std::uint64_t n = static_cast<std::uint64_t>(state.a.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&state.time), sizeof(state.time));
  out.write(reinterpret_cast<const char*>(state.a.data()),
            static_cast<std::streamsize>(n * sizeof(Real)));
  out.write(reinterpret_cast<const char*>(state.b.data()),
            static_cast<std::streamsize>(n * sizeof(Real)));
  if (!out)
    throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

State load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("load_snapshot: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
    throw std::runtime_error("load_snapshot: bad magic in " + path.string());
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  State state;
  in.read(reinterpret_cast<char*>(&state.time), sizeof(state.time));
  state.a.resize(static_cast<Index>(n));
  state.b.resize(static_cast<Index>(n));
  in.read(reinterpret_cast<char*>(state.a.data()),
          static_cast<std::streamsize>(n * sizeof(Real)));
  in.read(reinterpret_cast<char*>(state.b.data()),
          static_cast<std::streamsize>(n * sizeof(Real)));
  if (!in)
    throw std::runtime_error("load_snapshot: truncated file " + path.string());
  return state;
}

std::vector<std::string> persist_run(RunManifest manifest,
                                     const std::vector<ObservationRecord>& records,
                                     const std::vector<State>& snapshots,
                                     const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("persist_run: cannot create " + out_dir.string() +
                             ": " + ec.message());

  std::vector<std::string> files;

  {
    const auto csv_path = out_dir / "records.csv";
    std::ofstream csv(csv_path);
    if (!csv)
      throw std::runtime_error("persist_run: cannot open " + csv_path.string());
    csv << kCsvHeader << "\n";
    for (const auto& r : records) {
      csv << format_real(r.t) << ',' << format_real(r.e_total) << ','
          << format_real(r.e_kin) << ',' << format_real(r.e_el) << ','
          << format_real(r.e_pot) << ',' << format_real(r.e_force) << ','
          << format_real(r.l2_u) << ',' << format_real(r.l2_v) << ','
          << format_real(r.h1_u) << ',' << format_real(r.v_eps) << ','
          << format_real(r.resid) << ',' << format_real(r.tail_frac) << "\n";
    }
    if (!csv)
      throw std::runtime_error("persist_run: write failed for " +
                               csv_path.string());
    files.push_back("records.csv");
  }

  if (!snapshots.empty()) {
    const auto snap_dir = out_dir / "snapshots";
    std::filesystem::create_directories(snap_dir, ec);
    if (ec)
      throw std::runtime_error("persist_run: cannot create " +
                               snap_dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%05zu.bin", i);
      write_snapshot(snap_dir / name, snapshots[i]);
      files.push_back(std::string("snapshots/") + name);
    }
  }

  manifest.outputs = files;
  manifest.outputs.insert(manifest.outputs.begin(), "manifest.json");
  {
    nlohmann::json j;
    j["config_digest"] = manifest.config_digest;
    j["basis"] = {{"dim", manifest.basis_dim},
                  {"modes", manifest.basis_modes},
                  {"lengths", manifest.basis_lengths}};
    j["step"] = {{"dt", manifest.step.dt},
                 {"scheme", manifest.step.scheme},
                 {"radial_tol", manifest.step.radial_tol},
                 {"radial_max_iter", manifest.step.radial_max_iter}};
    j["seed"] = manifest.seed;
    j["version"] = manifest.version;
    j["outputs"] = manifest.outputs;
    j["duration_seconds"] = manifest.duration_seconds;
    const auto manifest_path = out_dir / "manifest.json";
    std::ofstream out(manifest_path);
    if (!out)
      throw std::runtime_error("persist_run: cannot open " +
                               manifest_path.string());
    out << j.dump(2) << "\n";
  }
  return manifest.outputs;
}

std::vector<ObservationRecord> load_records(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in)
    throw std::runtime_error("load_records: cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("load_records: unexpected header in " +
                             csv_path.string());
  std::vector<ObservationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<Real, 12> fields{};
    std::size_t pos = 0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::size_t next = f + 1 < fields.size() ? line.find(',', pos)
                                                     : line.size();
      if (next == std::string::npos)
        throw std::runtime_error("load_records: short row in " +
                                 csv_path.string());
      fields[f] = parse_real(std::string_view(line).substr(pos, next - pos));
      pos = next + 1;
    }
    ObservationRecord r;
    r.t = fields[0];
    r.e_total = fields[1];
    r.e_kin = fields[2];
    r.e_el = fields[3];
    r.e_pot = fields[4];
    r.e_force = fields[5];
    r.l2_u = fields[6];
    r.l2_v = fields[7];
    r.h1_u = fields[8];
    r.v_eps = fields[9];
    r.resid = fields[10];
    r.tail_frac = fields[11];
    records.push_back(r);
  }
  return records;
}

}  // namespace nlwave
