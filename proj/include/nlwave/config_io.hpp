#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlwave/integrator.hpp"
#include "nlwave/model.hpp"
#include "nlwave/rng.hpp"

namespace nlwave {

/// A parsed experiment configuration. `raw` holds the post-override document
/// (nlohmann keeps keys sorted, so its dump is canonical and `digest` is
/// independent of the field order in the file).
struct LoadedConfig {
  nlohmann::json raw;
  std::string digest;
  std::uint64_t seed = 0;
  SpectralBasis basis;
  PhysicsConfig physics;
  StepConfig step;

  /// Section accessor with empty-object default (e.g. "simulate", "sweep").
  nlohmann::json section(const std::string& name) const;
};

/// Applies a dotted-path override such as "physics.p=3" or
/// "sweep.scales=[1,10,100]". The value is parsed as JSON when possible and
/// kept as a string otherwise. Intermediate objects are created as needed.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Builds the typed configuration from a JSON document. `base_dir` anchors
/// relative file references (kernel matrix files). Configuration problems
/// throw std::invalid_argument.
LoadedConfig build_config(nlohmann::json config,
                          const std::filesystem::path& base_dir = ".");

/// Reads, overrides and builds a config file.
LoadedConfig load_config(const std::filesystem::path& path,
                         const std::vector<std::string>& overrides = {},
                         std::optional<std::uint64_t> seed_override = {});

/// Built-in default document (32-mode interval, cubic source, no kernel).
nlohmann::json default_config_json();

/// Modal vector from a config spec: {"type": "zero" | "modal_list" |
/// "pointwise_expr" | "random", ...}. `rng` is required only for "random".
Vector parse_vector_spec(const nlohmann::json& spec, const SpectralBasis& basis,
                         Rng* rng, const std::string& what);

/// Initial state from {"type": "zero" | "random" | "modal", ...}.
State parse_initial_state(const nlohmann::json& spec, const SpectralBasis& basis,
                          Rng& rng);

/// Kernel matrix file: binary when it starts with the 8-byte magic
/// "NLWKERN1" (u64 rows, u64 cols, row-major doubles), plain text otherwise
/// (whitespace-separated rows).
Matrix load_kernel_matrix_file(const std::filesystem::path& path);
void write_kernel_matrix_file(const std::filesystem::path& path,
                              const Matrix& matrix, bool binary);

}  // namespace nlwave
