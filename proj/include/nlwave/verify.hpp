#pragma once

#include <string>
#include <vector>

#include "nlwave/config_io.hpp"

namespace nlwave {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Property suite behind the `verify` subcommand: transform and Parseval
/// identities, Poincare margin, monotonicity sampling, radial-solve oracles,
/// kernel bound, accretivity, energy-identity refinement and assumption
/// validation, evaluated on the given configuration.
std::vector<CheckResult> run_verification(const LoadedConfig& config,
                                          std::uint64_t seed);

}  // namespace nlwave
