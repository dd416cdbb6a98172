#pragma once

#include "curvlab/common.hpp"
#include "curvlab/report.hpp"
#include "curvlab/semigroup.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace curvlab {

/// Everything a batch run needs. Lists are comma separated in the key-value format.
struct ExperimentConfig {
  std::string name = "custom";
  std::string potential = "gaussian";
  std::vector<std::string> mfunctions;
  /// Test-function ids; empty means the catalog suite filtered by each M-function's domain.
  std::vector<std::string> functions;
  /// Subset of: psd, local, reverse, monotone, integrated-limit, integrated-condition.
  std::vector<std::string> checks{"psd", "local"};
  /// Checks whose failure is the expected outcome.
  std::vector<std::string> expect_fail;
  double rho = 1.0;
  std::string engine = "mehler";
  int order = 64;
  GridSpec grid{};
  double grid_dt = 1e-3;
  SimulationSpec mc{};
  Schedule schedule = Schedule::default_1d();
  /// Negative means each check uses its engine's tolerance.
  double tolerance = -1.0;
  std::string out_dir;
  std::string format = "json";

  void validate() const;
  /// Sorted key=value lines; the input for the hash.
  std::map<std::string, std::string> canonical() const;
  /// FNV-1a over the canonical form, as 16 hex digits.
  std::string hash() const;
};

/// Flat "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config_text(const std::string& text);
/// JSON object with the same keys; list values may be JSON arrays.
ExperimentConfig parse_config_json(const std::string& text);
/// Chooses the parser from the first non-blank character.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// ou-local-suite, doublewell-falsify
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

std::uint64_t fnv1a(const std::string& text);

}  // namespace curvlab
