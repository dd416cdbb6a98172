#pragma once

#include "curvlab/config.hpp"
#include "curvlab/mfunctions.hpp"
#include "curvlab/report.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace curvlab {

struct CheckResult {
  std::string id;
  bool pass = false;
  bool expected_fail = false;
  /// pass != expected_fail
  bool ok() const noexcept { return pass != expected_fail; }
  double worst_margin = 0.0;
  InequalityReport report;
};

struct RunSummary {
  std::string config_hash;
  std::string engine;
  std::vector<CheckResult> checks;  // sorted by id
  double wall_seconds = 0.0;
  bool ok() const;
  /// Deterministic content: no timing fields.
  nlohmann::json report_json() const;
  nlohmann::json summary_json() const;
};

/// Validates, runs every selected check, and writes report.json (or CSV tables) plus
/// summary.json to config.out_dir when it is set.
RunSummary run(const ExperimentConfig& config);

/// PSD certification expressed as a one-record report (margin = worst scaled trace/det).
InequalityReport psd_as_report(const PsdReport& psd);
nlohmann::json to_json(const PsdReport& psd);

/// Potentials, M-functions, test functions and presets, one section each.
std::string list_catalogs();

/// t,alpha,x,margin rows.
std::string margin_curve_csv(const InequalityReport& report);
/// s,H rows for one start point of an H(s) report (s_count rows).
std::string h_curve_csv(const InequalityReport& monotone, const Vec& x);
/// Writes <label>.margins.csv and, for H(s) reports, <label>.H.<i>.csv per start point.
std::vector<std::string> emit_plot_data(const InequalityReport& report, const std::string& dir);

std::string sanitize_filename(const std::string& label);

}  // namespace curvlab
