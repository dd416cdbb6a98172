#pragma once

#include "curvlab/common.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace curvlab {

/// One comparison lhs <= rhs at an evaluation location.
struct EvalRecord {
  Vec x;
  double t = 0.0;
  double alpha = 0.0;
  /// Interpolation time for H(s) records; NaN elsewhere.
  double s = std::numeric_limits<double>::quiet_NaN();
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double std_error = 0.0;
  std::string note;
};

class InequalityReport {
 public:
  InequalityReport() = default;
  InequalityReport(std::string label, double tolerance, std::string engine = "");

  std::string label;
  std::string engine;
  double tolerance = 0.0;
  std::vector<EvalRecord> records;
  /// A failed hypothesis check makes the report fail regardless of its margins.
  bool precondition_ok = true;
  std::string precondition_note;

  /// Fills margin = rhs - lhs and appends.
  EvalRecord& add(EvalRecord record);
  void merge(const InequalityReport& other);

  /// Every margin >= -(tolerance + 4 std_error).
  bool pass() const;
  /// Record with the smallest margin after the noise allowance; nullptr when empty.
  const EvalRecord* worst() const;
  double worst_margin() const;
  std::size_t failures() const;

  nlohmann::json to_json() const;
  /// x,t,alpha,s,lhs,rhs,margin,std_error rows.
  std::string to_csv() const;
};

/// Evaluation grid for the local verifiers.
struct Schedule {
  std::vector<double> t{0.0, 0.1, 0.5, 1.0, 2.0};
  std::vector<double> alpha{0.0, 1.0};
  std::vector<Vec> x;
  int s_count = 21;

  /// The default schedule in one dimension: x in {-2,-1,-0.5,0,0.5,1,2}.
  static Schedule default_1d();
  static Schedule points_1d(const std::vector<double>& xs);
  void validate() const;
};

nlohmann::json to_json(const Vec& v);

}  // namespace curvlab
