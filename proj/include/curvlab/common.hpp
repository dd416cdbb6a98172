#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using ConstPoint = std::span<const double>;
using MutPoint = std::span<double>;

/// Scalar function on R^n evaluated through a span.
using PointFunction = std::function<double(ConstPoint)>;
/// Writes a gradient into the output span (same length as the input).
using GradientFunction = std::function<void(ConstPoint, MutPoint)>;
using HessianFunction = std::function<Mat(ConstPoint)>;

inline ConstPoint as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline MutPoint as_span(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline Vec to_vec(ConstPoint p) { return Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size())); }

std::string format_point(ConstPoint x);
inline std::string format_point(const Vec& x) { return format_point(as_span(x)); }

/// Point estimate with its standard error (0 for deterministic evaluations).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (alpha out of range, unknown identifiers, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite intermediate while evaluating a closed form.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Linear solver / root bracketing failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, double exploded_fraction)
      : Error(what), exploded_fraction_(exploded_fraction) {}
  double exploded_fraction() const noexcept { return exploded_fraction_; }

 private:
  double exploded_fraction_;
};

class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, Vec worst_point, double worst_margin)
      : Error(what), worst_point_(std::move(worst_point)), worst_margin_(worst_margin) {}
  const Vec& worst_point() const noexcept { return worst_point_; }
  double worst_margin() const noexcept { return worst_margin_; }

 private:
  Vec worst_point_;
  double worst_margin_;
};

/// Worker count for parallel loops: CURVLAB_THREADS when set, else hardware concurrency.
unsigned worker_count();

/// Runs body(begin, end) over [0, n) split into contiguous chunks. Chunking never
/// changes results as long as body writes only to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace curvlab

namespace curvlab {

/// "name:key=value:key=value" identifiers used by the CLI and configs.
struct ParsedId {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

ParsedId parse_id(const std::string& id);

}  // namespace curvlab

namespace curvlab {

/// Real interval with open or closed, possibly infinite, endpoints.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval real_line() { return {}; }
  static Interval open(double a, double b) { return {a, b, false, false}; }
  static Interval closed(double a, double b) { return {a, b, true, true}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
  static Interval nonnegative() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }

  bool contains(double v) const {
    if (std::isnan(v)) return false;
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
  }
  /// True when every value of [a, b] lies inside this interval.
  bool contains_range(double a, double b) const {
    const bool low_ok = std::isinf(a) ? (a < 0 && std::isinf(lo) && lo < 0) : contains(a);
    const bool high_ok = std::isinf(b) ? (b > 0 && std::isinf(hi) && hi > 0) : contains(b);
    return low_ok && high_ok;
  }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  std::string str() const;
};

}  // namespace curvlab
