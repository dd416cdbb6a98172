#pragma once

#include "curvlab/common.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace curvlab {

/// M and its partial derivatives up to order two at one point.
struct MJet {
  double m = 0.0;
  double mx = 0.0;
  double my = 0.0;
  double mxx = 0.0;
  double mxy = 0.0;
  double myy = 0.0;
};

class MFunction {
 public:
  using ValueFn = std::function<double(double, double)>;
  using JetFn = std::function<MJet(double, double)>;

  MFunction(std::string label, ValueFn value, JetFn jet, Interval x_domain, Interval y_domain);

  const std::string& label() const noexcept { return label_; }
  const Interval& x_domain() const noexcept { return x_domain_; }
  const Interval& y_domain() const noexcept { return y_domain_; }

  /// Throws a domain error naming the offending argument.
  double value(double x, double y) const;
  MJet jet(double x, double y) const;

  /// a M + b x + c with a > 0.
  MFunction perturbed(double a, double b, double c) const;

  /// Asserted sign M_y >= 0; checked by check_my_sign, never assumed.
  bool my_nonnegative = true;
  /// Region sampled by default for certification.
  Interval sample_x;
  Interval sample_y = Interval::closed(1e-2, 10.0);

 private:
  std::string label_;
  ValueFn value_;
  JetFn jet_;
  Interval x_domain_;
  Interval y_domain_;
};

/// Names: poincare, reverse-poincare, log-sobolev, reverse-log-sobolev, bobkov,
/// beckner:p=, reverse-beckner:p=, exp-integrability, sqrt-y, y.
MFunction catalog(const std::string& id);
std::vector<std::string> catalog_names();

MFunction make_poincare();
MFunction make_reverse_poincare();
MFunction make_log_sobolev();
MFunction make_reverse_log_sobolev();
MFunction make_bobkov();
MFunction make_beckner(double p);
MFunction make_reverse_beckner(double p);
MFunction make_exp_integrability();
MFunction make_sqrt_y();
MFunction make_y();

enum class MatrixKind { Forward, Reverse, Integrated, IntegratedPrime };
std::string to_string(MatrixKind kind);
MatrixKind parse_matrix_kind(const std::string& text);

using Mat2 = Eigen::Matrix2d;

/// Forward:          [[Mxx + 2My,   Mxy], [Mxy, Myy + My/(2y)]]
/// Reverse:          [[Mxx - 2My,   Mxy], [Mxy, Myy + My/(2y)]]
/// Integrated:       [[Mxx + 2rho My, Mxy], [Mxy, Myy]]
/// IntegratedPrime:  [[Mxx + 2rho My, Mxy], [Mxy, Myy + My/(2y)]]
Mat2 condition_matrix(const MFunction& mf, MatrixKind kind, double x, double y, double rho = 1.0);

struct SampleSpec {
  double x_lo, x_hi;
  double y_lo, y_hi;
  int nx = 41;
  int ny = 41;
  /// Geometric spacing when the range is positive, else uniform.
  std::vector<double> xs() const;
  std::vector<double> ys() const;
};

/// Default rectangle: (0,inf) -> [0.1,10], R -> [-10,10], [0,1] -> [0.01,0.99]; y in [0.01,10].
SampleSpec default_sample(const MFunction& mf);

struct PsdReport {
  std::string mfunction;
  MatrixKind kind = MatrixKind::Forward;
  SampleSpec domain{};
  std::size_t samples = 0;
  double worst_trace = 0.0;
  double worst_det = 0.0;
  double worst_x = 0.0;
  double worst_y = 0.0;
  double tolerance = 1e-10;
  bool pass = false;
};

/// Trace and determinant of the matrix scaled by max(1, max |entry|) must both be >= -tol.
PsdReport certify_psd(const MFunction& mf, MatrixKind kind, const SampleSpec& spec, double rho = 1.0,
                      double tol = 1e-10);
inline PsdReport certify_psd(const MFunction& mf, MatrixKind kind, double rho = 1.0) {
  return certify_psd(mf, kind, default_sample(mf), rho);
}

struct SignReport {
  double worst_my = 0.0;
  double worst_x = 0.0;
  double worst_y = 0.0;
  bool pass = false;
};
SignReport check_my_sign(const MFunction& mf, const SampleSpec& spec, double tol = 1e-12);

}  // namespace curvlab
