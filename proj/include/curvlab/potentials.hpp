#pragma once

#include "curvlab/common.hpp"

#include <limits>
#include <optional>
#include <string>

namespace curvlab {

enum class PotentialKind { Gaussian, Spherical, ProductPower, DoubleWell, Custom };

/// V on R^n with closed-form derivatives. The generator is L = Laplacian - grad V . grad.
class Potential {
 public:
  Potential(int dim, std::string label, PointFunction value, GradientFunction gradient,
            HessianFunction hessian, PotentialKind kind = PotentialKind::Custom, double alpha = 0.0);

  int dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  PotentialKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  bool is_gaussian() const noexcept { return kind_ == PotentialKind::Gaussian; }

  double value(ConstPoint x) const { return value_(x); }
  void gradient(ConstPoint x, MutPoint out) const { gradient_(x, out); }
  Vec gradient(const Vec& x) const;
  Mat hessian(ConstPoint x) const { return hessian_(x); }
  Mat hessian(const Vec& x) const { return hessian_(as_span(x)); }

  /// Smallest Hessian eigenvalue. Uses the closed form when one was attached.
  double curvature(ConstPoint x) const;

  /// Attaches an exact expression for the smallest Hessian eigenvalue.
  Potential& with_curvature(PointFunction rho);
  /// Diagonal Hessian: the curvature is the smallest diagonal entry.
  Potential& with_diagonal_hessian();

 private:
  int dim_;
  std::string label_;
  PointFunction value_;
  GradientFunction gradient_;
  HessianFunction hessian_;
  PointFunction curvature_;
  bool diagonal_ = false;
  PotentialKind kind_;
  double alpha_;
};

double rho_min(const Potential& potential, ConstPoint x);
inline double rho_min(const Potential& potential, const Vec& x) { return rho_min(potential, as_span(x)); }

/// kind in {gaussian, spherical, product-power}; alpha in [1,2) for the non-gaussian kinds.
Potential make_example_potential(const std::string& kind, double alpha, int n);
Potential make_gaussian_potential(int n);
/// (x^2 - 1)^2 / 4 in one dimension; its curvature 3x^2 - 1 is negative near the origin.
Potential make_double_well();

/// gaussian[:n=], spherical:alpha=:n=, product-power:alpha=:n=, double-well
Potential parse_potential(const std::string& id);

/// f = log g with its gradient and Laplacian.
struct LogFunction {
  PointFunction value;
  GradientFunction gradient;
  PointFunction laplacian;
};

/// Lg/g for g = e^f: Laplacian f + |grad f|^2 - grad V . grad f.
double log_generator_ratio(const Potential& potential, const LogFunction& log_g, ConstPoint x);

struct ScanSpec {
  double radius = 50.0;
  int points_1d = 2001;
  int points_nd = 10000;
};

struct ScanResult {
  double worst_margin = std::numeric_limits<double>::infinity();
  Vec worst_point;
  std::size_t samples = 0;
  bool pass() const noexcept { return worst_margin >= 0.0; }
};

/// g = exp(f) >= 1 together with the constants of the local eigenvalue condition
/// Lg/g <= p rho - beta.
class LyapunovCertificate {
 public:
  LyapunovCertificate(int dim, std::string label, LogFunction log_g, double p, double beta);

  int dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  double p() const noexcept { return p_; }
  double beta() const noexcept { return beta_; }

  double log_g(ConstPoint x) const { return log_g_.value(x); }
  double g(ConstPoint x) const;
  void grad_log_g(ConstPoint x, MutPoint out) const { log_g_.gradient(x, out); }
  double laplacian_log_g(ConstPoint x) const { return log_g_.laplacian(x); }
  const LogFunction& log_function() const noexcept { return log_g_; }

  /// Lg/g = Laplacian f + |grad f|^2 - grad V . grad f
  double lg_over_g(const Potential& potential, ConstPoint x) const;

  // Construction metadata.
  std::string kind = "custom";
  double alpha = 0.0;
  double c = 0.0;
  double theta = 1.0;
  /// Calibrated constant for the middle spherical regime; NaN when the constants are explicit.
  double c_alpha = std::numeric_limits<double>::quiet_NaN();
  std::optional<ScanResult> scan;

 private:
  int dim_;
  std::string label_;
  LogFunction log_g_;
  double p_;
  double beta_;
};

/// g = 1 with the given constants.
LyapunovCertificate make_constant_certificate(int dim, double p, double beta);

/// p rho(x) - beta - Lg/g(x); nonnegative where the local eigenvalue condition holds.
double local_eigenvalue_margin(const Potential& potential, const LyapunovCertificate& cert, ConstPoint x);
inline double local_eigenvalue_margin(const Potential& potential, const LyapunovCertificate& cert, const Vec& x) {
  return local_eigenvalue_margin(potential, cert, as_span(x));
}

/// Scan points: uniform grid on [-R,R] in 1D; quasi-random points in the ball plus axis and
/// diagonal lines for n >= 2.
std::vector<Vec> scan_points(int n, const ScanSpec& spec);
ScanResult scan_certificate(const Potential& potential, const LyapunovCertificate& cert, const ScanSpec& spec = {});

/// kind in {spherical, product-power}. The certificate is built against the matching example
/// potential and always carries its scan result.
LyapunovCertificate make_lyapunov(const std::string& kind, double alpha, double p, int n, const ScanSpec& spec = {});

}  // namespace curvlab
