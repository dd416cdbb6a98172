#pragma once

#include "curvlab/common.hpp"
#include "curvlab/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace curvlab {

constexpr int kDegreeCap = 32;

/// Polynomial in monomial coefficients: sum_k c[k] x^k.
class PolySeries {
 public:
  PolySeries() = default;
  explicit PolySeries(std::vector<double> coeffs);
  static PolySeries monomial(int k, double c = 1.0);

  const std::vector<double>& coeffs() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  double operator()(double x) const;

  PolySeries derivative() const;
  /// Ornstein-Uhlenbeck generator p'' - x p'.
  PolySeries apply_L() const;
  /// Integral against the standard Gaussian, from the moments (2m-1)!!.
  double gaussian_mean() const;

  friend PolySeries operator+(const PolySeries& a, const PolySeries& b);
  friend PolySeries operator-(const PolySeries& a, const PolySeries& b);
  friend PolySeries operator*(const PolySeries& a, const PolySeries& b);
  friend PolySeries operator*(double s, const PolySeries& a);

 private:
  void trim();
  std::vector<double> c_;
};

/// Coefficients in the orthonormal Hermite basis h_k = He_k / sqrt(k!) of the standard Gaussian.
class HermiteSeries {
 public:
  HermiteSeries() = default;
  explicit HermiteSeries(std::vector<double> coeffs);

  const std::vector<double>& coeffs() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  double coefficient(int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }

  double mean() const { return coefficient(0); }
  /// Parseval: sum over k >= 1 of c_k^2.
  double variance() const;

 private:
  std::vector<double> c_;
};

HermiteSeries expand(const PolySeries& f);
PolySeries to_poly(const HermiteSeries& s);

HermiteSeries apply_L(const HermiteSeries& s);
HermiteSeries apply_Pt(const HermiteSeries& s, double t);
HermiteSeries apply_Lk(const HermiteSeries& s, int k);

/// Bilinear Q_k(g, h) from Q_1(g, h) = g'h' and
/// Q_{i+1}(g, h) = -lambda_i Q_i(g, h) + L Q_i(g, h) / 2 - (Q_i(g, L h) + Q_i(L g, h)) / 2.
PolySeries Q_bilinear(const PolySeries& g, const PolySeries& h, int k, const std::vector<double>& lambdas);
/// Q_k(f) = Q_k(f, f). lambdas[i-1] is lambda_i; defaults to lambda_i = i when empty.
PolySeries Q_iterate(const PolySeries& f, int k, std::vector<double> lambdas = {});

/// int (f^{(k)})^2 dgamma by monomial arithmetic (independent of the Hermite route).
double derivative_square_mean(const PolySeries& f, int k);

struct HoudreKagan {
  double lower = 0.0;  // S_{2N}
  double upper = 0.0;  // S_{2N-1}
  double variance = 0.0;
  /// derivative_integrals[k-1] = int (f^{(k)})^2 dgamma from the Hermite coefficients.
  std::vector<double> derivative_integrals;
  /// partial_sums[m-1] = sum_{k<=m} (-1)^{k+1} D_k / k!
  std::vector<double> partial_sums;
};
HoudreKagan houdre_kagan(const PolySeries& f, int N);

/// Alternating bounds Var <= S_n (n odd) and S_n <= Var (n even) with S_n built from int Q_i dgamma,
/// for n = 1..n_max, plus a cross-check against houdre_kagan.
InequalityReport variance_bracket_check(const PolySeries& f, int n_max, std::vector<double> lambdas = {});

/// M(x_0, ..., x_k, y) with its gradient and Hessian; arguments are (f, Lf, ..., L^k f, y).
struct MultiMFunction {
  std::string label;
  int k = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

/// -c x0^2 - eps x0 x1 + a x1^2 + y (k = 1), or -x0^2 + y when k = 0.
MultiMFunction make_quadratic_multi(int k, double c, double eps, double a);

struct MultiSample {
  double radius = 5.0;
  double y_lo = 1e-2;
  double y_hi = 10.0;
  int points = 2000;
};

/// Samples the (k+2)x(k+2) matrix with entry (0,0) raised by 2 M_y, off-diagonal M_ij <= 0 for
/// i != j among the x arguments, and M_y >= 0. Empty string means all checks passed.
std::string multi_hypotheses(const MultiMFunction& m, const MultiSample& sample = {});

/// M(P_t f, L P_t f, ..., alpha Gamma(P_t f)) <= P_t M(f, Lf, ..., g_alpha(t) Gamma(f)) for the
/// Ornstein-Uhlenbeck semigroup (rho = 1).
InequalityReport generalized_local_check(const MultiMFunction& m, const PolySeries& f, double t, double alpha,
                                         const std::vector<double>& xs, const MultiSample& sample = {});

}  // namespace curvlab
