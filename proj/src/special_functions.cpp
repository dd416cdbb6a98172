#include "curvlab/special_functions.hpp"

#include "curvlab/common.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <algorithm>
#include <mutex>
#include <vector>

namespace curvlab {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kTailSwitch = -5.0;
constexpr double kUpperBracket = 40.0;
constexpr double kSmallS = 1e-6;

double normal_quantile(double x) { return -M_SQRT2 * boost::math::erfc_inv(2.0 * x); }

// Tails t_j = j / (z + t_{j+1}) of the Mills-ratio continued fraction; returns t_1, t_2.
void mills_tails(double z, double& t1, double& t2) {
  double t = 0.0;
  double prev = 0.0;
  for (int j = 400; j >= 1; --j) {
    prev = t;
    t = j / (z + t);
  }
  t1 = t;
  t2 = prev;
}

void check_monotone_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    double prev = -1.0;
    for (int i = 0; i <= 4000; ++i) {
      const double u = -kUpperBracket + 2.0 * kUpperBracket * i / 4000.0;
      const double k1 = exp_integrability_k(u).k1;
      if (!(k1 > prev)) throw NumericalError("k' is not increasing near u = " + std::to_string(u));
      prev = k1;
    }
  });
}

struct CumulativeTable {
  std::vector<double> nodes;
  std::vector<double> cumulative;
};

double segment_integral(double a, double b) {
  if (b == a) return 0.0;
  auto integrand = [](double u) {
    const KJet j = exp_integrability_k(u);
    return j.k2 / j.r;
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(integrand, a, b);
}

// Geometric nodes in the Mills-ratio tail, uniform ones above it.
const CumulativeTable& cumulative_table() {
  static const CumulativeTable table = [] {
    CumulativeTable t;
    const double u0 = exp_integrability_k_inverse(kSmallS);
    std::vector<double> tail;
    for (double z = -kTailSwitch; z < -u0; z *= 1.05) tail.push_back(-z);
    t.nodes.push_back(u0);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) t.nodes.push_back(*it);
    for (double u = kTailSwitch + 0.05; u < kUpperBracket + 0.05; u += 0.05) t.nodes.push_back(u);
    t.cumulative.resize(t.nodes.size());
    t.cumulative[0] = 0.5 * kSmallS * kSmallS;
    for (std::size_t i = 1; i < t.nodes.size(); ++i)
      t.cumulative[i] = t.cumulative[i - 1] + segment_integral(t.nodes[i - 1], t.nodes[i]);
    return t;
  }();
  return table;
}

}  // namespace

double isoperimetric_I(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("isoperimetric profile needs x in [0,1], got " + std::to_string(x));
  if (x == 0.0 || x == 1.0) return 0.0;
  const double q = normal_quantile(x);
  return std::exp(-0.5 * q * q - kHalfLog2Pi);
}

double isoperimetric_I_prime(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("I' needs x in (0,1), got " + std::to_string(x));
  return -normal_quantile(x);
}

double isoperimetric_I_second(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("I'' needs x in (0,1), got " + std::to_string(x));
  return -1.0 / isoperimetric_I(x);
}

KJet exp_integrability_k(double u) {
  KJet j{};
  if (u <= kTailSwitch) {
    // With z = -u: r = z + t1, k' = t1, k'' = 1 - r k' = (t2 - t1) / (z + t2).
    const double z = -u;
    double t1 = 0.0, t2 = 0.0;
    mills_tails(z, t1, t2);
    j.r = z + t1;
    j.k = -std::log(j.r);
    j.k1 = t1;
    j.k2 = (t2 - t1) / (z + t2);
    return j;
  }
  const double log_Phi = std::log(0.5 * boost::math::erfc(-u / M_SQRT2));
  const double log_r = -0.5 * u * u - kHalfLog2Pi - log_Phi;
  j.r = std::exp(log_r);
  j.k = -log_r;
  j.k1 = u + j.r;
  j.k2 = 1.0 - j.r * j.k1;
  return j;
}

double exp_integrability_k_inverse(double s) {
  if (!(s > 0.0)) throw DomainError("k' inverse needs s > 0, got " + std::to_string(s));
  check_monotone_once();
  if (s > exp_integrability_k(kUpperBracket).k1)
    throw NumericalError("k' inversion bracket exceeded at s = " + std::to_string(s));
  double lo = -kUpperBracket;
  while (exp_integrability_k(lo).k1 > s) {
    lo *= 2.0;
    if (lo < -1e12) throw NumericalError("k' inversion lower bracket failed at s = " + std::to_string(s));
  }
  auto fn = [s](double u) { return exp_integrability_k(u).k1 - s; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(fn, lo, kUpperBracket, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

double exp_integrability_F_prime(double s) {
  if (!(s >= 0.0)) throw DomainError("F' needs s >= 0, got " + std::to_string(s));
  if (s < kSmallS) return s;
  const double v = std::exp(exp_integrability_k(exp_integrability_k_inverse(s)).k);
  if (!std::isfinite(v)) throw EvaluationError("F' overflows at s = " + std::to_string(s));
  return v;
}

double exp_integrability_F_second(double s) {
  if (!(s >= 0.0)) throw DomainError("F'' needs s >= 0, got " + std::to_string(s));
  if (s < kSmallS) return 1.0;
  const double u = exp_integrability_k_inverse(s);
  if (u <= kTailSwitch) {
    double t1 = 0.0, t2 = 0.0;
    mills_tails(-u, t1, t2);
    const double z = -u;
    return t1 * (z + t2) / ((z + t1) * (t2 - t1));
  }
  const KJet j = exp_integrability_k(u);
  const double v = s / (j.r * j.k2);
  if (!std::isfinite(v)) throw EvaluationError("F'' overflows at s = " + std::to_string(s));
  return v;
}

double exp_integrability_F(double s) {
  if (!(s >= 0.0)) throw DomainError("F needs s >= 0, got " + std::to_string(s));
  if (s == 0.0) return 0.0;
  if (s < kSmallS) return 0.5 * s * s;
  // Substituting tau = k'(u) turns F into a cumulative integral of exp(k) k'' in u, so a
  // single inversion per call suffices. Segment integrals are tabulated once.
  const CumulativeTable& table = cumulative_table();
  const double u = exp_integrability_k_inverse(s);
  auto it = std::upper_bound(table.nodes.begin(), table.nodes.end(), u);
  const std::size_t i = it == table.nodes.begin() ? 0 : static_cast<std::size_t>(it - table.nodes.begin()) - 1;
  const double value = table.cumulative[i] + segment_integral(table.nodes[i], u);
  if (!std::isfinite(value)) throw EvaluationError("F overflows at s = " + std::to_string(s));
  return value;
}

}  // namespace curvlab
