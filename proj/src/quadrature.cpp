#include "curvlab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace curvlab {

namespace {

GaussHermiteRule build_rule(int order) {
  // Golub-Welsch for the probabilists' Hermite recurrence, then one Newton polish per node.
  Mat jacobi = Mat::Zero(order, order);
  for (int k = 1; k < order; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi, Eigen::EigenvaluesOnly);

  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = es.eigenvalues()(i);
    double christoffel = 0.0;
    for (int pass = 0; pass < 3; ++pass) {
      // Orthonormal h_k: x h_k = sqrt(k+1) h_{k+1} + sqrt(k) h_{k-1}; h_k' = sqrt(k) h_{k-1}.
      double hm1 = 0.0, h = 1.0, dm1 = 0.0, d = 0.0;
      christoffel = 1.0;
      for (int k = 0; k < order; ++k) {
        const double hp = (x * h - std::sqrt(static_cast<double>(k)) * hm1) / std::sqrt(k + 1.0);
        const double dp = (h + x * d - std::sqrt(static_cast<double>(k)) * dm1) / std::sqrt(k + 1.0);
        hm1 = h;
        h = hp;
        dm1 = d;
        d = dp;
        if (k + 1 < order) christoffel += h * h;
      }
      if (pass < 2 && d != 0.0) x -= h / d;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / christoffel;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  if (order < 1 || order > 256) throw ParameterError("Gauss-Hermite order must lie in [1, 256]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(order));
  return *slot;
}

double gaussian_expectation(const std::function<double(ConstPoint)>& h, int n, int order) {
  if (n < 1 || n > 3) throw ParameterError("tensor Gauss-Hermite supports 1 <= n <= 3");
  const GaussHermiteRule& rule = gauss_hermite(order);
  const std::size_t m = rule.nodes.size();
  double y[3] = {0.0, 0.0, 0.0};
  double sum = 0.0;
  if (n == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      y[0] = rule.nodes[i];
      sum += rule.weights[i] * h({y, 1});
    }
    return sum;
  }
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= m;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      const std::size_t j = rest % m;
      rest /= m;
      y[d] = rule.nodes[j];
      w *= rule.weights[j];
    }
    sum += w * h({y, static_cast<std::size_t>(n)});
  }
  return sum;
}

double integrate(const std::function<double(double)>& fn, double a, double b, double rel_tol, double* error_estimate) {
  double err = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fn, a, b, 15, rel_tol, &err, &l1);
  if (!std::isfinite(value)) throw QuadratureError("non-finite integral on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  if (err > std::max(1e-9 * l1, 1e3 * rel_tol * l1) && err > 1e-14)
    throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                          "], error estimate " + std::to_string(err));
  if (error_estimate) *error_estimate = err;
  return value;
}

}  // namespace curvlab
