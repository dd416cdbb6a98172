#pragma once

#include "curvlab/common.hpp"

#include <functional>
#include <vector>

namespace curvlab {

/// Nodes and weights integrating against the standard normal density (weights sum to 1).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached; safe to call concurrently.
const GaussHermiteRule& gauss_hermite(int order);

/// E[h(Y)] for Y standard normal in R^n by the tensor rule (n <= 3).
double gaussian_expectation(const std::function<double(ConstPoint)>& h, int n, int order);

/// Adaptive Gauss-Kronrod on [a, b]; infinite endpoints are allowed.
double integrate(const std::function<double(double)>& fn, double a, double b, double rel_tol = 1e-12,
                 double* error_estimate = nullptr);

}  // namespace curvlab
