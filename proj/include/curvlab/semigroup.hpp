#pragma once

#include "curvlab/common.hpp"
#include "curvlab/potentials.hpp"
#include "curvlab/sde.hpp"
#include "curvlab/test_functions.hpp"

#include <string>
#include <vector>

namespace curvlab {

// Carre du champ calculus for L = Laplacian - grad V . grad.

double gamma(const TestFunction& f, const TestFunction& g, const Vec& x);
inline double gamma(const TestFunction& f, const Vec& x) { return gamma(f, f, x); }
/// ||Hess f||_F^2 + grad f^T Hess V grad f
double gamma2(const TestFunction& f, const Potential& potential, const Vec& x);
/// Gamma(Gamma(f)) = 4 |Hess f grad f|^2
double gamma_of_gamma(const TestFunction& f, const Vec& x);
/// Same quantity from central differences of Gamma(f), step 1e-4 (1 + |x|).
double gamma_of_gamma_fd(const TestFunction& f, const Vec& x);
/// Gamma_2(f) - rho(x) Gamma(f) - Gamma(Gamma(f)) / (4 Gamma(f)); domain error where Gamma(f) = 0.
double enhanced_gap(const TestFunction& f, const Potential& potential, const Vec& x);

// One-dimensional grid engine.

struct GridSpec {
  double lo = -8.0;
  double hi = 8.0;
  int m = 801;

  double spacing() const { return (hi - lo) / (m - 1); }
  double node(int i) const { return lo + (hi - lo) * i / (m - 1); }
  void validate() const;
};

class GridFunction {
 public:
  GridFunction(GridSpec spec, std::vector<double> values);
  static GridFunction sample(const GridSpec& spec, const PointFunction& f);

  const GridSpec& spec() const noexcept { return spec_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Cubic Lagrange interpolation on the four nearest nodes.
  double interpolate(double x) const;

  /// "node,value" rows with a header line.
  std::string to_csv() const;
  static GridFunction from_csv(const std::string& text);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Tridiagonal generator: row i is lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1].
struct GridGenerator {
  GridSpec spec;
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  /// L u computed from differences, so constants map to exactly zero.
  std::vector<double> apply(const std::vector<double>& u) const;
};

/// Symmetric finite-volume discretisation of e^V (e^{-V} u')' with reflecting ends.
GridGenerator grid_generator(const Potential& potential, const GridSpec& spec);

/// Crank-Nicolson for du/dt = L u over [0, t] with round(t/dt) equal steps.
GridFunction grid_apply(const GridGenerator& gen, const GridFunction& f, double t, double dt);

/// Mehler formula for the Gaussian potential by tensor Gauss-Hermite quadrature (n <= 3).
double mehler_apply(const PointFunction& f, int n, double t, const Vec& x, int order = 64);
inline double mehler_apply(const TestFunction& f, double t, const Vec& x, int order = 64) {
  return mehler_apply(f.value_fn(), f.dim(), t, x, order);
}

enum class EngineKind { Mehler, Grid, MonteCarlo };

std::string to_string(EngineKind kind);
EngineKind parse_engine_kind(const std::string& text);

struct EngineSpec {
  EngineKind kind = EngineKind::Mehler;
  int order = 64;
  GridSpec grid{};
  double grid_dt = 1e-3;
  SimulationSpec mc{};
};

/// P_t through one of three interchangeable back ends.
class SemigroupEngine {
 public:
  SemigroupEngine(Potential potential, EngineSpec spec);

  const Potential& potential() const noexcept { return potential_; }
  const EngineSpec& spec() const noexcept { return spec_; }
  EngineKind kind() const noexcept { return spec_.kind; }

  /// P_t f(x); deterministic engines report a zero standard error.
  Estimate apply(const PointFunction& f, double t, const Vec& x) const;
  /// P_t f at several points, sharing one grid evolution where possible.
  std::vector<Estimate> apply_many(const PointFunction& f, double t, const std::vector<Vec>& xs) const;
  /// grad P_t f(x): exact intertwining for Mehler, central differences (step = spacing) on the grid.
  Vec gradient(const TestFunction& f, double t, const Vec& x) const;

  /// P_t f and its gradient as functions of the starting point, for nesting inside another P_s.
  struct Evolved {
    PointFunction value;
    GradientFunction gradient;
  };
  Evolved evolve(const TestFunction& f, double t) const;

  /// Absolute accuracy this engine is trusted to (excluding Monte Carlo noise).
  double tolerance() const;
  std::string describe() const;

 private:
  Potential potential_;
  EngineSpec spec_;
  GridGenerator generator_;
};

/// Euler-Maruyama estimate of E_x f(X_t).
Estimate mc_apply(const SemigroupEngine& engine, const PointFunction& f, double t, const Vec& x);

}  // namespace curvlab
