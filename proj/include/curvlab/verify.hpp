#pragma once

#include "curvlab/common.hpp"
#include "curvlab/mfunctions.hpp"
#include "curvlab/potentials.hpp"
#include "curvlab/report.hpp"
#include "curvlab/semigroup.hpp"
#include "curvlab/test_functions.hpp"

namespace curvlab {

/// (1 - e^{-2 rho t}) / rho + alpha e^{-2 rho t}; 2t + alpha at rho = 0.
double g_alpha(double t, double alpha, double rho);
/// (e^{2 rho (t-s)} - 1) / rho + alpha e^{2 rho (t-s)}; 2(t-s) + alpha at rho = 0.
double h_alpha(double s, double t, double alpha, double rho);

/// Negative tolerance means "use the engine's own tolerance".
struct VerifyOptions {
  double tolerance = -1.0;
};

/// M(P_t f, alpha Gamma(P_t f)) <= P_t M(f, g_alpha(t) Gamma(f)) over the schedule.
InequalityReport verify_local(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                              const Schedule& schedule, double rho, VerifyOptions options = {});

/// M(P_t f, h_alpha(0) Gamma(P_t f)) <= P_t M(f, alpha Gamma(f)) over the schedule.
InequalityReport verify_reverse_local(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                                      const Schedule& schedule, double rho, VerifyOptions options = {});

enum class Direction { Forward, Reverse };
std::string to_string(Direction d);

/// H(s) = P_s M(P_{t-s} f, w(s) Gamma(P_{t-s} f)) on a uniform s-grid; margins are consecutive
/// differences. w = g_alpha (forward) or h_alpha (reverse).
InequalityReport verify_H_monotone(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                                   double t, double alpha, int s_count, const std::vector<Vec>& xs, double rho,
                                   Direction direction, VerifyOptions options = {});

/// Integration against mu = e^{-V} / Z on a symmetric window in one dimension.
struct QuadratureSpec {
  /// Initial half-width; grown until V rises by `confinement` above its value at 0.
  double window = 10.0;
  double confinement = 50.0;
  double tail_tolerance = 1e-8;
  double rel_tol = 1e-12;
  /// Pass tolerance for the quadrature reports (absorbs rounding in equality cases).
  double tolerance = 1e-9;
};

/// Normalized expectation operator for a one-dimensional potential.
class GibbsMeasure {
 public:
  GibbsMeasure(const Potential& potential, const QuadratureSpec& spec = {});
  double expect(const std::function<double(double)>& fn) const;
  /// Splits the window at the given points, for integrands with kinks there.
  double expect(const std::function<double(double)>& fn, const std::vector<double>& breakpoints) const;
  double window() const noexcept { return window_; }
  double normalizer() const noexcept { return z_; }
  double tail_mass() const noexcept { return tail_; }

 private:
  Potential potential_;
  QuadratureSpec spec_;
  double v0_ = 0.0;
  double window_ = 0.0;
  double z_ = 0.0;
  double tail_ = 0.0;
};

/// Zeros of f' inside [lo, hi], located by a sign scan and root polishing.
std::vector<double> critical_points(const TestFunction& f, double lo, double hi, int scan = 4000);

/// M(int f dmu, 0) <= int M(f, Gamma(f)/rho) dmu.
InequalityReport verify_integrated_limit(const MFunction& mf, const Potential& potential, const TestFunction& f,
                                         const QuadratureSpec& spec, double rho);

/// log int e^h dmu - int h dmu <= 10 int e^{Gamma(h)/(2 rho)} / (1 + sqrt(Gamma(h)/rho)) dmu.
InequalityReport verify_exp_integrability_bound(const Potential& potential, const TestFunction& h,
                                                const QuadratureSpec& spec, double rho);

enum class ConditionVariant { Plain, Enhanced };
std::string to_string(ConditionVariant v);
ConditionVariant parse_condition_variant(const std::string& text);

/// rho int M_y Gamma(f) dmu [+ int M_y Gamma(Gamma(f)) / (4 Gamma(f)) dmu] <= int M_y Gamma_2(f) dmu,
/// with M_y evaluated at (f, Gamma(f)).
InequalityReport verify_integrated_condition(const MFunction& mf, const Potential& potential, const TestFunction& f,
                                             const QuadratureSpec& spec, double rho, ConditionVariant variant);

}  // namespace curvlab
