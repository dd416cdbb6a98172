#include "curvlab/verify.hpp"

#include "curvlab/quadrature.hpp"
#include "curvlab/sde.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvlab {

double g_alpha(double t, double alpha, double rho) {
  if (rho == 0.0) return 2.0 * t + alpha;
  const double e = std::exp(-2.0 * rho * t);
  return -std::expm1(-2.0 * rho * t) / rho + alpha * e;
}

double h_alpha(double s, double t, double alpha, double rho) {
  const double tau = t - s;
  if (rho == 0.0) return 2.0 * tau + alpha;
  return std::expm1(2.0 * rho * tau) / rho + alpha * std::exp(2.0 * rho * tau);
}

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

std::string to_string(ConditionVariant v) { return v == ConditionVariant::Plain ? "plain" : "enhanced"; }

ConditionVariant parse_condition_variant(const std::string& text) {
  if (text == "plain") return ConditionVariant::Plain;
  if (text == "enhanced") return ConditionVariant::Enhanced;
  throw ParameterError("unknown condition variant '" + text + "'");
}

namespace {

void require_range(const MFunction& mf, const TestFunction& f) {
  if (!mf.x_domain().contains_range(f.range_lo, f.range_hi)) {
    std::ostringstream os;
    os << mf.label() << ": range [" << f.range_lo << ", " << f.range_hi << "] of " << f.label()
       << " is not inside " << mf.x_domain().str();
    throw DomainError(os.str());
  }
}

double squared_norm(const GradientFunction& grad, ConstPoint z) {
  double g[3] = {0.0, 0.0, 0.0};
  grad(z, {g, z.size()});
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += g[i] * g[i];
  return s;
}

double gamma_at(const TestFunction& f, ConstPoint z) {
  double g[3] = {0.0, 0.0, 0.0};
  f.gradient(z, {g, z.size()});
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += g[i] * g[i];
  return s;
}

// Both local verifiers share this loop; the weights pick the forward or reverse form.
struct LocalWeights {
  double lhs;
  double rhs;
};
using WeightFn = std::function<LocalWeights(double t, double alpha)>;

InequalityReport local_deterministic(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                                     const Schedule& schedule, const WeightFn& weights, InequalityReport report) {
  for (double t : schedule.t) {
    const auto inner = engine.evolve(f, t);
    for (double alpha : schedule.alpha) {
      const LocalWeights w = weights(t, alpha);
      PointFunction composite = [&mf, &f, w](ConstPoint z) { return mf.value(f.value(z), w.rhs * gamma_at(f, z)); };
      const std::vector<Estimate> rhs = engine.apply_many(composite, t, schedule.x);
      for (std::size_t i = 0; i < schedule.x.size(); ++i) {
        const ConstPoint x = as_span(schedule.x[i]);
        EvalRecord r;
        r.x = schedule.x[i];
        r.t = t;
        r.alpha = alpha;
        r.lhs = mf.value(inner.value(x), w.lhs * squared_norm(inner.gradient, x));
        r.rhs = rhs[i].mean;
        report.add(std::move(r));
      }
    }
  }
  return report;
}

// Monte Carlo in one dimension: the derivative of P_t f uses the first-variation weight
// exp(-int V''(X_s) ds), so value, gradient and right side all come from one batch.
InequalityReport local_monte_carlo(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                                   const Schedule& schedule, const WeightFn& weights, InequalityReport report) {
  const Potential& potential = engine.potential();
  if (potential.dim() != 1) throw ParameterError("Monte Carlo local verification is one-dimensional");
  PathIntegrands integrands;
  integrands.rate_a = [&potential](ConstPoint z) { return potential.hessian(z)(0, 0); };
  for (const Vec& x : schedule.x) {
    const PathBatch batch = simulate_paths(potential, x, schedule.t, engine.spec().mc, integrands);
    for (double t : schedule.t) {
      const std::size_t k = batch.snapshot_index(t);
      const Estimate a = path_average(batch, [&](std::size_t p) { return f.value(batch.state(k, p)); });
      const Estimate b = path_average(batch, [&](std::size_t p) {
        double d = 0.0;
        f.gradient(batch.state(k, p), {&d, 1});
        return d * std::exp(-batch.accumulated_a(k, p));
      });
      for (double alpha : schedule.alpha) {
        const LocalWeights w = weights(t, alpha);
        const Estimate rhs = path_average(batch, [&](std::size_t p) {
          const ConstPoint z = batch.state(k, p);
          return mf.value(f.value(z), w.rhs * gamma_at(f, z));
        });
        EvalRecord r;
        r.x = x;
        r.t = t;
        r.alpha = alpha;
        const double y = w.lhs * b.mean * b.mean;
        r.lhs = mf.value(a.mean, y);
        // Delta method on the left side, independent-sum approximation for the total.
        double se_lhs = 0.0;
        if (y > 0.0 || w.lhs == 0.0) {
          const MJet j = mf.jet(a.mean, y);
          const double gy = j.my * 2.0 * w.lhs * std::abs(b.mean) * b.std_error;
          if (std::isfinite(j.mx) && std::isfinite(gy)) se_lhs = std::hypot(j.mx * a.std_error, gy);
        }
        r.rhs = rhs.mean;
        r.std_error = std::hypot(se_lhs, rhs.std_error);
        report.add(std::move(r));
      }
    }
  }
  return report;
}

InequalityReport local_common(const std::string& label, const MFunction& mf, const SemigroupEngine& engine,
                              const TestFunction& f, const Schedule& schedule, const WeightFn& weights,
                              VerifyOptions options) {
  schedule.validate();
  require_range(mf, f);
  const double tol = options.tolerance >= 0.0 ? options.tolerance : engine.tolerance();
  InequalityReport report(label + "/" + mf.label() + "/" + f.label(), tol, engine.describe());
  if (engine.kind() == EngineKind::MonteCarlo) return local_monte_carlo(mf, engine, f, schedule, weights, report);
  return local_deterministic(mf, engine, f, schedule, weights, report);
}

}  // namespace

InequalityReport verify_local(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                              const Schedule& schedule, double rho, VerifyOptions options) {
  return local_common(
      "local", mf, engine, f, schedule,
      [rho](double t, double alpha) { return LocalWeights{alpha, g_alpha(t, alpha, rho)}; }, options);
}

InequalityReport verify_reverse_local(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                                      const Schedule& schedule, double rho, VerifyOptions options) {
  return local_common(
      "reverse-local", mf, engine, f, schedule,
      [rho](double t, double alpha) { return LocalWeights{h_alpha(0.0, t, alpha, rho), alpha}; }, options);
}

InequalityReport verify_H_monotone(const MFunction& mf, const SemigroupEngine& engine, const TestFunction& f,
                                   double t, double alpha, int s_count, const std::vector<Vec>& xs, double rho,
                                   Direction direction, VerifyOptions options) {
  if (s_count < 2) throw ParameterError("the s-grid needs at least two points");
  if (!(t >= 0.0)) throw ParameterError("t must be >= 0");
  if (engine.kind() == EngineKind::MonteCarlo) throw ParameterError("H(s) needs a deterministic engine");
  require_range(mf, f);
  const double tol = options.tolerance >= 0.0 ? options.tolerance : engine.tolerance();
  InequalityReport report("H-monotone-" + to_string(direction) + "/" + mf.label() + "/" + f.label(), tol,
                          engine.describe());

  std::vector<std::vector<double>> H(s_count, std::vector<double>(xs.size()));
  for (int i = 0; i < s_count; ++i) {
    const double s = t * i / (s_count - 1);
    const double w = direction == Direction::Forward ? g_alpha(s, alpha, rho) : h_alpha(s, t, alpha, rho);
    const auto inner = engine.evolve(f, t - s);
    PointFunction composite = [&mf, &inner, w](ConstPoint z) {
      return mf.value(inner.value(z), w * squared_norm(inner.gradient, z));
    };
    const std::vector<Estimate> vals = engine.apply_many(composite, s, xs);
    for (std::size_t j = 0; j < xs.size(); ++j) H[i][j] = vals[j].mean;
  }
  for (std::size_t j = 0; j < xs.size(); ++j) {
    for (int i = 0; i + 1 < s_count; ++i) {
      EvalRecord r;
      r.x = xs[j];
      r.t = t;
      r.alpha = alpha;
      r.s = t * i / (s_count - 1);
      r.lhs = H[i][j];
      r.rhs = H[i + 1][j];
      report.add(std::move(r));
    }
  }
  return report;
}

GibbsMeasure::GibbsMeasure(const Potential& potential, const QuadratureSpec& spec)
    : potential_(potential), spec_(spec) {
  if (potential.dim() != 1) throw ParameterError("integrated checks are one-dimensional");
  const double zero = 0.0;
  v0_ = potential.value({&zero, 1});
  auto rise = [&](double w) {
    const double a = -w, b = w;
    return std::min(potential.value({&a, 1}), potential.value({&b, 1})) - v0_;
  };
  window_ = spec.window;
  while (rise(window_) < spec.confinement) {
    window_ *= 1.5;
    if (window_ > 1e6) throw QuadratureError("potential is not confining enough to normalize " + potential.label());
  }
  auto density = [this](double x) { return std::exp(-(potential_.value({&x, 1}) - v0_)); };
  z_ = integrate(density, -window_, window_, spec.rel_tol);
  const double wide = integrate(density, -2.0 * window_, 2.0 * window_, spec.rel_tol);
  if (!(z_ > 0.0) || !std::isfinite(z_)) throw QuadratureError("normalization failed for " + potential.label());
  tail_ = std::max(0.0, 1.0 - z_ / wide);
  if (tail_ > spec.tail_tolerance) {
    std::ostringstream os;
    os << "tail mass " << tail_ << " outside [-" << window_ << ", " << window_ << "] exceeds "
       << spec.tail_tolerance;
    throw QuadratureError(os.str());
  }
}

double GibbsMeasure::expect(const std::function<double(double)>& fn) const {
  auto integrand = [&](double x) {
    const double w = std::exp(-(potential_.value({&x, 1}) - v0_));
    return w == 0.0 ? 0.0 : fn(x) * w;
  };
  return integrate(integrand, -window_, window_, spec_.rel_tol) / z_;
}

double GibbsMeasure::expect(const std::function<double(double)>& fn, const std::vector<double>& breakpoints) const {
  std::vector<double> cuts{-window_};
  for (double b : breakpoints)
    if (b > -window_ && b < window_) cuts.push_back(b);
  cuts.push_back(window_);
  std::sort(cuts.begin(), cuts.end());
  auto integrand = [&](double x) {
    const double w = std::exp(-(potential_.value({&x, 1}) - v0_));
    return w == 0.0 ? 0.0 : fn(x) * w;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += integrate(integrand, cuts[i], cuts[i + 1], spec_.rel_tol);
  return total / z_;
}

std::vector<double> critical_points(const TestFunction& f, double lo, double hi, int scan) {
  auto slope = [&f](double x) {
    double d = 0.0;
    f.gradient(ConstPoint{&x, 1}, {&d, 1});
    return d;
  };
  std::vector<double> roots;
  double a = lo, fa = slope(lo);
  for (int i = 1; i <= scan; ++i) {
    const double b = lo + (hi - lo) * i / scan;
    const double fb = slope(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      std::uintmax_t iters = 100;
      const auto [r0, r1] = boost::math::tools::toms748_solve(slope, a, b, fa, fb,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(0.5 * (r0 + r1));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(a);
  return roots;
}

InequalityReport verify_integrated_limit(const MFunction& mf, const Potential& potential, const TestFunction& f,
                                         const QuadratureSpec& spec, double rho) {
  if (!(rho > 0.0)) throw ParameterError("the integrated limit needs rho > 0");
  require_range(mf, f);
  const GibbsMeasure mu(potential, spec);
  const double mean = mu.expect([&](double x) { return f.value(ConstPoint{&x, 1}); });
  // Functions of Gamma(f) such as sqrt can kink where f' vanishes.
  const std::vector<double> kinks = critical_points(f, -mu.window(), mu.window());
  const double rhs = mu.expect(
      [&](double x) { return mf.value(f.value(ConstPoint{&x, 1}), gamma_at(f, ConstPoint{&x, 1}) / rho); }, kinks);
  InequalityReport report("integrated-limit/" + mf.label() + "/" + f.label(), spec.tolerance,
                          "quadrature(" + potential.label() + ")");
  EvalRecord r;
  r.x = Vec::Zero(1);
  r.t = std::numeric_limits<double>::infinity();
  r.lhs = mf.value(mean, 0.0);
  r.rhs = rhs;
  report.add(std::move(r));
  return report;
}

InequalityReport verify_exp_integrability_bound(const Potential& potential, const TestFunction& h,
                                                const QuadratureSpec& spec, double rho) {
  if (!(rho > 0.0)) throw ParameterError("the integrated limit needs rho > 0");
  const GibbsMeasure mu(potential, spec);
  const double log_mgf = std::log(mu.expect([&](double x) { return std::exp(h.value(ConstPoint{&x, 1})); }));
  const double mean = mu.expect([&](double x) { return h.value(ConstPoint{&x, 1}); });
  const double bound = 10.0 * mu.expect(
                                 [&](double x) {
                                   const double g = gamma_at(h, ConstPoint{&x, 1}) / rho;
                                   return std::exp(0.5 * g) / (1.0 + std::sqrt(g));
                                 },
                                 critical_points(h, -mu.window(), mu.window()));
  InequalityReport report("exp-integrability-bound/" + h.label(), spec.tolerance,
                          "quadrature(" + potential.label() + ")");
  EvalRecord r;
  r.x = Vec::Zero(1);
  r.t = std::numeric_limits<double>::infinity();
  r.lhs = log_mgf - mean;
  r.rhs = bound;
  report.add(std::move(r));
  return report;
}

InequalityReport verify_integrated_condition(const MFunction& mf, const Potential& potential, const TestFunction& f,
                                             const QuadratureSpec& spec, double rho, ConditionVariant variant) {
  require_range(mf, f);
  const GibbsMeasure mu(potential, spec);
  auto weight = [&](const Vec& z, double g) { return mf.jet(f.value(z), g).my; };
  const double curvature_side = mu.expect([&](double x) {
    const Vec z = Vec::Constant(1, x);
    const double g = gamma(f, z);
    return weight(z, g) * gamma2(f, potential, z);
  });
  const double gradient_side = mu.expect([&](double x) {
    const Vec z = Vec::Constant(1, x);
    const double g = gamma(f, z);
    double v = rho * g;
    if (variant == ConditionVariant::Enhanced) {
      // Gamma(Gamma f) / (4 Gamma f) = |Hess f grad f|^2 / |grad f|^2, bounded by ||Hess f||^2 at critical points.
      const Mat hess = f.hessian(z);
      v += g > 0.0 ? gamma_of_gamma(f, z) / (4.0 * g) : hess.squaredNorm();
    }
    return weight(z, g) * v;
  });
  InequalityReport report("integrated-condition-" + to_string(variant) + "/" + mf.label() + "/" + f.label(),
                          spec.tolerance, "quadrature(" + potential.label() + ")");
  EvalRecord r;
  r.x = Vec::Zero(1);
  r.t = std::numeric_limits<double>::infinity();
  r.lhs = gradient_side;
  r.rhs = curvature_side;
  r.note = to_string(variant);
  report.add(std::move(r));
  return report;
}

}  // namespace curvlab
