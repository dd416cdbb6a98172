#include "curvlab/semigroup.hpp"

#include "curvlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <iomanip>
#include <sstream>

namespace curvlab {

double gamma(const TestFunction& f, const TestFunction& g, const Vec& x) {
  if (f.dim() != g.dim() || f.dim() != x.size()) throw ParameterError("gamma: dimension mismatch");
  return f.gradient(x).dot(g.gradient(x));
}

double gamma2(const TestFunction& f, const Potential& potential, const Vec& x) {
  if (f.dim() != potential.dim()) throw ParameterError("gamma2: dimension mismatch");
  const Vec g = f.gradient(x);
  return f.hessian(x).squaredNorm() + g.dot(potential.hessian(x) * g);
}

double gamma_of_gamma(const TestFunction& f, const Vec& x) {
  const Vec hg = f.hessian(x) * f.gradient(x);
  return 4.0 * hg.squaredNorm();
}

double gamma_of_gamma_fd(const TestFunction& f, const Vec& x) {
  const double h = 1e-4 * (1.0 + x.norm());
  double sum = 0.0;
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    const double d = (f.gradient(xp).squaredNorm() - f.gradient(xm).squaredNorm()) / (2.0 * h);
    sum += d * d;
    xp(i) = xm(i) = x(i);
  }
  return sum;
}

double enhanced_gap(const TestFunction& f, const Potential& potential, const Vec& x) {
  const double g = gamma(f, x);
  if (!(g > 0.0)) throw DomainError("enhanced gap undefined at critical point " + format_point(x));
  return gamma2(f, potential, x) - rho_min(potential, x) * g - gamma_of_gamma(f, x) / (4.0 * g);
}

void GridSpec::validate() const {
  if (m < 3) throw ParameterError("grid needs at least 3 nodes, got " + std::to_string(m));
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw ParameterError("grid requires finite lo < hi");
}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != static_cast<std::size_t>(spec_.m))
    throw ParameterError("grid function has " + std::to_string(values_.size()) + " values for " +
                         std::to_string(spec_.m) + " nodes");
  for (double v : values_)
    if (!std::isfinite(v)) throw EvaluationError("non-finite grid value");
}

GridFunction GridFunction::sample(const GridSpec& spec, const PointFunction& f) {
  spec.validate();
  std::vector<double> v(spec.m);
  for (int i = 0; i < spec.m; ++i) {
    const double x = spec.node(i);
    v[i] = f({&x, 1});
  }
  return GridFunction(spec, std::move(v));
}

double GridFunction::interpolate(double x) const {
  const double h = spec_.spacing();
  if (x < spec_.lo - 1e-12 * h || x > spec_.hi + 1e-12 * h)
    throw DomainError("point " + std::to_string(x) + " lies outside the grid");
  int base = static_cast<int>(std::floor((x - spec_.lo) / h)) - 1;
  base = std::clamp(base, 0, spec_.m - 4 < 0 ? 0 : spec_.m - 4);
  const int count = std::min(4, spec_.m);
  double sum = 0.0;
  for (int j = 0; j < count; ++j) {
    double w = 1.0;
    const double xj = spec_.node(base + j);
    for (int k = 0; k < count; ++k)
      if (k != j) w *= (x - spec_.node(base + k)) / (xj - spec_.node(base + k));
    sum += w * values_[base + j];
  }
  return sum;
}

std::string GridFunction::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "node,value\n";
  for (int i = 0; i < spec_.m; ++i) os << spec_.node(i) << ',' << values_[i] << '\n';
  return os.str();
}

GridFunction GridFunction::from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<double> nodes;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("node", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParameterError("malformed grid CSV row '" + line + "'");
    nodes.push_back(std::stod(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (nodes.size() < 3) throw ParameterError("grid CSV needs at least 3 rows");
  GridSpec spec{nodes.front(), nodes.back(), static_cast<int>(nodes.size())};
  const double h = spec.spacing();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (std::abs(nodes[i] - spec.node(static_cast<int>(i))) > 1e-9 * (1.0 + std::abs(h)))
      throw ParameterError("grid CSV nodes are not uniform");
  return GridFunction(spec, std::move(values));
}

std::vector<double> GridGenerator::apply(const std::vector<double>& u) const {
  const std::size_t m = diag.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += lower[i] * (u[i - 1] - u[i]);
    if (i + 1 < m) r += upper[i] * (u[i + 1] - u[i]);
    out[i] = r;
  }
  return out;
}

GridGenerator grid_generator(const Potential& potential, const GridSpec& spec) {
  if (potential.dim() != 1) throw ParameterError("the grid engine is one-dimensional");
  spec.validate();
  const int m = spec.m;
  const double h = spec.spacing();
  const double inv_h2 = 1.0 / (h * h);
  auto V = [&](double x) { return potential.value({&x, 1}); };

  GridGenerator gen;
  gen.spec = spec;
  gen.lower.assign(m, 0.0);
  gen.upper.assign(m, 0.0);
  gen.diag.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double x = spec.node(i);
    const double vi = V(x);
    // Half cells at the ends carry twice the interior flux weight.
    const double end_factor = (i == 0 || i == m - 1) ? 2.0 : 1.0;
    if (i > 0) gen.lower[i] = end_factor * std::exp(vi - V(x - 0.5 * h)) * inv_h2;
    if (i < m - 1) gen.upper[i] = end_factor * std::exp(vi - V(x + 0.5 * h)) * inv_h2;
    gen.diag[i] = -(gen.lower[i] + gen.upper[i]);
    if (!std::isfinite(gen.diag[i])) throw EvaluationError("non-finite generator entry at node " + std::to_string(x));
  }
  return gen;
}

GridFunction grid_apply(const GridGenerator& gen, const GridFunction& f, double t, double dt) {
  if (!(t >= 0.0)) throw ParameterError("time must be nonnegative");
  if (t == 0.0) return f;
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (f.spec().m != gen.spec.m) throw ParameterError("grid function does not match the generator");
  const std::size_t m = gen.diag.size();
  const long steps = std::max(1L, std::lround(t / dt));
  const double k = t / static_cast<double>(steps);

  // Increment form: (I - k/2 L) d = k L u, u <- u + d. Constants give d = 0 exactly.
  std::vector<double> a(m), b(m), c(m), cp(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = -0.5 * k * gen.lower[i];
    b[i] = 1.0 - 0.5 * k * gen.diag[i];
    c[i] = -0.5 * k * gen.upper[i];
  }
  // Forward sweep factors do not depend on the right-hand side.
  std::vector<double> denom(m);
  denom[0] = b[0];
  if (!(std::abs(denom[0]) > 0.0)) throw NumericalError("singular Crank-Nicolson system at row 0");
  cp[0] = c[0] / denom[0];
  for (std::size_t i = 1; i < m; ++i) {
    denom[i] = b[i] - a[i] * cp[i - 1];
    if (!(std::abs(denom[i]) > 1e-300) || !std::isfinite(denom[i]))
      throw NumericalError("Crank-Nicolson pivot breakdown at row " + std::to_string(i) + " (pivot " +
                           std::to_string(denom[i]) + ")");
    cp[i] = c[i] / denom[i];
  }

  std::vector<double> u = f.values();
  std::vector<double> d(m);
  for (long s = 0; s < steps; ++s) {
    std::vector<double> rhs = gen.apply(u);
    for (double& r : rhs) r *= k;
    d[0] = rhs[0] / denom[0];
    for (std::size_t i = 1; i < m; ++i) d[i] = (rhs[i] - a[i] * d[i - 1]) / denom[i];
    for (std::size_t i = m - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
    for (std::size_t i = 0; i < m; ++i) u[i] += d[i];
  }
  return GridFunction(f.spec(), std::move(u));
}

double mehler_apply(const PointFunction& f, int n, double t, const Vec& x, int order) {
  if (!(t >= 0.0)) throw ParameterError("time must be nonnegative");
  if (order < 2) throw ParameterError("quadrature order must be at least 2");
  if (x.size() != n) throw ParameterError("point dimension mismatch");
  if (t == 0.0) return f(as_span(x));
  const double a = std::exp(-t);
  const double s = std::sqrt(-std::expm1(-2.0 * t));
  double z[3];
  return gaussian_expectation(
      [&](ConstPoint y) {
        for (int i = 0; i < n; ++i) z[i] = a * x(i) + s * y[i];
        return f({z, static_cast<std::size_t>(n)});
      },
      n, order);
}

std::string to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::Mehler:
      return "mehler";
    case EngineKind::Grid:
      return "grid";
    case EngineKind::MonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

EngineKind parse_engine_kind(const std::string& text) {
  if (text == "mehler") return EngineKind::Mehler;
  if (text == "grid") return EngineKind::Grid;
  if (text == "monte-carlo" || text == "mc") return EngineKind::MonteCarlo;
  throw ParameterError("unknown engine '" + text + "'");
}

SemigroupEngine::SemigroupEngine(Potential potential, EngineSpec spec)
    : potential_(std::move(potential)), spec_(spec) {
  switch (spec_.kind) {
    case EngineKind::Mehler:
      if (!potential_.is_gaussian()) throw ParameterError("the Mehler engine requires the gaussian potential");
      if (potential_.dim() > 3) throw ParameterError("the Mehler engine supports n <= 3");
      if (spec_.order < 2) throw ParameterError("quadrature order must be at least 2");
      break;
    case EngineKind::Grid:
      if (!(spec_.grid_dt > 0.0)) throw ParameterError("grid time step must be positive");
      generator_ = grid_generator(potential_, spec_.grid);
      break;
    case EngineKind::MonteCarlo:
      if (spec_.mc.paths < 100) throw ParameterError("the Monte Carlo engine needs at least 100 paths");
      break;
  }
}

std::vector<Estimate> SemigroupEngine::apply_many(const PointFunction& f, double t, const std::vector<Vec>& xs) const {
  std::vector<Estimate> out(xs.size());
  switch (spec_.kind) {
    case EngineKind::Mehler:
      for (std::size_t i = 0; i < xs.size(); ++i) out[i].mean = mehler_apply(f, potential_.dim(), t, xs[i], spec_.order);
      break;
    case EngineKind::Grid: {
      const GridFunction u = grid_apply(generator_, GridFunction::sample(spec_.grid, f), t, spec_.grid_dt);
      for (std::size_t i = 0; i < xs.size(); ++i) out[i].mean = u.interpolate(xs[i](0));
      break;
    }
    case EngineKind::MonteCarlo:
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = mc_apply(*this, f, t, xs[i]);
      break;
  }
  return out;
}

Estimate SemigroupEngine::apply(const PointFunction& f, double t, const Vec& x) const {
  return apply_many(f, t, {x}).front();
}

Vec SemigroupEngine::gradient(const TestFunction& f, double t, const Vec& x) const {
  const int n = f.dim();
  Vec out(n);
  switch (spec_.kind) {
    case EngineKind::Mehler: {
      const double decay = std::exp(-t);
      for (int i = 0; i < n; ++i) {
        PointFunction component = [&f, i, n](ConstPoint z) {
          double g[3];
          f.gradient(z, {g, static_cast<std::size_t>(n)});
          return g[i];
        };
        out(i) = decay * mehler_apply(component, n, t, x, spec_.order);
      }
      return out;
    }
    case EngineKind::Grid: {
      const GridFunction u = grid_apply(generator_, GridFunction::sample(spec_.grid, f.value_fn()), t, spec_.grid_dt);
      const double h = spec_.grid.spacing();
      out(0) = (u.interpolate(x(0) + h) - u.interpolate(x(0) - h)) / (2.0 * h);
      return out;
    }
    case EngineKind::MonteCarlo:
      break;
  }
  throw ParameterError("the Monte Carlo engine does not evaluate gradients of P_t f");
}

SemigroupEngine::Evolved SemigroupEngine::evolve(const TestFunction& f, double t) const {
  Evolved out;
  switch (spec_.kind) {
    case EngineKind::Mehler: {
      const int n = f.dim();
      const int order = spec_.order;
      const TestFunction fc = f;
      out.value = [fc, n, t, order](ConstPoint z) { return mehler_apply(fc.value_fn(), n, t, to_vec(z), order); };
      out.gradient = [fc, n, t, order](ConstPoint z, MutPoint g) {
        const Vec x = to_vec(z);
        const double decay = std::exp(-t);
        for (int i = 0; i < n; ++i) {
          PointFunction component = [&fc, i, n](ConstPoint y) {
            double d[3];
            fc.gradient(y, {d, static_cast<std::size_t>(n)});
            return d[i];
          };
          g[i] = decay * mehler_apply(component, n, t, x, order);
        }
      };
      return out;
    }
    case EngineKind::Grid: {
      auto u = std::make_shared<GridFunction>(
          grid_apply(generator_, GridFunction::sample(spec_.grid, f.value_fn()), t, spec_.grid_dt));
      const std::vector<double>& v = u->values();
      const int m = spec_.grid.m;
      const double h = spec_.grid.spacing();
      std::vector<double> dv(m);
      for (int i = 1; i + 1 < m; ++i) dv[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
      dv[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
      dv[m - 1] = (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h);
      auto du = std::make_shared<GridFunction>(spec_.grid, std::move(dv));
      out.value = [u](ConstPoint z) { return u->interpolate(z[0]); };
      out.gradient = [du](ConstPoint z, MutPoint g) { g[0] = du->interpolate(z[0]); };
      return out;
    }
    case EngineKind::MonteCarlo:
      break;
  }
  throw ParameterError("the Monte Carlo engine cannot nest semigroup evaluations");
}

double SemigroupEngine::tolerance() const {
  switch (spec_.kind) {
    case EngineKind::Mehler:
      return 1e-6;
    case EngineKind::Grid:
      return 1e-3;
    case EngineKind::MonteCarlo:
      return 1e-9;
  }
  return 0.0;
}

std::string SemigroupEngine::describe() const {
  std::ostringstream os;
  os << to_string(spec_.kind) << '(' << potential_.label();
  switch (spec_.kind) {
    case EngineKind::Mehler:
      os << ", order=" << spec_.order;
      break;
    case EngineKind::Grid:
      os << ", lo=" << spec_.grid.lo << ", hi=" << spec_.grid.hi << ", m=" << spec_.grid.m << ", dt=" << spec_.grid_dt;
      break;
    case EngineKind::MonteCarlo:
      os << ", paths=" << spec_.mc.paths << ", dt=" << spec_.mc.dt << ", seed=" << spec_.mc.seed;
      break;
  }
  os << ')';
  return os.str();
}

Estimate mc_apply(const SemigroupEngine& engine, const PointFunction& f, double t, const Vec& x) {
  if (engine.spec().mc.paths < 100) throw ParameterError("at least 100 paths are required");
  const PathBatch batch = simulate_paths(engine.potential(), x, {t}, engine.spec().mc);
  return path_average(batch, [&](std::size_t i) { return f(batch.state(0, i)); });
}

}  // namespace curvlab
