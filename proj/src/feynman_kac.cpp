#include "curvlab/feynman_kac.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace curvlab {

namespace {

double grad_norm(const TestFunction& f, ConstPoint z) {
  double g[16];
  std::vector<double> heap;
  double* p = g;
  if (z.size() > 16) {
    heap.resize(z.size());
    p = heap.data();
  }
  f.gradient(z, {p, z.size()});
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

void check_dims(const Potential& potential, const Vec& x) {
  if (x.size() != potential.dim()) throw ParameterError("start point dimension does not match " + potential.label());
}

}  // namespace

PathBatch simulate(const Potential& potential, const Vec& x0, std::vector<double> times, const SimulationSpec& spec,
                   const LogFunction* log_g) {
  check_dims(potential, x0);
  if (spec.paths < 100) throw ParameterError("at least 100 paths are required");
  PathIntegrands integrands;
  integrands.rate_a = [&potential](ConstPoint z) { return potential.curvature(z); };
  if (log_g) integrands.rate_b = [&potential, log_g](ConstPoint z) { return log_generator_ratio(potential, *log_g, z); };
  return simulate_paths(potential, x0, std::move(times), spec, integrands);
}

PathBatch simulate(const Potential& potential, const Vec& x0, double t, double dt, std::size_t n_paths,
                   std::uint64_t seed) {
  SimulationSpec spec;
  spec.dt = dt;
  spec.paths = n_paths;
  spec.seed = seed;
  return simulate(potential, x0, {t}, spec);
}

nlohmann::json summarize(const PathBatch& batch) {
  nlohmann::json j;
  j["x0"] = to_json(batch.x0);
  j["dt"] = batch.dt;
  j["paths"] = batch.paths;
  j["retained"] = batch.retained();
  j["seed"] = batch.seed;
  j["exploded_fraction"] = batch.exploded_fraction;
  nlohmann::json snaps = nlohmann::json::array();
  for (std::size_t k = 0; k < batch.times.size(); ++k) {
    nlohmann::json s;
    s["t"] = batch.times[k];
    Vec mean(batch.dim), var(batch.dim);
    for (int d = 0; d < batch.dim; ++d) {
      const Estimate m = path_average(batch, [&](std::size_t p) { return batch.state(k, p)[d]; });
      const Estimate m2 = path_average(batch, [&](std::size_t p) {
        const double v = batch.state(k, p)[d] - m.mean;
        return v * v;
      });
      mean(d) = m.mean;
      var(d) = m2.mean;
    }
    s["mean"] = to_json(mean);
    s["variance"] = to_json(var);
    s["mean_int_rho"] = path_average(batch, [&](std::size_t p) { return batch.accumulated_a(k, p); }).mean;
    snaps.push_back(std::move(s));
  }
  j["snapshots"] = std::move(snaps);
  return j;
}

std::string states_csv(const PathBatch& batch) {
  std::ostringstream os;
  os << std::setprecision(17) << "snapshot,time,path";
  for (int d = 0; d < batch.dim; ++d) os << ",x" << d;
  os << '\n';
  for (std::size_t k = 0; k < batch.times.size(); ++k)
    for (std::size_t p = 0; p < batch.paths; ++p) {
      if (batch.exploded[p]) continue;
      os << k << ',' << batch.times[k] << ',' << p;
      for (double v : batch.state(k, p)) os << ',' << v;
      os << '\n';
    }
  return os.str();
}

InequalityReport supermartingale_check(const Potential& potential, const LogFunction& log_g, const Vec& x0,
                                       const std::vector<double>& times, const SimulationSpec& spec,
                                       double tolerance) {
  const PathBatch batch = simulate(potential, x0, times, spec, &log_g);
  InequalityReport report("supermartingale/" + potential.label(), tolerance,
                          "monte-carlo(paths=" + std::to_string(spec.paths) + ")");
  const double g0 = std::exp(log_g.value(as_span(x0)));
  for (double t : times) {
    const std::size_t k = batch.snapshot_index(t);
    const Estimate y = path_average(batch, [&](std::size_t p) {
      return std::exp(log_g.value(batch.state(k, p)) - batch.accumulated_b(k, p));
    });
    EvalRecord r;
    r.x = x0;
    r.t = t;
    r.lhs = y.mean;
    r.rhs = g0;
    r.std_error = y.std_error;
    report.add(std::move(r));
  }
  return report;
}

InequalityReport supermartingale_check(const Potential& potential, const LyapunovCertificate& cert, const Vec& x0,
                                       const std::vector<double>& times, const SimulationSpec& spec,
                                       double tolerance) {
  InequalityReport r = supermartingale_check(potential, cert.log_function(), x0, times, spec, tolerance);
  r.label = "supermartingale/" + cert.label();
  return r;
}

InequalityReport gradient_bound(const Potential& potential, const TestFunction& f, const std::vector<Vec>& xs,
                                const std::vector<double>& times, const SimulationSpec& spec,
                                const SemigroupEngine& lhs_engine) {
  InequalityReport report("gradient-bound/" + potential.label() + "/" + f.label(), lhs_engine.tolerance(),
                          lhs_engine.describe());
  for (const Vec& x : xs) {
    const PathBatch batch = simulate(potential, x, times, spec);
    for (double t : times) {
      const std::size_t k = batch.snapshot_index(t);
      const Estimate w = path_average(batch, [&](std::size_t p) {
        return grad_norm(f, batch.state(k, p)) * std::exp(-batch.accumulated_a(k, p));
      });
      EvalRecord r;
      r.x = x;
      r.t = t;
      r.lhs = lhs_engine.gradient(f, t, x).norm();
      r.rhs = w.mean;
      r.std_error = w.std_error;
      report.add(std::move(r));
    }
  }
  return report;
}

InequalityReport commutation_check(const Potential& potential, const LyapunovCertificate& cert, const TestFunction& f,
                                   const std::vector<Vec>& xs, const std::vector<double>& times,
                                   const SimulationSpec& spec, const SemigroupEngine& lhs_engine,
                                   const ScanSpec& scan) {
  const ScanResult pre = scan_certificate(potential, cert, scan);
  if (!pre.pass()) {
    std::ostringstream os;
    os << "certificate " << cert.label() << " fails the local eigenvalue scan (margin " << pre.worst_margin
       << " at " << format_point(pre.worst_point) << ")";
    throw CertificationError(os.str(), pre.worst_point, pre.worst_margin);
  }
  const double p = cert.p();
  const double q = p / (p - 1.0);
  InequalityReport report("commutation/" + cert.label() + "/" + f.label(), lhs_engine.tolerance(),
                          lhs_engine.describe());
  for (const Vec& x : xs) {
    const PathBatch batch = simulate(potential, x, times, spec);
    const double gx = cert.g(as_span(x));
    for (double t : times) {
      const std::size_t k = batch.snapshot_index(t);
      const Estimate m = path_average(batch, [&](std::size_t i) { return std::pow(grad_norm(f, batch.state(k, i)), q); });
      const double scale = std::exp(-cert.beta() * t) * gx;
      EvalRecord r;
      r.x = x;
      r.t = t;
      r.lhs = std::pow(lhs_engine.gradient(f, t, x).norm(), p);
      r.rhs = scale * std::pow(m.mean, p - 1.0);
      r.std_error = m.mean > 0.0 ? scale * (p - 1.0) * std::pow(m.mean, p - 2.0) * m.std_error : 0.0;
      report.add(std::move(r));
    }
  }
  return report;
}

}  // namespace curvlab
