#include "curvlab/potentials.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvlab {

Potential::Potential(int dim, std::string label, PointFunction value, GradientFunction gradient,
                     HessianFunction hessian, PotentialKind kind, double alpha)
    : dim_(dim),
      label_(std::move(label)),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      kind_(kind),
      alpha_(alpha) {
  if (dim_ < 1) throw ParameterError("potential dimension must be positive");
}

Vec Potential::gradient(const Vec& x) const {
  Vec out(x.size());
  gradient_(as_span(x), as_span(out));
  return out;
}

Potential& Potential::with_curvature(PointFunction rho) {
  curvature_ = std::move(rho);
  return *this;
}

Potential& Potential::with_diagonal_hessian() {
  diagonal_ = true;
  return *this;
}

double Potential::curvature(ConstPoint x) const {
  if (curvature_) return curvature_(x);
  const Mat h = hessian_(x);
  if (!h.allFinite()) throw EvaluationError("non-finite Hessian of " + label_ + " at " + format_point(x));
  if (dim_ == 1) return h(0, 0);
  if (diagonal_) return h.diagonal().minCoeff();
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double rho_min(const Potential& potential, ConstPoint x) {
  for (double v : x)
    if (!std::isfinite(v)) throw DomainError("non-finite point " + format_point(x));
  const double r = potential.curvature(x);
  if (!std::isfinite(r)) throw EvaluationError("non-finite curvature of " + potential.label() + " at " + format_point(x));
  return r;
}

namespace {

double squared_norm(ConstPoint x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::string with_params(const std::string& name, double alpha, int n) {
  std::ostringstream os;
  os << name << ":alpha=" << alpha << ":n=" << n;
  return os.str();
}

Potential spherical_potential(double alpha, int n) {
  auto value = [alpha](ConstPoint x) { return std::pow(1.0 + squared_norm(x), alpha / 2.0); };
  auto gradient = [alpha](ConstPoint x, MutPoint out) {
    const double s = alpha * std::pow(1.0 + squared_norm(x), alpha / 2.0 - 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
  };
  auto hessian = [alpha, n](ConstPoint x) {
    const double q = 1.0 + squared_norm(x);
    const Eigen::Map<const Vec> xv(x.data(), n);
    Mat h = alpha * std::pow(q, alpha / 2.0 - 1.0) * Mat::Identity(n, n);
    h.noalias() += alpha * (alpha - 2.0) * std::pow(q, alpha / 2.0 - 2.0) * (xv * xv.transpose());
    return h;
  };
  Potential pot(n, with_params("spherical", alpha, n), value, gradient, hessian, PotentialKind::Spherical, alpha);
  // Eigenvalues are alpha q^(a/2-1) (tangential) and alpha q^(a/2-2) (1 + (a-1) r^2) (radial);
  // with alpha < 2 the radial one is the smaller.
  pot.with_curvature([alpha](ConstPoint x) {
    const double r2 = squared_norm(x);
    const double q = 1.0 + r2;
    return std::min(alpha * std::pow(q, alpha / 2.0 - 1.0), alpha * std::pow(q, alpha / 2.0 - 2.0) * (1.0 + (alpha - 1.0) * r2));
  });
  return pot;
}

double pp_first(double s, double alpha) { return alpha * s * std::pow(1.0 + s * s, alpha / 2.0 - 1.0); }
double pp_second(double s, double alpha) {
  return alpha * std::pow(1.0 + s * s, alpha / 2.0 - 2.0) * (1.0 + (alpha - 1.0) * s * s);
}

Potential product_power_potential(double alpha, int n) {
  auto value = [alpha](ConstPoint x) {
    double v = 0.0;
    for (double s : x) v += std::pow(1.0 + s * s, alpha / 2.0);
    return v;
  };
  auto gradient = [alpha](ConstPoint x, MutPoint out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = pp_first(x[i], alpha);
  };
  auto hessian = [alpha, n](ConstPoint x) {
    Mat h = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = pp_second(x[i], alpha);
    return h;
  };
  Potential pot(n, with_params("product-power", alpha, n), value, gradient, hessian, PotentialKind::ProductPower, alpha);
  pot.with_curvature([alpha](ConstPoint x) {
    double r = std::numeric_limits<double>::infinity();
    for (double s : x) r = std::min(r, pp_second(s, alpha));
    return r;
  });
  return pot;
}

}  // namespace

Potential make_gaussian_potential(int n) {
  auto value = [](ConstPoint x) { return 0.5 * squared_norm(x); };
  auto gradient = [](ConstPoint x, MutPoint out) { std::copy(x.begin(), x.end(), out.begin()); };
  auto hessian = [n](ConstPoint) -> Mat { return Mat::Identity(n, n); };
  Potential pot(n, "gaussian:n=" + std::to_string(n), value, gradient, hessian, PotentialKind::Gaussian, 2.0);
  pot.with_curvature([](ConstPoint) { return 1.0; });
  return pot;
}

Potential make_example_potential(const std::string& kind, double alpha, int n) {
  if (n < 1) throw ParameterError("dimension must be positive, got " + std::to_string(n));
  if (kind == "gaussian") return make_gaussian_potential(n);
  if (!(alpha >= 1.0 && alpha < 2.0))
    throw ParameterError("alpha must lie in [1,2) for " + kind + ", got " + std::to_string(alpha));
  if (kind == "spherical") return spherical_potential(alpha, n);
  if (kind == "product-power") return product_power_potential(alpha, n);
  throw ParameterError("unknown potential kind '" + kind + "'");
}

Potential make_double_well() {
  auto value = [](ConstPoint x) {
    const double u = x[0] * x[0] - 1.0;
    return 0.25 * u * u;
  };
  auto gradient = [](ConstPoint x, MutPoint out) { out[0] = x[0] * x[0] * x[0] - x[0]; };
  auto hessian = [](ConstPoint x) -> Mat { return Mat::Constant(1, 1, 3.0 * x[0] * x[0] - 1.0); };
  Potential pot(1, "double-well", value, gradient, hessian, PotentialKind::DoubleWell, 0.0);
  pot.with_curvature([](ConstPoint x) { return 3.0 * x[0] * x[0] - 1.0; });
  return pot;
}

Potential parse_potential(const std::string& id) {
  const ParsedId p = parse_id(id);
  if (p.name == "double-well") return make_double_well();
  return make_example_potential(p.name, p.number("alpha", 1.5), p.integer("n", 1));
}

LyapunovCertificate::LyapunovCertificate(int dim, std::string label, LogFunction log_g, double p, double beta)
    : dim_(dim), label_(std::move(label)), log_g_(std::move(log_g)), p_(p), beta_(beta) {
  if (!(p_ > 1.0)) throw ParameterError("certificate exponent p must exceed 1");
  if (!(beta_ > 0.0)) throw ParameterError("certificate rate beta must be positive");
}

double LyapunovCertificate::g(ConstPoint x) const {
  const double f = log_g_.value(x);
  if (f < 0.0) throw DomainError("certificate " + label_ + " has g < 1 at " + format_point(x));
  return std::exp(f);
}

double log_generator_ratio(const Potential& potential, const LogFunction& log_g, ConstPoint x) {
  double gf[16];
  double gv[16];
  std::vector<double> heap;
  double* pf = gf;
  double* pv = gv;
  if (x.size() > 16) {
    heap.resize(2 * x.size());
    pf = heap.data();
    pv = heap.data() + x.size();
  }
  log_g.gradient(x, {pf, x.size()});
  potential.gradient(x, {pv, x.size()});
  double sq = 0.0;
  double drift = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sq += pf[i] * pf[i];
    drift += pv[i] * pf[i];
  }
  return log_g.laplacian(x) + sq - drift;
}

double LyapunovCertificate::lg_over_g(const Potential& potential, ConstPoint x) const {
  return log_generator_ratio(potential, log_g_, x);
}

LyapunovCertificate make_constant_certificate(int dim, double p, double beta) {
  LogFunction f{[](ConstPoint) { return 0.0; },
                [](ConstPoint x, MutPoint out) { std::fill(out.begin(), out.begin() + static_cast<long>(x.size()), 0.0); },
                [](ConstPoint) { return 0.0; }};
  LyapunovCertificate cert(dim, "constant", f, p, beta);
  cert.kind = "constant";
  cert.c = 0.0;
  return cert;
}

double local_eigenvalue_margin(const Potential& potential, const LyapunovCertificate& cert, ConstPoint x) {
  if (cert.log_g(x) < -1e-300 && !std::isfinite(cert.log_g(x)))
    throw DomainError("g is not positive at " + format_point(x));
  const double m = cert.p() * rho_min(potential, x) - cert.beta() - cert.lg_over_g(potential, x);
  if (!std::isfinite(m)) throw EvaluationError("non-finite eigenvalue margin at " + format_point(x));
  return m;
}

namespace {

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<Vec> scan_points(int n, const ScanSpec& spec) {
  std::vector<Vec> pts;
  const double r = spec.radius;
  if (n == 1) {
    const int m = std::max(2, spec.points_1d);
    for (int i = 0; i < m; ++i) pts.push_back(Vec::Constant(1, -r + 2.0 * r * i / (m - 1)));
    return pts;
  }
  if (n > static_cast<int>(std::size(kPrimes))) throw ParameterError("scan supports at most 16 dimensions");
  for (std::size_t idx = 1; static_cast<int>(pts.size()) < spec.points_nd; ++idx) {
    Vec x(n);
    for (int d = 0; d < n; ++d) x(d) = r * (2.0 * radical_inverse(idx, kPrimes[d]) - 1.0);
    if (x.norm() <= r) pts.push_back(std::move(x));
  }
  // Lines through the origin: each axis and the main diagonal.
  const int m = std::max(2, spec.points_1d);
  for (int axis = 0; axis <= n; ++axis) {
    for (int i = 0; i < m; ++i) {
      const double s = -r + 2.0 * r * i / (m - 1);
      Vec x = Vec::Zero(n);
      if (axis < n)
        x(axis) = s;
      else
        x.setConstant(s / std::sqrt(static_cast<double>(n)));
      pts.push_back(std::move(x));
    }
  }
  return pts;
}

ScanResult scan_certificate(const Potential& potential, const LyapunovCertificate& cert, const ScanSpec& spec) {
  if (potential.dim() != cert.dim()) throw ParameterError("certificate and potential dimensions differ");
  ScanResult res;
  for (const Vec& x : scan_points(potential.dim(), spec)) {
    const double m = local_eigenvalue_margin(potential, cert, x);
    ++res.samples;
    if (m < res.worst_margin) {
      res.worst_margin = m;
      res.worst_point = x;
    }
  }
  return res;
}

namespace {

LyapunovCertificate spherical_certificate(double alpha, double p, int n, double c, double beta) {
  const double th = 2.0 - alpha;
  LogFunction f;
  f.value = [c, th](ConstPoint x) { return c * std::pow(1.0 + squared_norm(x), th / 2.0); };
  f.gradient = [c, th](ConstPoint x, MutPoint out) {
    const double s = c * th * std::pow(1.0 + squared_norm(x), th / 2.0 - 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
  };
  f.laplacian = [c, th, n](ConstPoint x) {
    const double r2 = squared_norm(x);
    const double q = 1.0 + r2;
    return c * n * th * std::pow(q, th / 2.0 - 1.0) + c * th * (th - 2.0) * r2 * std::pow(q, th / 2.0 - 2.0);
  };
  LyapunovCertificate cert(n, with_params("spherical", alpha, n), std::move(f), p, beta);
  cert.kind = "spherical";
  cert.alpha = alpha;
  cert.c = c;
  cert.theta = 1.0;
  return cert;
}

LyapunovCertificate product_certificate(double alpha, double p, int n, double c, double theta, double beta) {
  const double k = 2.0 - alpha;
  LogFunction f;
  f.value = [c, theta, k](ConstPoint x) {
    double v = 0.0;
    for (double s : x) v += c * std::pow(theta + s * s, k / 2.0);
    return v;
  };
  f.gradient = [c, theta, k](ConstPoint x, MutPoint out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * k * x[i] * std::pow(theta + x[i] * x[i], k / 2.0 - 1.0);
  };
  f.laplacian = [c, theta, k](ConstPoint x) {
    double v = 0.0;
    for (double s : x) v += c * k * std::pow(theta + s * s, k / 2.0 - 2.0) * (theta + (k - 1.0) * s * s);
    return v;
  };
  LyapunovCertificate cert(n, with_params("product-power", alpha, n), std::move(f), p, beta);
  cert.kind = "product-power";
  cert.alpha = alpha;
  cert.c = c;
  cert.theta = theta;
  return cert;
}

// Largest c in (0, 1] whose certificate passes the scan, or 0 when none does.
template <class Build>
double largest_feasible_c(const Potential& pot, const ScanSpec& spec, Build build, ScanResult& worst_seen) {
  auto feasible = [&](double c) {
    ScanResult r = scan_certificate(pot, build(c), spec);
    if (r.worst_margin < worst_seen.worst_margin || worst_seen.samples == 0) worst_seen = r;
    return r.pass();
  };
  if (feasible(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo > 1e-9 ? lo : 0.0;
}

}  // namespace

LyapunovCertificate make_lyapunov(const std::string& kind, double alpha, double p, int n, const ScanSpec& spec) {
  if (!(p > 1.0)) throw ParameterError("p must exceed 1");
  const Potential pot = make_example_potential(kind, alpha, n);

  if (kind == "spherical") {
    if (alpha >= 4.0 / 3.0) {
      const double c = 0.25 * std::min(p / n, std::sqrt(p));
      auto cert = spherical_certificate(alpha, p, n, c, c);
      cert.scan = scan_certificate(pot, cert, spec);
      return cert;
    }
    if (alpha == 1.0) {
      const double c = 1.0 / (4.0 * n);
      auto cert = spherical_certificate(alpha, p, n, c, c);
      cert.scan = scan_certificate(pot, cert, spec);
      return cert;
    }
    ScanResult worst;
    const double c = largest_feasible_c(
        pot, spec, [&](double cc) { return spherical_certificate(alpha, p, n, cc, cc / 2.0); }, worst);
    if (c == 0.0)
      throw CertificationError("no feasible c for the spherical certificate at alpha=" + std::to_string(alpha),
                               worst.worst_point, worst.worst_margin);
    auto cert = spherical_certificate(alpha, p, n, c, c / 2.0);
    const double scale = std::min(static_cast<double>(n), std::sqrt(p) / std::pow(n, alpha / (2.0 * (alpha - 1.0))));
    cert.c_alpha = c / scale;
    cert.scan = scan_certificate(pot, cert, spec);
    return cert;
  }

  if (kind == "product-power") {
    // theta satisfies 3n / theta^(alpha-1) <= 1/2; at alpha = 1 that constraint is void.
    double theta = alpha > 1.0 ? std::pow(6.0 * n, 1.0 / (alpha - 1.0)) : 1.0;
    ScanResult worst;
    for (int attempt = 0; attempt < 6; ++attempt, theta *= 2.0) {
      const double base_ratio = n / std::pow(theta, alpha - 1.0);
      for (double shrink = 1.0; shrink >= 1.0 / 64.0; shrink /= 2.0) {
        const double ratio = base_ratio * shrink;
        const double c = largest_feasible_c(
            pot, spec, [&](double cc) { return product_certificate(alpha, p, n, cc, theta, ratio * cc); }, worst);
        if (c > 0.0) {
          auto cert = product_certificate(alpha, p, n, c, theta, ratio * c);
          cert.scan = scan_certificate(pot, cert, spec);
          return cert;
        }
      }
    }
    throw CertificationError("no feasible (c, theta, beta) for the product-power certificate", worst.worst_point,
                             worst.worst_margin);
  }
  throw ParameterError("unknown certificate kind '" + kind + "'");
}

}  // namespace curvlab
