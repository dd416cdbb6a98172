#include "curvlab/spectral.hpp"

#include "curvlab/semigroup.hpp"
#include "curvlab/verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvlab {

namespace {

void check_cap(std::size_t size) {
  if (static_cast<int>(size) - 1 > kDegreeCap)
    throw ParameterError("polynomial degree cap " + std::to_string(kDegreeCap) + " exceeded");
}

std::vector<double> default_lambdas(std::vector<double> lambdas, int k) {
  if (lambdas.empty())
    for (int i = 1; i <= k; ++i) lambdas.push_back(i);
  for (double l : lambdas)
    if (!(l > 0.0)) throw ParameterError("lambda values must be positive");
  return lambdas;
}

double halton(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

PolySeries::PolySeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
  for (double v : c_)
    if (!std::isfinite(v)) throw ParameterError("polynomial coefficients must be finite");
  trim();
  check_cap(c_.size());
}

PolySeries PolySeries::monomial(int k, double c) {
  std::vector<double> v(k + 1, 0.0);
  v[k] = c;
  return PolySeries(std::move(v));
}

void PolySeries::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double PolySeries::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

PolySeries PolySeries::derivative() const {
  if (c_.size() == 1) return PolySeries({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return PolySeries(std::move(d));
}

PolySeries PolySeries::apply_L() const {
  std::vector<double> out(c_.size(), 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k) {
    out[k] -= static_cast<double>(k) * c_[k];
    if (k >= 2) out[k - 2] += static_cast<double>(k * (k - 1)) * c_[k];
  }
  return PolySeries(std::move(out));
}

double PolySeries::gaussian_mean() const {
  double moment = 1.0;  // (2m-1)!!
  double acc = 0.0;
  for (std::size_t k = 0; k < c_.size(); k += 2) {
    acc += c_[k] * moment;
    moment *= static_cast<double>(k + 1);
  }
  return acc;
}

PolySeries operator+(const PolySeries& a, const PolySeries& b) {
  std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t k = 0; k < a.c_.size(); ++k) out[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) out[k] += b.c_[k];
  return PolySeries(std::move(out));
}

PolySeries operator-(const PolySeries& a, const PolySeries& b) { return a + (-1.0) * b; }

PolySeries operator*(const PolySeries& a, const PolySeries& b) {
  check_cap(a.c_.size() + b.c_.size() - 1);
  std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return PolySeries(std::move(out));
}

PolySeries operator*(double s, const PolySeries& a) {
  std::vector<double> out = a.c_;
  for (double& v : out) v *= s;
  return PolySeries(std::move(out));
}

HermiteSeries::HermiteSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
  check_cap(c_.size());
}

double HermiteSeries::variance() const {
  double v = 0.0;
  for (std::size_t k = 1; k < c_.size(); ++k) v += c_[k] * c_[k];
  return v;
}

HermiteSeries expand(const PolySeries& f) {
  const auto& a = f.coeffs();
  const int d = f.degree();
  // Horner's scheme with multiplication by x done through x h_k = sqrt(k+1) h_{k+1} + sqrt(k) h_{k-1}.
  std::vector<double> s{a[d]};
  for (int j = d - 1; j >= 0; --j) {
    std::vector<double> next(s.size() + 1, 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
      next[k + 1] += std::sqrt(static_cast<double>(k + 1)) * s[k];
      if (k >= 1) next[k - 1] += std::sqrt(static_cast<double>(k)) * s[k];
    }
    next[0] += a[j];
    s = std::move(next);
  }
  return HermiteSeries(std::move(s));
}

PolySeries to_poly(const HermiteSeries& s) {
  const auto& c = s.coeffs();
  const PolySeries x = PolySeries::monomial(1);
  PolySeries prev({1.0});
  PolySeries acc = c[0] * prev;
  if (c.size() == 1) return acc;
  PolySeries cur = x;
  acc = acc + c[1] * cur;
  for (std::size_t k = 1; k + 1 < c.size(); ++k) {
    PolySeries next = (1.0 / std::sqrt(static_cast<double>(k + 1))) *
                      (x * cur - std::sqrt(static_cast<double>(k)) * prev);
    acc = acc + c[k + 1] * next;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return acc;
}

HermiteSeries apply_L(const HermiteSeries& s) { return apply_Lk(s, 1); }

HermiteSeries apply_Pt(const HermiteSeries& s, double t) {
  std::vector<double> c = s.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::exp(-static_cast<double>(k) * t);
  return HermiteSeries(std::move(c));
}

HermiteSeries apply_Lk(const HermiteSeries& s, int k) {
  if (k < 0) throw ParameterError("L^k needs k >= 0");
  std::vector<double> c = s.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::pow(-static_cast<double>(j), k);
  return HermiteSeries(std::move(c));
}

PolySeries Q_bilinear(const PolySeries& g, const PolySeries& h, int k, const std::vector<double>& lambdas) {
  if (k < 1) throw ParameterError("Q_k needs k >= 1");
  if (k == 1) return g.derivative() * h.derivative();
  if (static_cast<int>(lambdas.size()) < k - 1) throw ParameterError("not enough lambda values for Q_k");
  const PolySeries q = Q_bilinear(g, h, k - 1, lambdas);
  const PolySeries mixed = Q_bilinear(g, h.apply_L(), k - 1, lambdas) + Q_bilinear(g.apply_L(), h, k - 1, lambdas);
  return (-lambdas[k - 2]) * q + 0.5 * q.apply_L() - 0.5 * mixed;
}

PolySeries Q_iterate(const PolySeries& f, int k, std::vector<double> lambdas) {
  lambdas = default_lambdas(std::move(lambdas), k);
  return Q_bilinear(f, f, k, lambdas);
}

double derivative_square_mean(const PolySeries& f, int k) {
  PolySeries d = f;
  for (int i = 0; i < k; ++i) d = d.derivative();
  return (d * d).gaussian_mean();
}

HoudreKagan houdre_kagan(const PolySeries& f, int N) {
  if (N < 1) throw ParameterError("Houdre-Kagan needs N >= 1");
  const HermiteSeries h = expand(f);
  const int m_max = std::max(2 * N, h.degree());
  HoudreKagan out;
  out.variance = h.variance();
  double factorial = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= m_max; ++k) {
    double d = 0.0;
    for (int j = k; j <= h.degree(); ++j) {
      double falling = 1.0;
      for (int i = 0; i < k; ++i) falling *= static_cast<double>(j - i);
      d += h.coefficient(j) * h.coefficient(j) * falling;
    }
    factorial *= k;
    sum += (k % 2 == 1 ? 1.0 : -1.0) * d / factorial;
    out.derivative_integrals.push_back(d);
    out.partial_sums.push_back(sum);
  }
  out.upper = out.partial_sums[2 * N - 2];
  out.lower = out.partial_sums[2 * N - 1];
  return out;
}

InequalityReport variance_bracket_check(const PolySeries& f, int n_max, std::vector<double> lambdas) {
  if (n_max < 1) throw ParameterError("variance bracket needs n >= 1");
  const bool ou = lambdas.empty();
  lambdas = default_lambdas(std::move(lambdas), n_max + 1);
  const double var = expand(f).variance();
  InequalityReport report("variance-bracket", 1e-9 * (1.0 + std::abs(var)), "hermite");
  const HoudreKagan hk = houdre_kagan(f, (n_max + 1) / 2 + 1);
  double pi = 1.0;
  double s = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    pi *= lambdas[n - 1];
    const double qn = Q_iterate(f, n, lambdas).gaussian_mean();
    s += (n % 2 == 1 ? 1.0 : -1.0) * qn / pi;
    const double next = Q_iterate(f, n + 1, lambdas).gaussian_mean();
    EvalRecord r;
    r.x = Vec::Constant(1, n);
    r.lhs = n % 2 == 1 ? var : s;
    r.rhs = n % 2 == 1 ? s : var;
    std::ostringstream note;
    note << "n=" << n << (n % 2 == 1 ? " upper" : " lower");
    if (next < -report.tolerance) note << "; hypothesis int Q_" << n + 1 << " >= 0 fails (" << next << ")";
    r.note = note.str();
    report.add(std::move(r));
    if (ou) {
      EvalRecord c;
      c.x = Vec::Constant(1, n);
      c.lhs = std::abs(s - hk.partial_sums[n - 1]);
      c.rhs = 1e-8 * (1.0 + std::abs(var));
      c.note = "n=" + std::to_string(n) + " cross-check against Hermite coefficients";
      report.add(std::move(c));
    }
  }
  return report;
}

MultiMFunction make_quadratic_multi(int k, double c, double eps, double a) {
  if (k != 0 && k != 1) throw ParameterError("quadratic multi-argument M is defined for k in {0, 1}");
  std::ostringstream os;
  MultiMFunction m;
  m.k = k;
  if (k == 0) {
    os << "-" << c << "*x0^2+y";
    m.label = os.str();
    m.value = [c](const Vec& v) { return -c * v(0) * v(0) + v(1); };
    m.gradient = [c](const Vec& v) { return Vec{{-2.0 * c * v(0), 1.0}}; };
    m.hessian = [c](const Vec&) {
      Mat h = Mat::Zero(2, 2);
      h(0, 0) = -2.0 * c;
      return h;
    };
    return m;
  }
  os << "-" << c << "*x0^2-" << eps << "*x0*x1+" << a << "*x1^2+y";
  m.label = os.str();
  m.value = [c, eps, a](const Vec& v) { return -c * v(0) * v(0) - eps * v(0) * v(1) + a * v(1) * v(1) + v(2); };
  m.gradient = [c, eps, a](const Vec& v) {
    return Vec{{-2.0 * c * v(0) - eps * v(1), -eps * v(0) + 2.0 * a * v(1), 1.0}};
  };
  m.hessian = [c, eps, a](const Vec&) {
    Mat h = Mat::Zero(3, 3);
    h(0, 0) = -2.0 * c;
    h(0, 1) = h(1, 0) = -eps;
    h(1, 1) = 2.0 * a;
    return h;
  };
  return m;
}

std::string multi_hypotheses(const MultiMFunction& m, const MultiSample& sample) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const int dim = m.k + 2;
  if (dim > 8) throw ParameterError("too many arguments for the hypothesis sampler");
  for (int p = 1; p <= sample.points; ++p) {
    Vec v(dim);
    for (int i = 0; i + 1 < dim; ++i) v(i) = sample.radius * (2.0 * halton(p, primes[i]) - 1.0);
    v(dim - 1) = sample.y_lo + (sample.y_hi - sample.y_lo) * halton(p, primes[dim - 1]);
    const Vec grad = m.gradient(v);
    Mat a = m.hessian(v);
    const double my = grad(dim - 1);
    std::ostringstream os;
    if (my < -1e-12) {
      os << "M_y = " << my << " < 0 at " << format_point(v);
      return os.str();
    }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (i != j && a(i, j) > 1e-12) {
          os << "off-diagonal entry (" << i << "," << j << ") = " << a(i, j) << " > 0 at " << format_point(v);
          return os.str();
        }
    a(0, 0) += 2.0 * my;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(a / scale, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (lmin < -1e-10) {
      os << "matrix not positive semi-definite (min eigenvalue " << lmin * scale << ") at " << format_point(v);
      return os.str();
    }
  }
  return {};
}

InequalityReport generalized_local_check(const MultiMFunction& m, const PolySeries& f, double t, double alpha,
                                         const std::vector<double>& xs, const MultiSample& sample) {
  if (!(t >= 0.0) || !(alpha >= 0.0)) throw ParameterError("t and alpha must be >= 0");
  InequalityReport report("generalized-local/" + m.label, 1e-6, "hermite+mehler");
  report.precondition_note = multi_hypotheses(m, sample);
  report.precondition_ok = report.precondition_note.empty();

  const int k = m.k;
  const HermiteSeries h = expand(f);
  const HermiteSeries pt = apply_Pt(h, t);
  std::vector<PolySeries> lhs_parts, rhs_parts;
  for (int j = 0; j <= k; ++j) {
    lhs_parts.push_back(to_poly(apply_Lk(pt, j)));
    rhs_parts.push_back(to_poly(apply_Lk(h, j)));
  }
  const PolySeries dpt = lhs_parts[0].derivative();
  const PolySeries df = f.derivative();
  const double g = g_alpha(t, alpha, 1.0);

  PointFunction composite = [&](ConstPoint z) {
    Vec v(k + 2);
    for (int j = 0; j <= k; ++j) v(j) = rhs_parts[j](z[0]);
    const double d = df(z[0]);
    v(k + 1) = g * d * d;
    return m.value(v);
  };
  for (double x : xs) {
    Vec v(k + 2);
    for (int j = 0; j <= k; ++j) v(j) = lhs_parts[j](x);
    const double d = dpt(x);
    v(k + 1) = alpha * d * d;
    EvalRecord r;
    r.x = Vec::Constant(1, x);
    r.t = t;
    r.alpha = alpha;
    r.lhs = m.value(v);
    r.rhs = mehler_apply(composite, 1, t, Vec::Constant(1, x), 64);
    report.add(std::move(r));
  }
  return report;
}

}  // namespace curvlab
