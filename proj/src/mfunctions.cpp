#include "curvlab/mfunctions.hpp"

#include "curvlab/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvlab {

MFunction::MFunction(std::string label, ValueFn value, JetFn jet, Interval x_domain, Interval y_domain)
    : label_(std::move(label)),
      value_(std::move(value)),
      jet_(std::move(jet)),
      x_domain_(x_domain),
      y_domain_(y_domain) {
  sample_x = x_domain_.bounded() ? Interval::closed(x_domain_.lo + 0.01, x_domain_.hi - 0.01)
             : x_domain_.lo == 0.0 ? Interval::closed(0.1, 10.0)
                                   : Interval::closed(-10.0, 10.0);
}

double MFunction::value(double x, double y) const {
  if (!x_domain_.contains(x))
    throw DomainError(label_ + ": x = " + std::to_string(x) + " outside " + x_domain_.str());
  if (!y_domain_.contains(y))
    throw DomainError(label_ + ": y = " + std::to_string(y) + " outside " + y_domain_.str());
  return value_(x, y);
}

MJet MFunction::jet(double x, double y) const {
  if (!x_domain_.contains(x))
    throw DomainError(label_ + ": x = " + std::to_string(x) + " outside " + x_domain_.str());
  if (!y_domain_.contains(y))
    throw DomainError(label_ + ": y = " + std::to_string(y) + " outside " + y_domain_.str());
  return jet_(x, y);
}

MFunction MFunction::perturbed(double a, double b, double c) const {
  if (!(a > 0.0)) throw ParameterError("perturbation needs a > 0");
  std::ostringstream os;
  os << a << "*" << label_ << "+" << b << "*x+" << c;
  auto v = value_;
  auto j = jet_;
  MFunction out(
      os.str(), [v, a, b, c](double x, double y) { return a * v(x, y) + b * x + c; },
      [j, a, b, c](double x, double y) {
        MJet r = j(x, y);
        r.m = a * r.m + b * x + c;
        r.mx = a * r.mx + b;
        r.my *= a;
        r.mxx *= a;
        r.mxy *= a;
        r.myy *= a;
        return r;
      },
      x_domain_, y_domain_);
  out.my_nonnegative = my_nonnegative;
  out.sample_x = sample_x;
  out.sample_y = sample_y;
  return out;
}

MFunction make_poincare() {
  return MFunction(
      "poincare", [](double x, double y) { return -x * x + y; },
      [](double x, double y) { return MJet{-x * x + y, -2.0 * x, 1.0, -2.0, 0.0, 0.0}; }, Interval::real_line(),
      Interval::nonnegative());
}

MFunction make_reverse_poincare() {
  return MFunction(
      "reverse-poincare", [](double x, double y) { return x * x + y; },
      [](double x, double y) { return MJet{x * x + y, 2.0 * x, 1.0, 2.0, 0.0, 0.0}; }, Interval::real_line(),
      Interval::nonnegative());
}

MFunction make_log_sobolev() {
  return MFunction(
      "log-sobolev", [](double x, double y) { return -x * std::log(x) + y / (2.0 * x); },
      [](double x, double y) {
        MJet j;
        j.m = -x * std::log(x) + y / (2.0 * x);
        j.mx = -std::log(x) - 1.0 - y / (2.0 * x * x);
        j.my = 1.0 / (2.0 * x);
        j.mxx = -1.0 / x + y / (x * x * x);
        j.mxy = -1.0 / (2.0 * x * x);
        j.myy = 0.0;
        return j;
      },
      Interval::positive(), Interval::nonnegative());
}

MFunction make_reverse_log_sobolev() {
  return MFunction(
      "reverse-log-sobolev", [](double x, double y) { return x * std::log(x) + y / (2.0 * x); },
      [](double x, double y) {
        MJet j;
        j.m = x * std::log(x) + y / (2.0 * x);
        j.mx = std::log(x) + 1.0 - y / (2.0 * x * x);
        j.my = 1.0 / (2.0 * x);
        j.mxx = 1.0 / x + y / (x * x * x);
        j.mxy = -1.0 / (2.0 * x * x);
        j.myy = 0.0;
        return j;
      },
      Interval::positive(), Interval::nonnegative());
}

MFunction make_bobkov() {
  return MFunction(
      "bobkov",
      [](double x, double y) {
        const double i = isoperimetric_I(x);
        return std::sqrt(i * i + y);
      },
      [](double x, double y) {
        const double i = isoperimetric_I(x);
        const double i1 = isoperimetric_I_prime(x);
        const double s = i * i + y;
        const double rs = std::sqrt(s);
        const double s32 = s * rs;
        MJet j;
        j.m = rs;
        j.mx = i * i1 / rs;
        j.my = 0.5 / rs;
        // I I'' = -1
        j.mxx = (i1 * i1 - 1.0) / rs - i * i * i1 * i1 / s32;
        j.mxy = -0.5 * i * i1 / s32;
        j.myy = -0.25 / s32;
        return j;
      },
      Interval::closed(0.0, 1.0), Interval::nonnegative());
}

namespace {

MFunction beckner_impl(double p, double sign, const std::string& name) {
  if (!(p > 1.0 && p < 2.0)) throw ParameterError(name + " needs p in (1,2), got " + std::to_string(p));
  const double c = p * (p - 1.0) / 2.0;
  std::ostringstream os;
  os << name << ":p=" << p;
  return MFunction(
      os.str(), [=](double x, double y) { return sign * std::pow(x, p) + c * std::pow(x, p - 2.0) * y; },
      [=](double x, double y) {
        MJet j;
        const double xp2 = std::pow(x, p - 2.0);
        j.m = sign * std::pow(x, p) + c * xp2 * y;
        j.mx = sign * p * std::pow(x, p - 1.0) + c * (p - 2.0) * std::pow(x, p - 3.0) * y;
        j.my = c * xp2;
        j.mxx = sign * p * (p - 1.0) * xp2 + c * (p - 2.0) * (p - 3.0) * std::pow(x, p - 4.0) * y;
        j.mxy = c * (p - 2.0) * std::pow(x, p - 3.0);
        j.myy = 0.0;
        return j;
      },
      Interval::positive(), Interval::nonnegative());
}

}  // namespace

MFunction make_beckner(double p) { return beckner_impl(p, -1.0, "beckner"); }
MFunction make_reverse_beckner(double p) { return beckner_impl(p, 1.0, "reverse-beckner"); }

MFunction make_exp_integrability() {
  return MFunction(
      "exp-integrability", [](double x, double y) { return std::log(x) + exp_integrability_F(std::sqrt(y) / x); },
      [](double x, double y) {
        const double ry = std::sqrt(y);
        const double s = ry / x;
        const double f1 = exp_integrability_F_prime(s);
        const double f2 = exp_integrability_F_second(s);
        const double sx = -ry / (x * x);
        const double sy = 1.0 / (2.0 * ry * x);
        const double sxx = 2.0 * ry / (x * x * x);
        const double sxy = -1.0 / (2.0 * ry * x * x);
        const double syy = -1.0 / (4.0 * y * ry * x);
        MJet j;
        j.m = std::log(x) + exp_integrability_F(s);
        j.mx = 1.0 / x + f1 * sx;
        // F'(s) s_y rewritten as (F'(s)/s) / (2x^2), which stays finite at y = 0.
        j.my = (s > 0.0 ? f1 / s : 1.0) / (2.0 * x * x);
        j.mxx = -1.0 / (x * x) + f2 * sx * sx + f1 * sxx;
        j.mxy = f2 * sx * sy + f1 * sxy;
        j.myy = f2 * sy * sy + f1 * syy;
        return j;
      },
      Interval::positive(), Interval::nonnegative());
}

MFunction make_sqrt_y() {
  return MFunction(
      "sqrt-y", [](double, double y) { return std::sqrt(y); },
      [](double, double y) {
        const double r = std::sqrt(y);
        return MJet{r, 0.0, 0.5 / r, 0.0, 0.0, -0.25 / (y * r)};
      },
      Interval::real_line(), Interval::nonnegative());
}

MFunction make_y() {
  return MFunction(
      "y", [](double, double y) { return y; }, [](double, double y) { return MJet{y, 0.0, 1.0, 0.0, 0.0, 0.0}; },
      Interval::real_line(), Interval::nonnegative());
}

std::vector<std::string> catalog_names() {
  return {"poincare", "reverse-poincare", "log-sobolev", "reverse-log-sobolev", "bobkov",
          "beckner", "reverse-beckner", "exp-integrability", "sqrt-y", "y"};
}

MFunction catalog(const std::string& id) {
  const ParsedId p = parse_id(id);
  if (p.name == "poincare") return make_poincare();
  if (p.name == "reverse-poincare") return make_reverse_poincare();
  if (p.name == "log-sobolev") return make_log_sobolev();
  if (p.name == "reverse-log-sobolev") return make_reverse_log_sobolev();
  if (p.name == "bobkov") return make_bobkov();
  if (p.name == "beckner") return make_beckner(p.number("p", 1.5));
  if (p.name == "reverse-beckner") return make_reverse_beckner(p.number("p", 1.5));
  if (p.name == "exp-integrability") return make_exp_integrability();
  if (p.name == "sqrt-y") return make_sqrt_y();
  if (p.name == "y") return make_y();
  throw ParameterError("unknown M-function '" + id + "'");
}

std::string to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::Forward:
      return "A";
    case MatrixKind::Reverse:
      return "B";
    case MatrixKind::Integrated:
      return "A-integrated";
    case MatrixKind::IntegratedPrime:
      return "A-prime-integrated";
  }
  return "unknown";
}

MatrixKind parse_matrix_kind(const std::string& text) {
  if (text == "A" || text == "forward") return MatrixKind::Forward;
  if (text == "B" || text == "reverse") return MatrixKind::Reverse;
  if (text == "A-integrated" || text == "integrated") return MatrixKind::Integrated;
  if (text == "A-prime-integrated" || text == "integrated-prime") return MatrixKind::IntegratedPrime;
  throw ParameterError("unknown matrix kind '" + text + "'");
}

Mat2 condition_matrix(const MFunction& mf, MatrixKind kind, double x, double y, double rho) {
  const bool needs_y = kind != MatrixKind::Integrated;
  if (needs_y && !(y > 0.0))
    throw DomainError(mf.label() + ": the " + to_string(kind) + " matrix needs y > 0, got " + std::to_string(y));
  const MJet j = mf.jet(x, y);
  Mat2 m;
  switch (kind) {
    case MatrixKind::Forward:
      m(0, 0) = j.mxx + 2.0 * j.my;
      break;
    case MatrixKind::Reverse:
      m(0, 0) = j.mxx - 2.0 * j.my;
      break;
    case MatrixKind::Integrated:
    case MatrixKind::IntegratedPrime:
      m(0, 0) = j.mxx + 2.0 * rho * j.my;
      break;
  }
  m(0, 1) = m(1, 0) = j.mxy;
  m(1, 1) = needs_y ? j.myy + j.my / (2.0 * y) : j.myy;
  if (!m.allFinite())
    throw EvaluationError(mf.label() + ": non-finite condition matrix at (" + std::to_string(x) + ", " +
                          std::to_string(y) + ")");
  return m;
}

namespace {

std::vector<double> spaced(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) return {lo};
  const bool geometric = lo > 0.0 && hi > 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    v[i] = geometric ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  v.back() = hi;
  return v;
}

}  // namespace

std::vector<double> SampleSpec::xs() const { return spaced(x_lo, x_hi, nx); }
std::vector<double> SampleSpec::ys() const { return spaced(y_lo, y_hi, ny); }

SampleSpec default_sample(const MFunction& mf) {
  return SampleSpec{mf.sample_x.lo, mf.sample_x.hi, mf.sample_y.lo, mf.sample_y.hi, 41, 41};
}

PsdReport certify_psd(const MFunction& mf, MatrixKind kind, const SampleSpec& spec, double rho, double tol) {
  PsdReport rep;
  rep.mfunction = mf.label();
  rep.kind = kind;
  rep.domain = spec;
  rep.tolerance = tol;
  rep.worst_trace = std::numeric_limits<double>::infinity();
  rep.worst_det = std::numeric_limits<double>::infinity();
  double worst_score = std::numeric_limits<double>::infinity();
  for (double x : spec.xs()) {
    for (double y : spec.ys()) {
      Mat2 m = condition_matrix(mf, kind, x, y, rho);
      m /= std::max(1.0, m.cwiseAbs().maxCoeff());
      const double tr = m.trace();
      const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      ++rep.samples;
      rep.worst_trace = std::min(rep.worst_trace, tr);
      rep.worst_det = std::min(rep.worst_det, det);
      const double score = std::min(tr, det);
      if (score < worst_score) {
        worst_score = score;
        rep.worst_x = x;
        rep.worst_y = y;
      }
    }
  }
  rep.pass = rep.worst_trace >= -tol && rep.worst_det >= -tol;
  return rep;
}

SignReport check_my_sign(const MFunction& mf, const SampleSpec& spec, double tol) {
  SignReport rep;
  rep.worst_my = std::numeric_limits<double>::infinity();
  for (double x : spec.xs()) {
    for (double y : spec.ys()) {
      const double my = mf.jet(x, y).my;
      if (my < rep.worst_my) {
        rep.worst_my = my;
        rep.worst_x = x;
        rep.worst_y = y;
      }
    }
  }
  rep.pass = rep.worst_my >= -tol;
  return rep;
}

}  // namespace curvlab
