#include "curvlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace curvlab {

namespace {

double slack(const EvalRecord& r, double tol) { return r.margin + tol + 4.0 * r.std_error; }

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::string csv_point(const Vec& x) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ";" : "") << x(i);
  return os.str();
}

}  // namespace

nlohmann::json to_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

InequalityReport::InequalityReport(std::string label_, double tolerance_, std::string engine_)
    : label(std::move(label_)), engine(std::move(engine_)), tolerance(tolerance_) {}

EvalRecord& InequalityReport::add(EvalRecord record) {
  record.margin = record.rhs - record.lhs;
  records.push_back(std::move(record));
  return records.back();
}

void InequalityReport::merge(const InequalityReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
}

bool InequalityReport::pass() const {
  return precondition_ok && std::all_of(records.begin(), records.end(), [&](const EvalRecord& r) {
    return !std::isnan(r.margin) && slack(r, tolerance) >= 0.0;
  });
}

std::size_t InequalityReport::failures() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const EvalRecord& r) {
    return std::isnan(r.margin) || slack(r, tolerance) < 0.0;
  }));
}

const EvalRecord* InequalityReport::worst() const {
  const EvalRecord* w = nullptr;
  for (const auto& r : records) {
    if (std::isnan(r.margin)) return &r;
    if (!w || slack(r, tolerance) < slack(*w, tolerance)) w = &r;
  }
  return w;
}

double InequalityReport::worst_margin() const {
  const EvalRecord* w = worst();
  return w ? w->margin : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json InequalityReport::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["engine"] = engine;
  j["tolerance"] = tolerance;
  j["pass"] = pass();
  j["failures"] = failures();
  j["precondition_ok"] = precondition_ok;
  if (!precondition_note.empty()) j["precondition_note"] = precondition_note;
  j["worst_margin"] = number(worst_margin());
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json e;
    e["x"] = curvlab::to_json(r.x);
    e["t"] = number(r.t);
    e["alpha"] = number(r.alpha);
    e["s"] = number(r.s);
    e["lhs"] = number(r.lhs);
    e["rhs"] = number(r.rhs);
    e["margin"] = number(r.margin);
    e["std_error"] = number(r.std_error);
    if (!r.note.empty()) e["note"] = r.note;
    recs.push_back(std::move(e));
  }
  j["records"] = std::move(recs);
  return j;
}

std::string InequalityReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "x,t,alpha,s,lhs,rhs,margin,std_error\n";
  for (const auto& r : records) {
    os << csv_point(r.x) << ',' << r.t << ',' << r.alpha << ',' << r.s << ',' << r.lhs << ',' << r.rhs << ','
       << r.margin << ',' << r.std_error << '\n';
  }
  return os.str();
}

Schedule Schedule::default_1d() { return points_1d({-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}); }

Schedule Schedule::points_1d(const std::vector<double>& xs) {
  Schedule s;
  for (double v : xs) s.x.push_back(Vec::Constant(1, v));
  return s;
}

void Schedule::validate() const {
  if (t.empty() || alpha.empty() || x.empty()) throw ConfigError("schedule needs at least one t, alpha and x value");
  for (double v : t)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("schedule times must be finite and >= 0");
  for (double v : alpha)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("schedule alpha values must be finite and >= 0");
  if (s_count < 2) throw ConfigError("s_count must be at least 2");
}

}  // namespace curvlab
