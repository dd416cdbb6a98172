#include "curvlab/runner.hpp"

#include "curvlab/potentials.hpp"
#include "curvlab/semigroup.hpp"
#include "curvlab/test_functions.hpp"
#include "curvlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace curvlab {

namespace {

struct Task {
  std::string id;
  bool expected_fail = false;
  std::function<InequalityReport()> body;
};

bool is_reverse(const std::string& mf_id) { return mf_id.rfind("reverse-", 0) == 0; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::vector<TestFunction> functions_for(const ExperimentConfig& config, const MFunction& mf) {
  if (config.functions.empty()) return suite_for_domain(mf.x_domain());
  std::vector<TestFunction> out;
  for (const auto& id : config.functions) {
    TestFunction f = parse_test_function(id);
    if (mf.x_domain().contains_range(f.range_lo, f.range_hi)) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

bool RunSummary::ok() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok(); });
}

nlohmann::json RunSummary::report_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["engine"] = engine;
  j["ok"] = ok();
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["id"] = c.id;
    e["pass"] = c.pass;
    e["expected_fail"] = c.expected_fail;
    e["ok"] = c.ok();
    e["report"] = c.report.to_json();
    list.push_back(std::move(e));
  }
  j["checks"] = std::move(list);
  return j;
}

nlohmann::json RunSummary::summary_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["engine"] = engine;
  j["ok"] = ok();
  j["wall_seconds"] = wall_seconds;
  j["timestamp"] = static_cast<long long>(std::time(nullptr));
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["id"] = c.id;
    e["pass"] = c.pass;
    e["expected_fail"] = c.expected_fail;
    e["worst_margin"] = std::isfinite(c.worst_margin) ? nlohmann::json(c.worst_margin) : nlohmann::json(nullptr);
    e["records"] = c.report.records.size();
    list.push_back(std::move(e));
  }
  j["checks"] = std::move(list);
  return j;
}

InequalityReport psd_as_report(const PsdReport& psd) {
  InequalityReport r("psd/" + psd.mfunction + "/" + to_string(psd.kind), psd.tolerance, "sampled");
  EvalRecord e;
  e.x = Vec{{psd.worst_x, psd.worst_y}};
  e.lhs = 0.0;
  e.rhs = std::min(psd.worst_trace, psd.worst_det);
  e.note = "worst scaled trace " + std::to_string(psd.worst_trace) + ", det " + std::to_string(psd.worst_det) +
           " over " + std::to_string(psd.samples) + " samples";
  r.add(std::move(e));
  if (!psd.pass) {
    r.precondition_ok = false;
    r.precondition_note = "matrix is not positive semi-definite on the sample";
  }
  return r;
}

nlohmann::json to_json(const PsdReport& psd) {
  nlohmann::json j;
  j["mfunction"] = psd.mfunction;
  j["kind"] = to_string(psd.kind);
  j["domain"] = {{"x", {psd.domain.x_lo, psd.domain.x_hi}},
                 {"y", {psd.domain.y_lo, psd.domain.y_hi}},
                 {"nx", psd.domain.nx},
                 {"ny", psd.domain.ny}};
  j["samples"] = psd.samples;
  j["worst_det"] = psd.worst_det;
  j["worst_trace"] = psd.worst_trace;
  j["worst_point"] = {psd.worst_x, psd.worst_y};
  j["tolerance"] = psd.tolerance;
  j["pass"] = psd.pass;
  return j;
}

RunSummary run(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Potential potential = parse_potential(config.potential);
  EngineSpec spec;
  spec.kind = parse_engine_kind(config.engine);
  spec.order = config.order;
  spec.grid = config.grid;
  spec.grid_dt = config.grid_dt;
  spec.mc = config.mc;
  std::unique_ptr<SemigroupEngine> engine;
  try {
    engine = std::make_unique<SemigroupEngine>(potential, spec);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("engine: ") + e.what());
  }
  if (!config.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + config.out_dir + ": " + ec.message());
  }

  auto selected = [&](const std::string& c) {
    return std::find(config.checks.begin(), config.checks.end(), c) != config.checks.end();
  };
  auto expected = [&](const std::string& c) {
    return std::find(config.expect_fail.begin(), config.expect_fail.end(), c) != config.expect_fail.end();
  };
  VerifyOptions options;
  options.tolerance = config.tolerance;
  QuadratureSpec quad;
  if (config.tolerance > 0.0) quad.tolerance = config.tolerance;

  std::vector<Task> tasks;
  const SemigroupEngine& eng = *engine;
  const Schedule& sch = config.schedule;
  const double rho = config.rho;
  for (const auto& mf_id : config.mfunctions) {
    const MFunction mf = catalog(mf_id);
    const MatrixKind kind = is_reverse(mf_id) ? MatrixKind::Reverse : MatrixKind::Forward;
    if (selected("psd"))
      tasks.push_back({"psd/" + mf_id, expected("psd"), [mf, kind] { return psd_as_report(certify_psd(mf, kind)); }});
    for (const TestFunction& f : functions_for(config, mf)) {
      const std::string tail = "/" + mf_id + "/" + f.label();
      if (selected("local"))
        tasks.push_back({"local" + tail, expected("local"),
                         [mf, f, &eng, &sch, rho, options] { return verify_local(mf, eng, f, sch, rho, options); }});
      if (selected("reverse"))
        tasks.push_back({"reverse" + tail, expected("reverse"), [mf, f, &eng, &sch, rho, options] {
                           return verify_reverse_local(mf, eng, f, sch, rho, options);
                         }});
      if (selected("monotone"))
        tasks.push_back({"monotone" + tail, expected("monotone"), [mf, f, &eng, &sch, rho, options, mf_id] {
                           const double t = *std::max_element(sch.t.begin(), sch.t.end());
                           return verify_H_monotone(mf, eng, f, t, sch.alpha.front(), sch.s_count, sch.x, rho,
                                                    is_reverse(mf_id) ? Direction::Reverse : Direction::Forward,
                                                    options);
                         }});
      if (selected("integrated-limit"))
        tasks.push_back({"integrated-limit" + tail, expected("integrated-limit"), [mf, f, &potential, quad, rho] {
                           return verify_integrated_limit(mf, potential, f, quad, rho);
                         }});
      if (selected("integrated-condition"))
        for (auto variant : {ConditionVariant::Plain, ConditionVariant::Enhanced})
          tasks.push_back({"integrated-condition-" + to_string(variant) + tail, expected("integrated-condition"),
                           [mf, f, &potential, quad, rho, variant] {
                             return verify_integrated_condition(mf, potential, f, quad, rho, variant);
                           }});
    }
  }
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });

  RunSummary summary;
  summary.config_hash = config.hash();
  summary.engine = eng.describe();
  summary.checks.resize(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CheckResult& c = summary.checks[i];
      c.id = tasks[i].id;
      c.expected_fail = tasks[i].expected_fail;
      try {
        c.report = tasks[i].body();
      } catch (const Error& e) {
        c.report = InequalityReport(tasks[i].id, 0.0, eng.describe());
        c.report.precondition_ok = false;
        c.report.precondition_note = e.what();
      }
      c.pass = c.report.pass();
      c.worst_margin = c.report.worst_margin();
    }
  });
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    if (config.format == "json") {
      write_file(dir / "report.json", summary.report_json().dump(2) + "\n");
    } else {
      for (const auto& c : summary.checks) write_file(dir / (sanitize_filename(c.id) + ".csv"), c.report.to_csv());
    }
    write_file(dir / "summary.json", summary.summary_json().dump(2) + "\n");
  }
  return summary;
}

std::string list_catalogs() {
  std::ostringstream os;
  os << "potentials:\n";
  for (const char* p : {"gaussian:n=1", "spherical:alpha=1.5:n=1", "product-power:alpha=1.5:n=2", "double-well"})
    os << "  " << p << '\n';
  os << "mfunctions:\n";
  for (const auto& m : catalog_names()) os << "  " << m << '\n';
  os << "functions:\n";
  for (const auto& f : default_suite()) os << "  " << f.label() << '\n';
  os << "presets:\n";
  for (const auto& p : preset_names()) os << "  " << p << '\n';
  return os.str();
}

std::string sanitize_filename(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
    out += keep ? ch : '_';
  }
  return out;
}

std::string margin_curve_csv(const InequalityReport& report) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,alpha,x,margin\n";
  for (const auto& r : report.records) os << r.t << ',' << r.alpha << ',' << (r.x.size() ? r.x(0) : 0.0) << ',' << r.margin << '\n';
  return os.str();
}

std::string h_curve_csv(const InequalityReport& monotone, const Vec& x) {
  std::vector<const EvalRecord*> rows;
  for (const auto& r : monotone.records)
    if (r.x.size() == x.size() && (r.x.array() == x.array()).all() && !std::isnan(r.s)) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const EvalRecord* a, const EvalRecord* b) { return a->s < b->s; });
  std::ostringstream os;
  os << std::setprecision(17) << "s,H\n";
  for (const EvalRecord* r : rows) os << r->s << ',' << r->lhs << '\n';
  if (!rows.empty()) os << rows.back()->t << ',' << rows.back()->rhs << '\n';
  return os.str();
}

std::vector<std::string> emit_plot_data(const InequalityReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  const std::string base = sanitize_filename(report.label);
  const auto margins = std::filesystem::path(dir) / (base + ".margins.csv");
  write_file(margins, margin_curve_csv(report));
  written.push_back(margins.string());
  std::vector<Vec> starts;
  for (const auto& r : report.records) {
    if (std::isnan(r.s)) continue;
    if (std::none_of(starts.begin(), starts.end(), [&](const Vec& v) { return v.size() == r.x.size() && (v.array() == r.x.array()).all(); }))
      starts.push_back(r.x);
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto path = std::filesystem::path(dir) / (base + ".H." + std::to_string(i) + ".csv");
    write_file(path, h_curve_csv(report, starts[i]));
    written.push_back(path.string());
  }
  return written;
}

}  // namespace curvlab
