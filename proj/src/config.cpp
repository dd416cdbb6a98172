#include "curvlab/config.hpp"

#include "curvlab/mfunctions.hpp"
#include "curvlab/potentials.hpp"
#include "curvlab/test_functions.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace curvlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_number(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::vector<double> to_numbers(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_number(key, item));
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

const std::set<std::string>& known_checks() {
  static const std::set<std::string> k{"psd", "local", "reverse", "monotone", "integrated-limit",
                                       "integrated-condition"};
  return k;
}

ExperimentConfig from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  for (const auto& [key, v] : kv) {
    if (key == "name") c.name = v;
    else if (key == "potential") c.potential = v;
    else if (key == "mfunctions") c.mfunctions = split_list(v);
    else if (key == "functions") c.functions = split_list(v);
    else if (key == "checks") c.checks = split_list(v);
    else if (key == "expect_fail") c.expect_fail = split_list(v);
    else if (key == "rho") c.rho = to_number(key, v);
    else if (key == "engine") c.engine = v;
    else if (key == "order") c.order = static_cast<int>(to_number(key, v));
    else if (key == "grid.lo") c.grid.lo = to_number(key, v);
    else if (key == "grid.hi") c.grid.hi = to_number(key, v);
    else if (key == "grid.m") c.grid.m = static_cast<int>(to_number(key, v));
    else if (key == "grid.dt") c.grid_dt = to_number(key, v);
    else if (key == "mc.paths") c.mc.paths = static_cast<std::size_t>(to_number(key, v));
    else if (key == "mc.dt") c.mc.dt = to_number(key, v);
    else if (key == "seed") c.mc.seed = static_cast<std::uint64_t>(std::stoull(v));
    else if (key == "schedule.t") c.schedule.t = to_numbers(key, v);
    else if (key == "schedule.alpha") c.schedule.alpha = to_numbers(key, v);
    else if (key == "schedule.x") {
      c.schedule.x.clear();
      for (double x : to_numbers(key, v)) c.schedule.x.push_back(Vec::Constant(1, x));
    } else if (key == "schedule.s_count") c.schedule.s_count = static_cast<int>(to_number(key, v));
    else if (key == "tolerance") c.tolerance = to_number(key, v);
    else if (key == "out") c.out_dir = v;
    else if (key == "format") c.format = v;
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ExperimentConfig::validate() const {
  try {
    (void)parse_potential(potential);
    for (const auto& m : mfunctions) (void)catalog(m);
    for (const auto& f : functions) (void)parse_test_function(f);
    (void)parse_engine_kind(engine);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("unresolved identifier: ") + e.what());
  }
  if (mfunctions.empty()) throw ConfigError("config names no M-function");
  if (checks.empty()) throw ConfigError("config selects no checks");
  for (const auto& c : checks)
    if (!known_checks().count(c)) throw ConfigError("unknown check '" + c + "'");
  for (const auto& c : expect_fail)
    if (!known_checks().count(c)) throw ConfigError("unknown expected-fail check '" + c + "'");
  schedule.validate();
  if (tolerance == 0.0 || (tolerance < 0.0 && tolerance != -1.0)) throw ConfigError("tolerance must be > 0");
  if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
  grid.validate();
}

std::map<std::string, std::string> ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["name"] = name;
  kv["potential"] = potential;
  kv["mfunctions"] = join(mfunctions);
  kv["functions"] = join(functions);
  kv["checks"] = join(checks);
  kv["expect_fail"] = join(expect_fail);
  kv["rho"] = fmt(rho);
  kv["engine"] = engine;
  kv["order"] = std::to_string(order);
  kv["grid.lo"] = fmt(grid.lo);
  kv["grid.hi"] = fmt(grid.hi);
  kv["grid.m"] = std::to_string(grid.m);
  kv["grid.dt"] = fmt(grid_dt);
  kv["mc.paths"] = std::to_string(mc.paths);
  kv["mc.dt"] = fmt(mc.dt);
  kv["seed"] = std::to_string(mc.seed);
  kv["schedule.t"] = join(schedule.t);
  kv["schedule.alpha"] = join(schedule.alpha);
  std::vector<double> xs;
  for (const Vec& x : schedule.x) xs.push_back(x(0));
  kv["schedule.x"] = join(xs);
  kv["schedule.s_count"] = std::to_string(schedule.s_count);
  kv["tolerance"] = fmt(tolerance);
  // Output location and format do not change results, so they stay out of the hash.
  return kv;
}

std::string ExperimentConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : canonical()) text += k + "=" + v + "\n";
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text);
  return os.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  return from_map(kv);
}

ExperimentConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  auto scalar = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw ConfigError("unsupported JSON value " + v.dump());
  };
  std::map<std::string, std::string> kv;
  for (const auto& [key, v] : j.items()) {
    if (v.is_array()) {
      std::vector<std::string> parts;
      for (const auto& e : v) parts.push_back(scalar(e));
      kv[key] = join(parts);
    } else {
      kv[key] = scalar(v);
    }
  }
  return from_map(kv);
}

ExperimentConfig parse_config(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return parse_config_json(text);
  return parse_config_text(text);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "ou-local-suite") {
    c.potential = "gaussian";
    c.engine = "mehler";
    c.rho = 1.0;
    c.mfunctions = {"poincare", "log-sobolev", "bobkov", "beckner:p=1.5", "sqrt-y", "y"};
    c.checks = {"psd", "local"};
    return c;
  }
  if (name == "doublewell-falsify") {
    // rho = 0.5 is a false claim: the double well has curvature -1 at the origin.
    c.potential = "double-well";
    c.engine = "grid";
    c.grid = GridSpec{-6.0, 6.0, 1201};
    c.rho = 0.5;
    c.mfunctions = {"y"};
    c.functions = {"x", "sin"};
    c.checks = {"local"};
    c.expect_fail = {"local"};
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"doublewell-falsify", "ou-local-suite"}; }

}  // namespace curvlab
