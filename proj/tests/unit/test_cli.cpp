#include "doctest.h"

#include "curvlab/config.hpp"
#include "curvlab/runner.hpp"
#include "curvlab/verify.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace curvlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("curvlab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const char* exe = std::getenv("CURVLAB_CLI");
  REQUIRE(exe != nullptr);
  const std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kText = R"(# OU local checks
name = small
potential = gaussian
mfunctions = poincare, log-sobolev
functions = x, sin
checks = psd, local
schedule.t = 0, 0.5
schedule.alpha = 0, 1
schedule.x = -1, 0, 1
)";

}  // namespace

TEST_CASE("text and JSON configs parse to the same hash") {
  const ExperimentConfig a = parse_config(kText);
  CHECK(a.name == "small");
  CHECK(a.mfunctions == std::vector<std::string>{"poincare", "log-sobolev"});
  CHECK(a.schedule.x.size() == 3);
  const ExperimentConfig b = parse_config(R"({"schedule.x": [-1, 0, 1], "functions": ["x", "sin"],
      "checks": ["psd", "local"], "name": "small", "mfunctions": "poincare,log-sobolev",
      "schedule.t": [0, 0.5], "potential": "gaussian", "schedule.alpha": [0, 1]})");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);

  // Key order and comments do not matter; values do.
  const ExperimentConfig c = parse_config("schedule.x = -1,0,1\nchecks=psd,local\nname=small\n"
                                          "functions=x,sin\nmfunctions=poincare,log-sobolev\n"
                                          "schedule.alpha=0,1\nschedule.t=0,0.5\n# trailing\n");
  CHECK(a.hash() == c.hash());
  ExperimentConfig d = a;
  d.rho = 0.9;
  CHECK(a.hash() != d.hash());
  d = a;
  d.out_dir = "/elsewhere";
  CHECK(a.hash() == d.hash());
}

TEST_CASE("config validation errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("rho = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("rho = 1\nrho = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);

  ExperimentConfig c = parse_config(kText);
  c.validate();
  ExperimentConfig bad = c;
  bad.schedule.t.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.mfunctions = {"no-such-m"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.checks = {"teleport"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.potential = "nowhere";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
  CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("presets run to their expected outcomes") {
  const RunSummary ou = run(preset("ou-local-suite"));
  CHECK(ou.ok());
  CHECK_FALSE(ou.checks.empty());
  for (const auto& c : ou.checks) {
    CAPTURE(c.id);
    CHECK(c.pass);
  }

  const RunSummary dw = run(preset("doublewell-falsify"));
  CHECK(dw.ok());
  double worst = 0.0;
  for (const auto& c : dw.checks) {
    CHECK(c.expected_fail);
    CHECK_FALSE(c.pass);
    worst = std::min(worst, c.worst_margin);
  }
  CHECK(worst <= -1e-3);
}

TEST_CASE("reports are byte-identical across runs and write the expected files") {
  ExperimentConfig c = parse_config(kText);
  c.checks = {"psd", "local", "monotone"};
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  c.out_dir = a.string();
  const RunSummary first = run(c);
  c.out_dir = b.string();
  const RunSummary second = run(c);
  CHECK(first.ok());
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(first.report_json() == second.report_json());
  CHECK(fs::exists(a / "summary.json"));
  CHECK(slurp(a / "report.json").find(first.config_hash) != std::string::npos);

  c.format = "csv";
  c.out_dir = scratch("csv").string();
  const RunSummary csv = run(c);
  for (const auto& ch : csv.checks) CHECK(fs::exists(fs::path(c.out_dir) / (sanitize_filename(ch.id) + ".csv")));
}

TEST_CASE("plot data: H curves and margin curves") {
  const SemigroupEngine engine(make_gaussian_potential(1), EngineSpec{});
  const InequalityReport h = verify_H_monotone(catalog("log-sobolev"), engine, parse_test_function("exp:1,0.3"), 1.0,
                                               0.0, 21, {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)}, 1.0,
                                               Direction::Forward);
  const std::string curve = h_curve_csv(h, Vec::Constant(1, 0.0));
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 1 + 21);
  const auto written = emit_plot_data(h, scratch("plots").string());
  CHECK(written.size() == 3);

  Schedule s = Schedule::default_1d();
  const InequalityReport p = verify_local(catalog("poincare"), engine, parse_test_function("x"), s, 1.0);
  std::istringstream rows(margin_curve_csv(p));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "t,alpha,x,margin");
  int n = 0;
  while (std::getline(rows, line)) {
    ++n;
    CHECK(std::abs(std::stod(line.substr(line.rfind(',') + 1))) <= 1e-9);
  }
  CHECK(n == static_cast<int>(p.records.size()));
}

TEST_CASE("catalog listing") {
  const std::string text = list_catalogs();
  for (const char* needle : {"log-sobolev", "bobkov", "double-well", "ou-local-suite", "doublewell-falsify"})
    CHECK(text.find(needle) != std::string::npos);
}

TEST_CASE("command line: exit codes and outputs") {
  const fs::path dir = scratch("exe");
  CHECK(run_cli("list", dir / "list.txt") == 0);
  CHECK(slurp(dir / "list.txt").find("reverse-poincare") != std::string::npos);

  CHECK(run_cli("verify --mf log-sobolev --f exp:1,0.3 --t 0,0.5 --out " + (dir / "v").string(), dir / "v.txt") == 0);
  CHECK(fs::exists(dir / "v" / "local_log-sobolev_exp_1_0.3.json"));

  // A false curvature claim fails the check and the exit status says so.
  CHECK(run_cli("verify --potential double-well --engine grid --grid-lo -6 --grid-hi 6 --grid-m 601 --mf y --f sin "
                "--rho 0.5",
                dir / "dw.txt") == 1);

  CHECK(run_cli("run doublewell-falsify --out " + (dir / "run").string(), dir / "run.txt") == 0);
  CHECK(fs::exists(dir / "run" / "report.json"));
  CHECK(fs::exists(dir / "run" / "summary.json"));

  CHECK(run_cli("houdre-kagan --coeffs 0,0,0,1 --N 1", dir / "hk.txt") == 0);
  std::istringstream hk(slurp(dir / "hk.txt"));
  std::string row;
  std::getline(hk, row);
  CHECK(row == "m,derivative_integral,partial_sum,variance");
  std::vector<double> last;
  while (std::getline(hk, row)) {
    last.clear();
    std::istringstream cells(row);
    for (std::string cell; std::getline(cells, cell, ',');) last.push_back(std::stod(cell));
  }
  REQUIRE(last.size() == 4);
  CHECK(last[0] == 3.0);
  CHECK(last[1] == doctest::Approx(36.0).epsilon(1e-12));
  CHECK(last[2] == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(last[3] == doctest::Approx(15.0).epsilon(1e-12));

  CHECK(run_cli("lyapunov-scan --alpha 1.5", dir / "ly.txt") == 0);
  CHECK(run_cli("lyapunov-scan --alpha 1.0", dir / "ly1.txt") == 1);

  CHECK(run_cli("run no-such-preset", dir / "bad.txt") == 2);
  CHECK(run_cli("frobnicate", dir / "bad2.txt") != 0);
}
