#include "curvlab/config.hpp"
#include "curvlab/feynman_kac.hpp"
#include "curvlab/mfunctions.hpp"
#include "curvlab/potentials.hpp"
#include "curvlab/runner.hpp"
#include "curvlab/semigroup.hpp"
#include "curvlab/spectral.hpp"
#include "curvlab/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace curvlab;

namespace {

struct Globals {
  std::uint64_t seed = SimulationSpec{}.seed;
  double tol = -1.0;
  std::string out;
  std::string format = "json";
  bool plots = false;
};

struct EngineOpts {
  std::string potential = "gaussian";
  std::string engine = "mehler";
  int order = 64;
  double grid_lo = -8.0, grid_hi = 8.0;
  int grid_m = 801;
  double grid_dt = 1e-3;
  std::size_t paths = 100000;
  double dt = 1e-3;

  void add(CLI::App* app) {
    app->add_option("--potential", potential, "potential id");
    app->add_option("--engine", engine, "mehler | grid | monte-carlo");
    app->add_option("--order", order, "Gauss-Hermite order");
    app->add_option("--grid-lo", grid_lo);
    app->add_option("--grid-hi", grid_hi);
    app->add_option("--grid-m", grid_m);
    app->add_option("--grid-dt", grid_dt);
    app->add_option("--paths", paths, "Monte Carlo paths");
    app->add_option("--dt", dt, "Monte Carlo time step");
  }
  SimulationSpec mc(const Globals& g) const {
    SimulationSpec s;
    s.paths = paths;
    s.dt = dt;
    s.seed = g.seed;
    return s;
  }
  SemigroupEngine build(const Globals& g) const {
    EngineSpec spec;
    spec.kind = parse_engine_kind(engine);
    spec.order = order;
    spec.grid = GridSpec{grid_lo, grid_hi, grid_m};
    spec.grid_dt = grid_dt;
    spec.mc = mc(g);
    return SemigroupEngine(parse_potential(potential), spec);
  }
};

void emit(const InequalityReport& report, const Globals& g) {
  const std::string text = g.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::filesystem::create_directories(g.out);
    const auto path = std::filesystem::path(g.out) / (sanitize_filename(report.label) + "." + g.format);
    std::ofstream(path, std::ios::binary) << text;
    if (g.plots) emit_plot_data(report, g.out);
    std::cout << (report.pass() ? "PASS " : "FAIL ") << report.label << " -> " << path.string() << '\n';
  }
}

std::vector<TestFunction> functions(const std::vector<std::string>& ids, const MFunction& mf) {
  if (ids.empty()) return suite_for_domain(mf.x_domain());
  std::vector<TestFunction> out;
  for (const auto& id : ids) out.push_back(parse_test_function(id));
  return out;
}

std::vector<Vec> points(const std::vector<double>& xs) {
  std::vector<Vec> out;
  for (double x : xs) out.push_back(Vec::Constant(1, x));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab: numerical checks of curvature conditions and local functional inequalities"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  CLI::Option* seed_opt = app.add_option("--seed", g.seed, "Monte Carlo seed");
  app.add_option("--tol", g.tol, "pass tolerance (default: the engine's own)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--format", g.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--plots", g.plots, "also write margin and H(s) curves as CSV");

  bool all_pass = true;

  // verify / verify-reverse
  for (const bool reverse : {false, true}) {
    auto* cmd = app.add_subcommand(reverse ? "verify-reverse" : "verify",
                                   reverse ? "reverse local inequality" : "forward local inequality");
    auto eo = std::make_shared<EngineOpts>();
    auto mf = std::make_shared<std::string>(reverse ? "reverse-poincare" : "poincare");
    auto fs = std::make_shared<std::vector<std::string>>();
    auto rho = std::make_shared<double>(1.0);
    auto sch = std::make_shared<Schedule>(Schedule::default_1d());
    auto xs = std::make_shared<std::vector<double>>(std::vector<double>{-2, -1, -0.5, 0, 0.5, 1, 2});
    eo->add(cmd);
    cmd->add_option("--mf", *mf, "M-function id");
    cmd->add_option("--f", *fs, "test function ids (default: suite for the domain)");
    cmd->add_option("--rho", *rho, "claimed curvature bound");
    cmd->add_option("--t", sch->t, "times")->delimiter(',');
    cmd->add_option("--alpha", sch->alpha, "alpha values")->delimiter(',');
    cmd->add_option("--x", *xs, "evaluation points")->delimiter(',');
    cmd->callback([=, &g, &all_pass] {
      sch->x = points(*xs);
      const SemigroupEngine engine = eo->build(g);
      const MFunction m = catalog(*mf);
      for (const auto& f : functions(*fs, m)) {
        const auto r = reverse ? verify_reverse_local(m, engine, f, *sch, *rho, {g.tol})
                               : verify_local(m, engine, f, *sch, *rho, {g.tol});
        all_pass &= r.pass();
        emit(r, g);
      }
    });
  }

  {
    auto* cmd = app.add_subcommand("monotone", "H(s) monotonicity along the interpolation");
    auto eo = std::make_shared<EngineOpts>();
    auto mf = std::make_shared<std::string>("poincare");
    auto fs = std::make_shared<std::vector<std::string>>();
    auto t = std::make_shared<double>(1.0);
    auto alpha = std::make_shared<double>(0.0);
    auto s_count = std::make_shared<int>(21);
    auto rho = std::make_shared<double>(1.0);
    auto xs = std::make_shared<std::vector<double>>(std::vector<double>{-1, 0, 1});
    auto dir = std::make_shared<std::string>("forward");
    eo->add(cmd);
    cmd->add_option("--mf", *mf);
    cmd->add_option("--f", *fs);
    cmd->add_option("--t", *t);
    cmd->add_option("--alpha", *alpha);
    cmd->add_option("--s-count", *s_count);
    cmd->add_option("--rho", *rho);
    cmd->add_option("--x", *xs)->delimiter(',');
    cmd->add_option("--direction", *dir)->check(CLI::IsMember({"forward", "reverse"}));
    cmd->callback([=, &g, &all_pass] {
      const SemigroupEngine engine = eo->build(g);
      const MFunction m = catalog(*mf);
      for (const auto& f : functions(*fs, m)) {
        const auto r = verify_H_monotone(m, engine, f, *t, *alpha, *s_count, points(*xs), *rho,
                                         *dir == "forward" ? Direction::Forward : Direction::Reverse, {g.tol});
        all_pass &= r.pass();
        emit(r, g);
      }
    });
  }

  {
    auto* cmd = app.add_subcommand("integrated", "integrated limit, exp-integrability bound, or integrated condition");
    auto potential = std::make_shared<std::string>("gaussian");
    auto mf = std::make_shared<std::string>("poincare");
    auto fs = std::make_shared<std::vector<std::string>>();
    auto rho = std::make_shared<double>(1.0);
    auto variant = std::make_shared<std::string>("limit");
    cmd->add_option("--potential", *potential);
    cmd->add_option("--mf", *mf);
    cmd->add_option("--f", *fs);
    cmd->add_option("--rho", *rho);
    cmd->add_option("--variant", *variant)->check(CLI::IsMember({"limit", "exp-bound", "plain", "enhanced"}));
    cmd->callback([=, &g, &all_pass] {
      const Potential p = parse_potential(*potential);
      QuadratureSpec q;
      if (g.tol > 0.0) q.tolerance = g.tol;
      const MFunction m = catalog(*mf);
      for (const auto& f : functions(*fs, m)) {
        InequalityReport r;
        if (*variant == "limit") r = verify_integrated_limit(m, p, f, q, *rho);
        else if (*variant == "exp-bound") r = verify_exp_integrability_bound(p, f, q, *rho);
        else r = verify_integrated_condition(m, p, f, q, *rho, parse_condition_variant(*variant));
        all_pass &= r.pass();
        emit(r, g);
      }
    });
  }

  {
    auto* cmd = app.add_subcommand("psd-check", "sampled positive semi-definiteness of a condition matrix");
    auto mf = std::make_shared<std::string>("log-sobolev");
    auto kind = std::make_shared<std::string>("A");
    auto rho = std::make_shared<double>(1.0);
    cmd->add_option("--mf", *mf);
    cmd->add_option("--kind", *kind, "A | B | A-integrated | A-prime-integrated");
    cmd->add_option("--rho", *rho);
    cmd->callback([=, &g, &all_pass] {
      const MFunction m = catalog(*mf);
      const PsdReport r = certify_psd(m, parse_matrix_kind(*kind), default_sample(m), *rho,
                                      g.tol > 0.0 ? g.tol : 1e-10);
      all_pass &= r.pass;
      const std::string text = to_json(r).dump(2) + "\n";
      if (g.out.empty()) {
        std::cout << text;
      } else {
        std::filesystem::create_directories(g.out);
        std::ofstream(std::filesystem::path(g.out) / ("psd_" + sanitize_filename(*mf) + ".json")) << text;
      }
    });
  }

  {
    auto* cmd = app.add_subcommand("feynman-kac", "path simulation, supermartingale, gradient bound, commutation");
    auto eo = std::make_shared<EngineOpts>();
    eo->engine = "grid";
    auto mode = std::make_shared<std::string>("summary");
    auto x0 = std::make_shared<std::vector<double>>(std::vector<double>{1.0});
    auto ts = std::make_shared<std::vector<double>>(std::vector<double>{0.25, 0.5, 1.0});
    auto fs = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"sin"});
    auto cert_kind = std::make_shared<std::string>("spherical");
    auto p = std::make_shared<double>(2.0);
    auto raw = std::make_shared<std::string>();
    eo->add(cmd);
    cmd->add_option("--mode", *mode)->check(
        CLI::IsMember({"summary", "supermartingale", "gradient", "commutation"}));
    cmd->add_option("--x0", *x0, "start point(s), one dimension each")->delimiter(',');
    cmd->add_option("--t", *ts)->delimiter(',');
    cmd->add_option("--f", *fs);
    cmd->add_option("--cert", *cert_kind, "spherical | product-power | constant");
    cmd->add_option("--p", *p);
    cmd->add_option("--raw-csv", *raw, "dump raw path states to this file (summary mode)");
    cmd->callback([=, &g, &all_pass] {
      const Potential pot = parse_potential(eo->potential);
      const SimulationSpec spec = eo->mc(g);
      auto make_cert = [&] {
        if (*cert_kind == "constant") return make_constant_certificate(pot.dim(), *p, *p * rho_min(pot, Vec::Zero(pot.dim())));
        return make_lyapunov(*cert_kind, pot.alpha(), *p, pot.dim());
      };
      if (*mode == "summary") {
        const PathBatch b = simulate(pot, Vec::Constant(1, x0->front()), *ts, spec);
        std::cout << summarize(b).dump(2) << '\n';
        if (!raw->empty()) std::ofstream(*raw) << states_csv(b);
        return;
      }
      if (*mode == "supermartingale") {
        const LyapunovCertificate cert = make_cert();
        for (double x : *x0) {
          const auto r = supermartingale_check(pot, cert, Vec::Constant(1, x), *ts, spec);
          all_pass &= r.pass();
          emit(r, g);
        }
        return;
      }
      EngineOpts lhs = *eo;
      if (pot.is_gaussian()) lhs.engine = "mehler";
      const SemigroupEngine engine = lhs.build(g);
      for (const auto& id : *fs) {
        const TestFunction f = parse_test_function(id);
        const auto r = *mode == "gradient" ? gradient_bound(pot, f, points(*x0), *ts, spec, engine)
                                           : commutation_check(pot, make_cert(), f, points(*x0), *ts, spec, engine);
        all_pass &= r.pass();
        emit(r, g);
      }
    });
  }

  {
    auto* cmd = app.add_subcommand("houdre-kagan", "alternating derivative sums against the exact variance");
    auto coeffs = std::make_shared<std::vector<double>>();
    auto N = std::make_shared<int>(2);
    cmd->add_option("--coeffs", *coeffs, "monomial coefficients c0,c1,...")->delimiter(',')->required();
    cmd->add_option("--N", *N);
    cmd->callback([=, &g, &all_pass] {
      const PolySeries f(*coeffs);
      const HoudreKagan hk = houdre_kagan(f, *N);
      std::ostringstream os;
      os << std::setprecision(17) << "m,derivative_integral,partial_sum,variance\n";
      for (std::size_t m = 0; m < hk.partial_sums.size(); ++m)
        os << m + 1 << ',' << hk.derivative_integrals[m] << ',' << hk.partial_sums[m] << ',' << hk.variance << '\n';
      const double slack = 1e-9 * (1.0 + hk.variance);
      all_pass &= hk.lower <= hk.variance + slack && hk.variance <= hk.upper + slack;
      if (g.out.empty()) {
        std::cout << os.str();
      } else {
        std::filesystem::create_directories(g.out);
        std::ofstream(std::filesystem::path(g.out) / "houdre_kagan.csv") << os.str();
      }
    });
  }

  {
    auto* cmd = app.add_subcommand("lyapunov-scan", "build a Lyapunov certificate and scan its margin");
    auto kind = std::make_shared<std::string>("spherical");
    auto alpha = std::make_shared<double>(1.5);
    auto p = std::make_shared<double>(2.0);
    auto n = std::make_shared<int>(1);
    auto scan = std::make_shared<ScanSpec>();
    cmd->add_option("--kind", *kind);
    cmd->add_option("--alpha", *alpha);
    cmd->add_option("--p", *p);
    cmd->add_option("--n", *n);
    cmd->add_option("--radius", scan->radius);
    cmd->add_option("--points-1d", scan->points_1d);
    cmd->add_option("--points-nd", scan->points_nd);
    cmd->callback([=, &all_pass] {
      nlohmann::json j;
      j["kind"] = *kind;
      j["alpha"] = *alpha;
      j["p"] = *p;
      j["n"] = *n;
      try {
        const LyapunovCertificate c = make_lyapunov(*kind, *alpha, *p, *n, *scan);
        j["c"] = c.c;
        j["beta"] = c.beta();
        j["theta"] = c.theta;
        if (std::isfinite(c.c_alpha)) j["c_alpha"] = c.c_alpha;
        j["worst_margin"] = c.scan->worst_margin;
        j["worst_point"] = to_json(c.scan->worst_point);
        j["samples"] = c.scan->samples;
        j["pass"] = c.scan->pass();
        all_pass &= c.scan->pass();
      } catch (const CertificationError& e) {
        j["error"] = e.what();
        j["worst_margin"] = e.worst_margin();
        j["worst_point"] = to_json(e.worst_point());
        j["pass"] = false;
        all_pass = false;
      }
      std::cout << j.dump(2) << '\n';
    });
  }

  app.add_subcommand("list", "list catalogs and presets")->callback([] { std::cout << list_catalogs(); });

  {
    auto* cmd = app.add_subcommand("run", "run a config file or a built-in preset");
    auto target = std::make_shared<std::string>();
    cmd->add_option("config", *target, "config path or preset name")->required();
    cmd->callback([=, &g, &all_pass] {
      ExperimentConfig c = std::filesystem::exists(*target) ? load_config(*target) : preset(*target);
      if (!g.out.empty()) c.out_dir = g.out;
      if (g.tol > 0.0) c.tolerance = g.tol;
      if (seed_opt->count() > 0) c.mc.seed = g.seed;
      c.format = g.format;
      const RunSummary s = run(c);
      for (const auto& ch : s.checks)
        std::cout << (ch.ok() ? "ok   " : "FAIL ") << ch.id << (ch.expected_fail ? " (expected to fail)" : "")
                  << (ch.pass ? " pass" : " fail") << " worst_margin=" << ch.worst_margin << '\n';
      std::cout << "config " << s.config_hash << ": " << (s.ok() ? "OK" : "NOT OK") << '\n';
      all_pass &= s.ok();
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return all_pass ? 0 : 1;
}
