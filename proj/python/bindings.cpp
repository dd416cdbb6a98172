#include "curvlab/config.hpp"
#include "curvlab/feynman_kac.hpp"
#include "curvlab/mfunctions.hpp"
#include "curvlab/potentials.hpp"
#include "curvlab/runner.hpp"
#include "curvlab/semigroup.hpp"
#include "curvlab/special_functions.hpp"
#include "curvlab/spectral.hpp"
#include "curvlab/verify.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace curvlab;

namespace {

Vec point(const std::vector<double>& x) { return Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())); }

std::vector<double> values(const Vec& v) { return {v.data(), v.data() + v.size()}; }

py::dict report_dict(const InequalityReport& r) {
  py::dict d;
  d["label"] = r.label;
  d["pass"] = r.pass();
  d["worst_margin"] = r.worst_margin();
  d["json"] = r.to_json().dump();
  return d;
}

SemigroupEngine engine_for(const std::string& potential, const std::string& engine) {
  EngineSpec spec;
  spec.kind = parse_engine_kind(engine);
  return SemigroupEngine(parse_potential(potential), spec);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical checks of curvature conditions and local functional inequalities";

  py::register_exception<Error>(m, "CurvlabError");

  m.def("rho_min", [](const std::string& potential, const std::vector<double>& x) {
    return rho_min(parse_potential(potential), point(x));
  });
  m.def("potential_gradient", [](const std::string& potential, const std::vector<double>& x) {
    return values(parse_potential(potential).gradient(point(x)));
  });
  m.def("mehler_apply", [](const std::string& f, double t, const std::vector<double>& x, int order) {
    return mehler_apply(parse_test_function(f), t, point(x), order);
  }, py::arg("f"), py::arg("t"), py::arg("x"), py::arg("order") = 64);

  m.def("isoperimetric_I", &isoperimetric_I);
  m.def("exp_integrability_F", &exp_integrability_F);
  m.def("g_alpha", &g_alpha);
  m.def("h_alpha", &h_alpha);

  m.def("mfunction_value", [](const std::string& id, double x, double y) { return catalog(id).value(x, y); });
  m.def("catalog_names", &catalog_names);
  m.def("psd_check", [](const std::string& id, const std::string& kind) {
    const MFunction mf = catalog(id);
    return to_json(certify_psd(mf, parse_matrix_kind(kind))).dump();
  });

  m.def("verify_local", [](const std::string& mf, const std::string& f, const std::string& potential,
                           const std::string& engine, double rho, bool reverse) {
    const SemigroupEngine e = engine_for(potential, engine);
    const Schedule s = Schedule::default_1d();
    return report_dict(reverse ? verify_reverse_local(catalog(mf), e, parse_test_function(f), s, rho)
                               : verify_local(catalog(mf), e, parse_test_function(f), s, rho));
  }, py::arg("mf"), py::arg("f"), py::arg("potential") = "gaussian", py::arg("engine") = "mehler",
     py::arg("rho") = 1.0, py::arg("reverse") = false);

  m.def("houdre_kagan", [](const std::vector<double>& coeffs, int N) {
    const HoudreKagan hk = houdre_kagan(PolySeries(coeffs), N);
    py::dict d;
    d["lower"] = hk.lower;
    d["upper"] = hk.upper;
    d["variance"] = hk.variance;
    d["partial_sums"] = hk.partial_sums;
    return d;
  });

  m.def("lyapunov", [](const std::string& kind, double alpha, double p, int n) {
    const LyapunovCertificate c = make_lyapunov(kind, alpha, p, n);
    py::dict d;
    d["c"] = c.c;
    d["beta"] = c.beta();
    d["theta"] = c.theta;
    d["worst_margin"] = c.scan ? c.scan->worst_margin : std::nan("");
    d["pass"] = c.scan && c.scan->pass();
    return d;
  });

  m.def("run_preset", [](const std::string& name) {
    const RunSummary s = run(preset(name));
    py::dict d;
    d["ok"] = s.ok();
    d["config_hash"] = s.config_hash;
    d["report"] = s.report_json().dump();
    return d;
  });
  m.def("config_hash", [](const std::string& text) { return parse_config(text).hash(); });
}
