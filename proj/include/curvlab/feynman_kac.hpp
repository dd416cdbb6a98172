#pragma once

#include "curvlab/common.hpp"
#include "curvlab/potentials.hpp"
#include "curvlab/report.hpp"
#include "curvlab/sde.hpp"
#include "curvlab/semigroup.hpp"
#include "curvlab/test_functions.hpp"

#include <nlohmann/json.hpp>

namespace curvlab {

/// Paths observed at `times`, accumulating int rho(X_s) ds and, when log_g is given, int (Lg/g)(X_s) ds.
PathBatch simulate(const Potential& potential, const Vec& x0, std::vector<double> times, const SimulationSpec& spec,
                   const LogFunction* log_g = nullptr);
PathBatch simulate(const Potential& potential, const Vec& x0, double t, double dt, std::size_t n_paths,
                   std::uint64_t seed);

/// Per-snapshot means and variances of the coordinates plus batch metadata; no raw paths.
nlohmann::json summarize(const PathBatch& batch);
/// snapshot,time,path,coordinates... rows for debugging.
std::string states_csv(const PathBatch& batch);

/// E[g(X_t) exp(-int_0^t (Lg/g)(X_s) ds)] <= g(x0) at each time of the grid.
InequalityReport supermartingale_check(const Potential& potential, const LogFunction& log_g, const Vec& x0,
                                       const std::vector<double>& times, const SimulationSpec& spec,
                                       double tolerance = 1e-9);
InequalityReport supermartingale_check(const Potential& potential, const LyapunovCertificate& cert, const Vec& x0,
                                       const std::vector<double>& times, const SimulationSpec& spec,
                                       double tolerance = 1e-9);

/// |grad P_t f(x)| <= E[|grad f(X_t)| exp(-int_0^t rho(X_s) ds)]; the left side comes from lhs_engine.
InequalityReport gradient_bound(const Potential& potential, const TestFunction& f, const std::vector<Vec>& xs,
                                const std::vector<double>& times, const SimulationSpec& spec,
                                const SemigroupEngine& lhs_engine);

/// |grad P_t f|^p <= e^{-beta t} g(x) (P_t |grad f|^{p/(p-1)})^{p-1}. The certificate's scan is
/// checked first; a failed scan raises CertificationError.
InequalityReport commutation_check(const Potential& potential, const LyapunovCertificate& cert, const TestFunction& f,
                                   const std::vector<Vec>& xs, const std::vector<double>& times,
                                   const SimulationSpec& spec, const SemigroupEngine& lhs_engine,
                                   const ScanSpec& scan = {});

}  // namespace curvlab
