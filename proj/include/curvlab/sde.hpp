#pragma once

#include "curvlab/common.hpp"
#include "curvlab/potentials.hpp"

#include <cstdint>
#include <vector>

namespace curvlab {

struct SimulationSpec {
  double dt = 1e-3;
  std::size_t paths = 100000;
  std::uint64_t seed = 20240611;
  /// Each step of length dt is split into `substeps` Euler steps.
  int substeps = 1;
  /// Normals drawn per dt step; groups of draws_per_step/substeps are merged into one increment.
  /// Runs with equal draws_per_step share their Brownian path, which couples dt and dt/2 runs.
  int draws_per_step = 1;
  double explosion_guard = 1e8;
  double max_exploded_fraction = 1e-4;
};

/// Optional integrands accumulated along each path by left-endpoint sums.
struct PathIntegrands {
  PointFunction rate_a;  // usually rho
  PointFunction rate_b;  // usually Lg/g
};

/// Euler-Maruyama paths of dX = sqrt(2) dB - grad V(X) dt observed at snapshot times.
class PathBatch {
 public:
  Vec x0;
  int dim = 1;
  double dt = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> states;    // [snapshot][path][coordinate]
  std::vector<double> integral_a;  // [snapshot][path]
  std::vector<double> integral_b;  // [snapshot][path]
  std::vector<std::uint8_t> exploded;
  double exploded_fraction = 0.0;

  ConstPoint state(std::size_t snapshot, std::size_t path) const {
    return {states.data() + (snapshot * paths + path) * dim, static_cast<std::size_t>(dim)};
  }
  double accumulated_a(std::size_t snapshot, std::size_t path) const { return integral_a[snapshot * paths + path]; }
  double accumulated_b(std::size_t snapshot, std::size_t path) const { return integral_b[snapshot * paths + path]; }
  std::size_t snapshot_index(double t) const;
  std::size_t retained() const;
};

/// Snapshot times must be nonnegative; they are sorted before simulation.
PathBatch simulate_paths(const Potential& potential, const Vec& x0, std::vector<double> times,
                         const SimulationSpec& spec, const PathIntegrands& integrands = {});

/// Mean and standard error of value(path) over retained paths, reduced in path order.
Estimate path_average(const PathBatch& batch, const std::function<double(std::size_t)>& value);

}  // namespace curvlab
