#include "curvlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace curvlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::size_t PathBatch::snapshot_index(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-12 * (1.0 + std::abs(t))) return k;
  throw ParameterError("time " + std::to_string(t) + " is not a snapshot of this batch");
}

std::size_t PathBatch::retained() const {
  return paths - static_cast<std::size_t>(std::count(exploded.begin(), exploded.end(), std::uint8_t{1}));
}

PathBatch simulate_paths(const Potential& potential, const Vec& x0, std::vector<double> times,
                         const SimulationSpec& spec, const PathIntegrands& integrands) {
  if (!(spec.dt > 0.0)) throw ParameterError("time step must be positive");
  if (spec.paths < 100) throw ParameterError("at least 100 paths are required");
  if (spec.substeps < 1 || spec.draws_per_step < spec.substeps || spec.draws_per_step % spec.substeps != 0)
    throw ParameterError("draws_per_step must be a positive multiple of substeps");
  if (x0.size() != potential.dim()) throw ParameterError("start point dimension does not match the potential");
  if (times.empty()) throw ParameterError("at least one snapshot time is required");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("snapshot times must be finite and nonnegative");
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  PathBatch batch;
  batch.x0 = x0;
  batch.dim = potential.dim();
  batch.dt = spec.dt;
  batch.paths = spec.paths;
  batch.seed = spec.seed;
  batch.times = times;
  const std::size_t n_snap = times.size();
  const std::size_t dim = static_cast<std::size_t>(batch.dim);
  batch.states.assign(n_snap * spec.paths * dim, 0.0);
  batch.integral_a.assign(n_snap * spec.paths, 0.0);
  batch.integral_b.assign(n_snap * spec.paths, 0.0);
  batch.exploded.assign(spec.paths, 0);

  // Each segment between snapshots is cut into whole steps of length close to dt.
  std::vector<std::size_t> seg_steps(n_snap);
  std::vector<double> seg_h(n_snap);
  double prev = 0.0;
  for (std::size_t k = 0; k < n_snap; ++k) {
    const double len = times[k] - prev;
    seg_steps[k] = len > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / spec.dt))) : 0;
    seg_h[k] = seg_steps[k] ? len / seg_steps[k] : 0.0;
    prev = times[k];
  }

  const int group = spec.draws_per_step / spec.substeps;
  const double group_scale = 1.0 / std::sqrt(static_cast<double>(group));

  parallel_for(spec.paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(dim);
    std::vector<double> grad(dim);
    std::vector<double> z(dim * static_cast<std::size_t>(spec.draws_per_step));
    for (std::size_t path = begin; path < end; ++path) {
      std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(path + 1)));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::copy(x0.data(), x0.data() + dim, x.begin());
      double acc_a = 0.0;
      double acc_b = 0.0;
      bool dead = false;
      for (std::size_t k = 0; k < n_snap && !dead; ++k) {
        const double h = seg_h[k] / spec.substeps;
        const double noise = std::sqrt(2.0 * h) * group_scale;
        for (std::size_t step = 0; step < seg_steps[k] && !dead; ++step) {
          // Draw order is fixed per dt step so that runs with different substeps see the same path.
          for (double& v : z) v = normal(rng);
          for (int sub = 0; sub < spec.substeps && !dead; ++sub) {
            const ConstPoint xs(x.data(), dim);
            if (integrands.rate_a) acc_a += h * integrands.rate_a(xs);
            if (integrands.rate_b) acc_b += h * integrands.rate_b(xs);
            potential.gradient(xs, {grad.data(), dim});
            for (std::size_t d = 0; d < dim; ++d) {
              double xi = 0.0;
              for (int g = 0; g < group; ++g) xi += z[(static_cast<std::size_t>(sub * group + g)) * dim + d];
              x[d] += -grad[d] * h + noise * xi;
              if (!(std::abs(x[d]) <= spec.explosion_guard)) dead = true;
            }
          }
        }
        if (dead) break;
        std::copy(x.begin(), x.end(), batch.states.begin() + static_cast<long>((k * spec.paths + path) * dim));
        batch.integral_a[k * spec.paths + path] = acc_a;
        batch.integral_b[k * spec.paths + path] = acc_b;
      }
      if (dead) batch.exploded[path] = 1;
    }
  });

  batch.exploded_fraction = 1.0 - static_cast<double>(batch.retained()) / static_cast<double>(spec.paths);
  if (batch.exploded_fraction > spec.max_exploded_fraction)
    throw SimulationError("path explosion beyond |X| > " + std::to_string(spec.explosion_guard) + " in " +
                              std::to_string(batch.exploded_fraction * 100.0) + "% of paths",
                          batch.exploded_fraction);
  return batch;
}

Estimate path_average(const PathBatch& batch, const std::function<double(std::size_t)>& value) {
  std::vector<double> vals(batch.paths, 0.0);
  parallel_for(batch.paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      if (!batch.exploded[i]) vals[i] = value(i);
  });
  // Serial Welford in path order keeps the result independent of the worker count.
  Estimate e;
  double m2 = 0.0;
  for (std::size_t i = 0; i < batch.paths; ++i) {
    if (batch.exploded[i]) continue;
    ++e.count;
    const double delta = vals[i] - e.mean;
    e.mean += delta / static_cast<double>(e.count);
    m2 += delta * (vals[i] - e.mean);
  }
  if (e.count > 1) e.std_error = std::sqrt(m2 / static_cast<double>(e.count - 1) / static_cast<double>(e.count));
  return e;
}

}  // namespace curvlab
