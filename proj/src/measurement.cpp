#include "dotrecon/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "dotrecon/errors.hpp"
#include "dotrecon/forward.hpp"
#include "dotrecon/util.hpp"

namespace dotrecon {

RetentionMask mask_nearest_sensors(const PatchSet& patches, double d_mask) {
  if (d_mask < 0.0) throw ConfigError("mask_nearest_sensors: negative distance");
  RetentionMask mask;
  for (int k = 0; k < patches.source_count(); ++k) {
    int kept = 0;
    for (int j = 0; j < patches.sensor_count(); ++j) {
      if ((patches.sensor_centers[j] - patches.source_centers[k]).norm() < d_mask)
        continue;
      mask.pairs.emplace_back(k, j);
      ++kept;
    }
    if (kept == 0)
      throw ConfigError("mask_nearest_sensors: source " + std::to_string(k) +
                        " retains no sensors (d_mask too large)");
  }
  return mask;
}

double ball_mask_distance(const BallEvenLayout& layout) {
  // Tuned for the canonical 32+60 layout: each source drops exactly its own
  // face's five or six vertices (window 0.41R..0.74R). Scales with the domain.
  return 0.55 * layout.ball_radius;
}

Eigen::MatrixXcd exact_measurements(const Mesh& mesh, const Phantom& phantom,
                                    const PatchSet& patches, double omega_over_c) {
  CoefficientField coeff;
  coeff.kappa = phantom.kappa_field(mesh);
  coeff.mu = phantom.mu_field(mesh);
  coeff.omega_over_c = omega_over_c;
  const ForwardSolver solver(mesh, coeff);
  const ForwardFields fields = solve_fields(solver, mesh, patches, /*with_duals=*/false);
  return compute_measurements(fields, mesh, patches);
}

MeasurementSet apply_noise(const Eigen::MatrixXcd& exact, const RetentionMask& mask,
                           const PatchSet& patches, const SimOptions& options,
                           std::uint64_t sim_node_count) {
  MeasurementSet data;
  data.mask = mask;
  data.omega_over_c = options.omega_over_c;
  data.num_sources = patches.source_count();
  data.num_sensors = patches.sensor_count();
  data.layout_hash = patches.layout_hash;
  data.sim_node_count = sim_node_count;

  const Eigen::VectorXd m = stack_measurements(exact, mask, options.omega_over_c);
  const int n = static_cast<int>(m.size());
  if (n == 0) throw NumericalError("apply_noise: empty measurement vector");

  std::vector<double> mags(m.size());
  for (int i = 0; i < n; ++i) mags[i] = std::abs(m[i]);
  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (median == 0.0)
    throw NumericalError("apply_noise: measurements are identically zero");

  const double rel = options.noise_rel > 0.0 ? options.noise_rel : 1.0;
  data.values.resize(n);
  data.gamma_diag.resize(n);
  const CounterRng rng(options.seed);
  for (int i = 0; i < n; ++i) {
    double sigma = rel * mags[i];
    if (sigma == 0.0) {
      sigma = rel * median;
      ++data.zero_sigma_entries;
    }
    data.gamma_diag[i] = sigma * sigma;
    // The drawn noise matches the recorded covariance, floored sigma included.
    data.values[i] = m[i] + (options.noise_rel > 0.0 ? sigma * rng.normal(i) : 0.0);
  }
  return data;
}

MeasurementSet simulate_measurements(const Mesh& mesh_fine, const Phantom& phantom,
                                     const PatchSet& patches, const SimOptions& options) {
  const RetentionMask mask = mask_nearest_sensors(patches, options.d_mask);
  const Eigen::MatrixXcd exact =
      exact_measurements(mesh_fine, phantom, patches, options.omega_over_c);
  return apply_noise(exact, mask, patches, options,
                     static_cast<std::uint64_t>(mesh_fine.node_count()));
}

}  // namespace dotrecon
