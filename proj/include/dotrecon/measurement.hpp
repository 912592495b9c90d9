#ifndef DOTRECON_MEASUREMENT_HPP
#define DOTRECON_MEASUREMENT_HPP

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"
#include "dotrecon/phantom.hpp"
#include "dotrecon/retention.hpp"

namespace dotrecon {

// Real stacked measurement vector with its diagonal noise covariance and the
// retention bookkeeping needed to align model predictions with the data.
struct MeasurementSet {
  Eigen::VectorXd values;      // [Re block; Im block], Im dropped when omega == 0
  Eigen::VectorXd gamma_diag;  // per-entry variances, strictly positive
  RetentionMask mask;
  double omega_over_c = 0.0;
  int num_sources = 0;
  int num_sensors = 0;
  std::uint64_t layout_hash = 0;
  std::uint64_t sim_node_count = 0;  // 0 when unknown (foreign file)
  int zero_sigma_entries = 0;        // entries that needed the median floor

  int entry_count() const { return static_cast<int>(values.size()); }
};

// Drops, for each source, the sensors whose center lies strictly within
// d_mask of the source center. d_mask = 0 keeps everything.
RetentionMask mask_nearest_sensors(const PatchSet& patches, double d_mask);

// Preset masking distances, tuned so the default layouts reproduce the
// reference retained counts: 496 real entries for the unmodulated 24+24
// cylinder and 3480 for the modulated 32+60 ball.
inline constexpr double kCylinderMaskDistance = 0.45;
double ball_mask_distance(const BallEvenLayout& layout);

struct SimOptions {
  double omega_over_c = 0.0;
  double noise_rel = 0.01;
  std::uint64_t seed = 0;
  double d_mask = 0.0;
};

// Exact forward data on the (fine) simulation mesh.
Eigen::MatrixXcd exact_measurements(const Mesh& mesh, const Phantom& phantom,
                                    const PatchSet& patches, double omega_over_c);

// Seeded additive Gaussian noise with sigma_i = noise_rel * |exact entry i|.
// With noise_rel = 0 the data is exact and the covariance falls back to the
// unit relative scale so whitening stays defined. Exactly-zero entries get
// the median |entry| as sigma and are counted in zero_sigma_entries.
MeasurementSet apply_noise(const Eigen::MatrixXcd& exact, const RetentionMask& mask,
                           const PatchSet& patches, const SimOptions& options,
                           std::uint64_t sim_node_count);

MeasurementSet simulate_measurements(const Mesh& mesh_fine, const Phantom& phantom,
                                     const PatchSet& patches, const SimOptions& options);

}  // namespace dotrecon

#endif
