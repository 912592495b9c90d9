#include <cmath>

#include "doctest.h"
#include "dotrecon/errors.hpp"
#include "dotrecon/measurement.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"
#include "dotrecon/phantom.hpp"
#include "dotrecon/recon.hpp"

using namespace dotrecon;

namespace {

struct Rig {
  Mesh mesh;
  PatchSet patches;
};

Rig small_rig(double h, int num_sources, int num_sensors, double patch_radius) {
  Rig r;
  r.mesh = generate_cylinder(1.0, 1.0, h);
  CylinderRingLayout layout;
  layout.num_sources = num_sources;
  layout.num_sensors = num_sensors;
  layout.patch_radius = patch_radius;
  r.patches = define_patches_cylinder(r.mesh, layout);
  return r;
}

}  // namespace

TEST_CASE("morozov level is the square root of the retained entry count") {
  MeasurementSet data;
  data.values = Eigen::VectorXd::Zero(1152);  // full complex 24x24
  CHECK(morozov_level(data) == doctest::Approx(std::sqrt(1152.0)).epsilon(1e-15));
  data.values = Eigen::VectorXd::Zero(496);  // masked cylinder, unmodulated
  CHECK(morozov_level(data) == doctest::Approx(std::sqrt(496.0)).epsilon(1e-15));
  data.values = Eigen::VectorXd::Zero(3480);  // masked ball, modulated
  CHECK(morozov_level(data) == doctest::Approx(std::sqrt(3480.0)).epsilon(1e-15));
}

TEST_CASE("background estimation recovers homogeneous truth within 1 percent") {
  const Rig rig = small_rig(0.15, 6, 6, 0.14);
  const Phantom phantom = build_phantom(PhantomPreset::Custom, rig.mesh);  // 0.05/0.5

  SimOptions opts;
  opts.noise_rel = 0.0;
  opts.d_mask = 0.3;
  const MeasurementSet data = simulate_measurements(rig.mesh, phantom, rig.patches, opts);

  ReconConfig config;
  const BackgroundEstimate bg = estimate_background(data, rig.mesh, rig.patches, config);
  CHECK(std::abs(bg.kappa0 - 0.05) <= 0.01 * 0.05);
  CHECK(std::abs(bg.mu0 - 0.5) <= 0.01 * 0.5);
  CHECK(bg.converged);

  // Scaling the covariance by c^2 scales the whitened misfit uniformly by
  // 1/c, so the minimizer (and the whole optimizer path) is unchanged.
  MeasurementSet scaled = data;
  scaled.gamma_diag *= 9.0;
  const BackgroundEstimate bg2 =
      estimate_background(scaled, rig.mesh, rig.patches, config);
  CHECK(bg2.kappa0 == bg.kappa0);
  CHECK(bg2.mu0 == bg.mu0);
  CHECK(bg2.misfit == doctest::Approx(bg.misfit / 3.0).epsilon(1e-12));
}

TEST_CASE("homogeneous phantom: converges immediately with beta near zero") {
  const Rig rig = small_rig(0.15, 6, 6, 0.14);
  const Phantom phantom = build_phantom(PhantomPreset::Custom, rig.mesh);

  SimOptions opts;
  opts.noise_rel = 0.0;
  opts.d_mask = 0.3;
  const MeasurementSet data = simulate_measurements(rig.mesh, phantom, rig.patches, opts);

  ReconConfig config;
  config.tau = 1.3;
  const ReconResult result = reconstruct(data, rig.mesh, rig.patches, config);
  CHECK(result.converged);
  CHECK(result.outer_residuals.size() <= 2);
  CHECK(result.params.stacked().lpNorm<Eigen::Infinity>() <= 1e-2);
  CHECK(result.outer_residuals.back() <= config.tau * result.epsilon);

  // Physical fields are positive and reproduce the background at beta = 0.
  CHECK(result.kappa_field.minCoeff() > 0.0);
  CHECK(result.mu_field.minCoeff() > 0.0);

  // Same-mesh simulation trips the inverse-crime guard warning.
  bool warned = false;
  for (const auto& w : result.warnings) warned |= w.find("inverse-crime") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("layout mismatches are rejected") {
  const Rig rig = small_rig(0.2, 4, 4, 0.18);
  const Phantom phantom = build_phantom(PhantomPreset::Custom, rig.mesh);
  SimOptions opts;
  opts.noise_rel = 0.0;
  const MeasurementSet data = simulate_measurements(rig.mesh, phantom, rig.patches, opts);

  const Rig other = small_rig(0.2, 4, 6, 0.14);
  ReconConfig config;
  CHECK_THROWS_AS(reconstruct(data, other.mesh, other.patches, config), ConfigError);

  MeasurementSet tampered = data;
  tampered.layout_hash ^= 1;
  CHECK_THROWS_AS(reconstruct(tampered, rig.mesh, rig.patches, config), ConfigError);

  ReconConfig bad;
  bad.tau = 0.5;
  CHECK_THROWS_AS(reconstruct(data, rig.mesh, rig.patches, bad), ConfigError);
}

TEST_CASE("small inclusion run converges and moves the right parameter") {
  // Desk-scale smoke test of the full loop: a mu inclusion only, unmodulated,
  // reconstruction on a coarser mesh than the simulation.
  const Mesh sim_mesh = generate_cylinder(1.0, 1.0, 0.09);
  const Mesh rec_mesh = generate_cylinder(1.0, 1.0, 0.14);
  CylinderRingLayout layout;
  layout.num_sources = 12;
  layout.num_sensors = 12;
  layout.patch_radius = 0.12;
  const PatchSet sim_patches = define_patches_cylinder(sim_mesh, layout);
  const PatchSet rec_patches = define_patches_cylinder(rec_mesh, layout);
  const Phantom phantom = build_phantom(PhantomPreset::Case1Mu, sim_mesh);

  SimOptions opts;
  opts.noise_rel = 0.01;
  opts.seed = 3;
  opts.d_mask = 0.4;
  const MeasurementSet data =
      simulate_measurements(sim_mesh, phantom, sim_patches, opts);

  // tau is case-dependent; this deliberately crude rig (12 sources, coarse
  // meshes) carries more discretization error than the reference setup.
  ReconConfig config;
  config.tau = 1.45;
  config.max_outer = 12;
  const ReconResult result = reconstruct(data, rec_mesh, rec_patches, config);
  CHECK(result.converged);
  CHECK(result.outer_residuals.back() <= config.tau * result.epsilon);
  // Homogeneous fit sits near the truth; the sparse 12-source layout sees
  // the strong inclusion more than the reference 24-source one would.
  CHECK(std::abs(result.background.mu0 - 0.5) <= 0.30 * 0.5);
  CHECK(std::abs(result.background.kappa0 - 0.05) <= 0.30 * 0.05);
  // The absorption reconstruction responds upward.
  CHECK(result.mu_field.maxCoeff() > result.background.mu0 * 1.3);
  // LSQR ran and logged its residual histories.
  CHECK(!result.lsqr_histories.empty());
  for (const auto& trace : result.lsqr_histories) {
    for (std::size_t i = 1; i < trace.residuals.size(); ++i)
      CHECK(trace.residuals[i] <= trace.residuals[i - 1] + 1e-12);
  }
}
