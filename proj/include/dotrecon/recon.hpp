#ifndef DOTRECON_RECON_HPP
#define DOTRECON_RECON_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dotrecon/lsqr.hpp"
#include "dotrecon/measurement.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"
#include "dotrecon/prior.hpp"
#include "dotrecon/sensitivity.hpp"

namespace dotrecon {

struct ReconConfig {
  PriorConfig prior;          // T and b/a
  double tau = 1.3;           // fudge factor >= 1
  int max_outer = 10;
  int lsqr_max_iter = 200;
  int background_grid = 5;    // coarse log-grid per axis before Nelder-Mead
  int background_max_evals = 200;

  void validate() const;
};

struct BackgroundEstimate {
  double kappa0 = 0.0;
  double mu0 = 0.0;
  double misfit = 0.0;
  int evaluations = 0;
  bool converged = true;  // false when the optimizer budget ran out
};

// Homogeneous-model fit of the reference levels: minimizes the whitened
// misfit over constant (kappa, mu) via a coarse log-grid followed by
// Nelder-Mead, one forward solve set per evaluation.
BackgroundEstimate estimate_background(const MeasurementSet& data, const Mesh& mesh,
                                       const PatchSet& patches,
                                       const ReconConfig& config);

// Expected whitened noise norm, generalized to masked sensors and to
// unmodulated data: the square root of the retained real entry count.
double morozov_level(const MeasurementSet& data);

struct LsqrTrace {
  std::vector<double> residuals;
  int iterations = 0;
  LsqrStop stopped_by = LsqrStop::MaxIter;
};

struct ReconResult {
  LogParams params;
  Eigen::VectorXd kappa_field;  // full nodal, strictly positive
  Eigen::VectorXd mu_field;
  BackgroundEstimate background;
  double epsilon = 0.0;
  double tau = 0.0;
  double initial_residual = 0.0;
  std::vector<double> outer_residuals;  // after each linearization
  std::vector<LsqrTrace> lsqr_histories;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Algorithm: start from beta = 0 at the estimated background; per outer
// round evaluate the Jacobian, whiten, take one lagged-diffusivity step for
// the prior, run priorconditioned LSQR to tau*epsilon, and accept when the
// nonlinear whitened residual reaches tau*epsilon. The background fit runs
// on background_mesh when given (typically coarser), else on the
// reconstruction mesh.
ReconResult reconstruct(const MeasurementSet& data, const Mesh& mesh,
                        const PatchSet& patches, const ReconConfig& config,
                        const Mesh* background_mesh = nullptr,
                        const PatchSet* background_patches = nullptr);

}  // namespace dotrecon

#endif
