#ifndef DOTRECON_EVAL_HPP
#define DOTRECON_EVAL_HPP

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dotrecon/mesh.hpp"
#include "dotrecon/phantom.hpp"
#include "dotrecon/recon.hpp"

namespace dotrecon {

// Per-parameter quantitative summary against a known phantom. Inclusion
// support is estimated by thresholding the reconstruction at the background
// level plus/minus a band (only deviations with the sign of the true
// contrast count toward the support); the cross-talk index is the largest
// deviation of this parameter inside the other parameter's exclusive
// inclusion support, normalized by this parameter's true contrast.
struct ParamEval {
  bool has_inclusion = false;
  bool detected = false;
  double centroid_error = 0.0;  // model units; valid when detected
  double max_value = 0.0;       // over all nodes
  double min_value = 0.0;
  double background_mean = 0.0;     // outside every true inclusion
  double background_max_dev = 0.0;  // from the reference level
  double cross_talk = 0.0;
};

struct EvalReport {
  ParamEval kappa;
  ParamEval mu;
  double band_kappa = 0.01;
  double band_mu = 0.1;
  // Convergence summary; present when the evaluation came from an in-memory
  // reconstruction rather than a solution file.
  std::optional<int> linearizations;
  std::optional<double> final_residual;
  std::optional<double> target_residual;
  std::optional<bool> converged;

  std::string to_text() const;
};

EvalReport evaluate_fields(const Eigen::VectorXd& kappa_field,
                           const Eigen::VectorXd& mu_field, double kappa0, double mu0,
                           const Phantom& truth, const Mesh& mesh, double band_kappa,
                           double band_mu);

EvalReport evaluate(const ReconResult& recon, const Phantom& truth, const Mesh& mesh,
                    double band_kappa = 0.01, double band_mu = 0.1);

}  // namespace dotrecon

#endif
