#include "dotrecon/eval.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "dotrecon/errors.hpp"

namespace dotrecon {

namespace {

// Lumped nodal volumes: quarter of each incident tet.
Eigen::VectorXd nodal_volumes(const Mesh& mesh) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.node_count());
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const double q = 0.25 * mesh.element_geometry()[e].volume;
    for (int v : mesh.tets[e]) w[v] += q;
  }
  return w;
}

struct SupportStats {
  bool any = false;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
};

SupportStats weighted_centroid(const Mesh& mesh, const Eigen::VectorXd& weights,
                               const std::vector<char>& member) {
  SupportStats s;
  double total = 0.0;
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!member[i]) continue;
    acc += weights[i] * mesh.vertices[i];
    total += weights[i];
  }
  if (total > 0.0) {
    s.any = true;
    s.centroid = acc / total;
  }
  return s;
}

ParamEval evaluate_one(const Mesh& mesh, const Eigen::VectorXd& weights,
                       const Eigen::VectorXd& field, double reference, double band,
                       const std::vector<char>& own_support,
                       const std::vector<char>& other_only_support, double own_contrast,
                       double contrast_sign, const std::vector<char>& any_inclusion) {
  ParamEval ev;
  ev.has_inclusion = own_contrast != 0.0;
  ev.max_value = field.maxCoeff();
  ev.min_value = field.minCoeff();

  // Background statistics outside every true inclusion.
  double bg_sum = 0.0, bg_w = 0.0, bg_dev = 0.0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (any_inclusion[i]) continue;
    bg_sum += weights[i] * field[i];
    bg_w += weights[i];
    bg_dev = std::max(bg_dev, std::abs(field[i] - reference));
  }
  if (bg_w > 0.0) ev.background_mean = bg_sum / bg_w;
  ev.background_max_dev = bg_dev;

  if (ev.has_inclusion) {
    // Estimated support: out-of-band deviations with the contrast's sign.
    std::vector<char> est(mesh.node_count(), 0);
    for (int i = 0; i < mesh.node_count(); ++i) {
      const double dev = field[i] - reference;
      if (std::abs(dev) > band && dev * contrast_sign > 0.0) est[i] = 1;
    }
    const SupportStats est_stats = weighted_centroid(mesh, weights, est);
    const SupportStats true_stats = weighted_centroid(mesh, weights, own_support);
    ev.detected = est_stats.any && true_stats.any;
    if (ev.detected)
      ev.centroid_error = (est_stats.centroid - true_stats.centroid).norm();
  }

  // Cross-talk inside the other parameter's exclusive support.
  double max_dev = 0.0;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (other_only_support[i]) max_dev = std::max(max_dev, std::abs(field[i] - reference));
  const double denom = own_contrast != 0.0 ? std::abs(own_contrast) : reference;
  ev.cross_talk = denom > 0.0 ? max_dev / denom : 0.0;
  return ev;
}

}  // namespace

EvalReport evaluate_fields(const Eigen::VectorXd& kappa_field,
                           const Eigen::VectorXd& mu_field, double kappa0, double mu0,
                           const Phantom& truth, const Mesh& mesh, double band_kappa,
                           double band_mu) {
  if (kappa_field.size() != mesh.node_count() || mu_field.size() != mesh.node_count())
    throw NumericalError("evaluate: field length does not match the mesh");

  const Eigen::VectorXd weights = nodal_volumes(mesh);
  const int n = mesh.node_count();
  std::vector<char> kappa_support(n, 0), mu_support(n, 0), any_support(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const auto& inc : truth.inclusions) {
      if (!inc.contains(mesh.vertices[i])) continue;
      any_support[i] = 1;
      if (inc.kappa_value) kappa_support[i] = 1;
      if (inc.mu_value) mu_support[i] = 1;
    }
  }
  std::vector<char> mu_only(n, 0), kappa_only(n, 0);
  for (int i = 0; i < n; ++i) {
    mu_only[i] = mu_support[i] && !kappa_support[i];
    kappa_only[i] = kappa_support[i] && !mu_support[i];
  }

  double kappa_contrast = 0.0, mu_contrast = 0.0;
  for (const auto& inc : truth.inclusions) {
    if (inc.kappa_value && kappa_contrast == 0.0)
      kappa_contrast = *inc.kappa_value - truth.kappa_bg;
    if (inc.mu_value && mu_contrast == 0.0) mu_contrast = *inc.mu_value - truth.mu_bg;
  }

  EvalReport report;
  report.band_kappa = band_kappa;
  report.band_mu = band_mu;
  report.kappa = evaluate_one(mesh, weights, kappa_field, kappa0, band_kappa,
                              kappa_support, mu_only, kappa_contrast,
                              kappa_contrast >= 0.0 ? 1.0 : -1.0, any_support);
  report.mu = evaluate_one(mesh, weights, mu_field, mu0, band_mu, mu_support,
                           kappa_only, mu_contrast, mu_contrast >= 0.0 ? 1.0 : -1.0,
                           any_support);
  return report;
}

EvalReport evaluate(const ReconResult& recon, const Phantom& truth, const Mesh& mesh,
                    double band_kappa, double band_mu) {
  EvalReport report =
      evaluate_fields(recon.kappa_field, recon.mu_field, recon.background.kappa0,
                      recon.background.mu0, truth, mesh, band_kappa, band_mu);
  report.linearizations = static_cast<int>(recon.outer_residuals.size());
  report.final_residual = recon.outer_residuals.empty() ? recon.initial_residual
                                                        : recon.outer_residuals.back();
  report.target_residual = recon.tau * recon.epsilon;
  report.converged = recon.converged;
  return report;
}

namespace {

void write_param(std::ostringstream& os, const char* name, const ParamEval& ev) {
  os << name << ".has_inclusion = " << (ev.has_inclusion ? 1 : 0) << "\n";
  if (ev.has_inclusion) {
    if (ev.detected)
      os << name << ".centroid_error = " << ev.centroid_error << "\n";
    else
      os << name << ".centroid_error = not_detected\n";
  }
  os << name << ".max = " << ev.max_value << "\n";
  os << name << ".min = " << ev.min_value << "\n";
  os << name << ".background_mean = " << ev.background_mean << "\n";
  os << name << ".background_max_dev = " << ev.background_max_dev << "\n";
  os << name << ".cross_talk = " << ev.cross_talk << "\n";
}

}  // namespace

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os.precision(9);
  write_param(os, "kappa", kappa);
  write_param(os, "mu", mu);
  os << "band.kappa = " << band_kappa << "\n";
  os << "band.mu = " << band_mu << "\n";
  if (linearizations) os << "convergence.linearizations = " << *linearizations << "\n";
  if (final_residual) os << "convergence.final_residual = " << *final_residual << "\n";
  if (target_residual) os << "convergence.target = " << *target_residual << "\n";
  if (converged) os << "convergence.converged = " << (*converged ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace dotrecon
