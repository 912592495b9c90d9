#ifndef DOTRECON_SENSITIVITY_HPP
#define DOTRECON_SENSITIVITY_HPP

#include <Eigen/Dense>

#include "dotrecon/forward.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"
#include "dotrecon/retention.hpp"

namespace dotrecon {

// Log-deviation parameters on the free nodes: kappa = kappa0 * exp(sigma),
// mu = mu0 * exp(upsilon), with sigma = upsilon = 0 on the Dirichlet set.
struct LogParams {
  Eigen::VectorXd sigma;
  Eigen::VectorXd upsilon;
  double kappa0 = 1.0;
  double mu0 = 1.0;

  static LogParams zero(int free_count, double kappa0, double mu0);
  Eigen::VectorXd stacked() const;  // beta = [sigma; upsilon]
  void set_stacked(const Eigen::VectorXd& beta);
};

CoefficientField coefficients_from_params(const Mesh& mesh, const FreeNodeMap& fmap,
                                          const LogParams& params, double omega_over_c);

// Real stacked Jacobian of the retained measurements with respect to
// [sigma; upsilon]: rows are [Re block; Im block] over the retained pairs
// (the Im block is identically zero when omega == 0), columns are the free
// nodes of sigma followed by those of upsilon.
struct RealJacobian {
  Eigen::MatrixXd mat;  // (2 * pairs) x (2 * free_count)
  int pair_count = 0;
  int free_count = 0;
};

RealJacobian measurement_jacobian(const Mesh& mesh, const PatchSet& patches,
                                  const FreeNodeMap& fmap, const LogParams& params,
                                  double omega_over_c, const RetentionMask& mask);

// Same, reusing already computed forward/dual fields at the same parameters.
RealJacobian measurement_jacobian_from_fields(const Mesh& mesh, const PatchSet& patches,
                                              const FreeNodeMap& fmap,
                                              const CoefficientField& coeff,
                                              const ForwardFields& fields,
                                              const RetentionMask& mask);

// Solves the Born-type linearization for a perturbation (vartheta, theta) of
// (kappa, mu): same system matrix, right-hand side built from phi_k. Test
// oracle only; the reconstruction never calls it.
Eigen::VectorXcd born_perturbation(const Mesh& mesh, const ForwardSolver& solver,
                                   const Eigen::VectorXcd& phi_k,
                                   const Eigen::VectorXd& vartheta,
                                   const Eigen::VectorXd& theta);

}  // namespace dotrecon

#endif
