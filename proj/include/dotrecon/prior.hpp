#ifndef DOTRECON_PRIOR_HPP
#define DOTRECON_PRIOR_HPP

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dotrecon/lsqr.hpp"
#include "dotrecon/mesh.hpp"

namespace dotrecon {

struct PriorConfig {
  double edge_threshold = 5e-3;  // T
  double ratio_b_over_a = 1.0 / 3.0;
};

// Perona-Malik penalty density r(t) = T^2/2 * log(1 + (t/T)^2) together with
// its derivative and the diffusion weight c(t) = r'(t)/t = 1/(1 + (t/T)^2).
// The weight is evaluated in closed form, so t = 0 needs no special casing.
struct PmValue {
  double r;
  double r_prime;
  double c;
};

PmValue pm_r(double t, double edge_threshold);

// R(u) = sum_T vol_T * r(|grad u|_T) for the P1 field with the given free-node
// coefficients (zero on the Dirichlet set).
double evaluate_r_functional(const Mesh& mesh, const FreeNodeMap& fmap,
                             const Eigen::VectorXd& u_free, double edge_threshold);

// Weighted stiffness matrix H(u) on the free nodes: per-tet weight c(|grad u|),
// homogeneous Dirichlet rows/columns eliminated. Satisfies grad R(u) = H(u) u.
Eigen::SparseMatrix<double> assemble_h(const Mesh& mesh, const FreeNodeMap& fmap,
                                       const Eigen::VectorXd& u_free,
                                       double edge_threshold);

// Block-diagonal prior [H(sigma), 0; 0, (b/a) H(upsilon)] with a symmetric
// factorization held for H^{-1} applications.
class PriorMatrix : public SpdOperator {
 public:
  PriorMatrix(const Mesh& mesh, const FreeNodeMap& fmap, const Eigen::VectorXd& sigma_free,
              const Eigen::VectorXd& upsilon_free, const PriorConfig& config);

  Eigen::Index dim() const override { return 2 * n_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;  // H x
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const override;  // H^{-1} b

  const Eigen::SparseMatrix<double>& sigma_block() const { return h_sigma_; }
  const Eigen::SparseMatrix<double>& upsilon_block_unscaled() const { return h_upsilon_; }
  double ratio() const { return ratio_; }

 private:
  Eigen::Index n_;
  double ratio_;
  Eigen::SparseMatrix<double> h_sigma_, h_upsilon_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact_sigma_, fact_upsilon_;
};

}  // namespace dotrecon

#endif
