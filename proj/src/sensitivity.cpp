#include "dotrecon/sensitivity.hpp"

#include <cmath>

#include "dotrecon/errors.hpp"
#include "dotrecon/util.hpp"

namespace dotrecon {

LogParams LogParams::zero(int free_count, double kappa0, double mu0) {
  LogParams p;
  p.sigma = Eigen::VectorXd::Zero(free_count);
  p.upsilon = Eigen::VectorXd::Zero(free_count);
  p.kappa0 = kappa0;
  p.mu0 = mu0;
  return p;
}

Eigen::VectorXd LogParams::stacked() const {
  Eigen::VectorXd beta(sigma.size() + upsilon.size());
  beta << sigma, upsilon;
  return beta;
}

void LogParams::set_stacked(const Eigen::VectorXd& beta) {
  const Eigen::Index n = beta.size() / 2;
  if (beta.size() != 2 * n || n != sigma.size())
    throw NumericalError("LogParams: stacked vector has wrong length");
  sigma = beta.head(n);
  upsilon = beta.tail(n);
}

CoefficientField coefficients_from_params(const Mesh& mesh, const FreeNodeMap& fmap,
                                          const LogParams& params, double omega_over_c) {
  if (params.sigma.size() != fmap.count || params.upsilon.size() != fmap.count)
    throw NumericalError("coefficients_from_params: parameter length mismatch");
  if (!(params.kappa0 > 0.0) || !(params.mu0 > 0.0))
    throw NumericalError("coefficients_from_params: reference levels must be positive");
  CoefficientField c;
  c.omega_over_c = omega_over_c;
  c.kappa.setConstant(mesh.node_count(), params.kappa0);
  c.mu.setConstant(mesh.node_count(), params.mu0);
  for (int f = 0; f < fmap.count; ++f) {
    const int node = fmap.free_to_node[f];
    c.kappa[node] = params.kappa0 * std::exp(params.sigma[f]);
    c.mu[node] = params.mu0 * std::exp(params.upsilon[f]);
  }
  return c;
}

namespace {

// Exact integral over a tet of the product of two P1 fields and one hat
// function: int_T p q phi_m = (V/120) (Sp*Sq + p_m*Sq + q_m*Sp + dot + 2 p_m q_m)
// with Sp, Sq the nodal sums and dot the nodal pairwise product sum.
inline Complex trilinear_weight(double vol, const Complex p[4], const Complex q[4],
                                Complex sp, Complex sq, Complex dot, int m) {
  return (vol / 120.0) * (sp * sq + p[m] * sq + q[m] * sp + dot + 2.0 * p[m] * q[m]);
}

}  // namespace

RealJacobian measurement_jacobian_from_fields(const Mesh& mesh, const PatchSet& patches,
                                              const FreeNodeMap& fmap,
                                              const CoefficientField& coeff,
                                              const ForwardFields& fields,
                                              const RetentionMask& mask) {
  const int n_free = fmap.count;
  const int n_pairs = mask.pair_count();
  const auto& geo = mesh.element_geometry();
  const std::size_t n_elems = mesh.tets.size();

  if (static_cast<int>(fields.phi.size()) != patches.source_count() ||
      static_cast<int>(fields.psi.size()) != patches.sensor_count())
    throw NumericalError("jacobian: fields do not match the patch layout");

  // Group retained pairs by source; rows of a group are computed together so
  // the source-side element data is prepared once per group.
  std::vector<std::vector<std::pair<int, int>>> groups(patches.source_count());
  for (int i = 0; i < n_pairs; ++i) {
    const auto& [k, j] = mask.pairs[i];
    if (k < 0 || k >= patches.source_count() || j < 0 || j >= patches.sensor_count())
      throw NumericalError("jacobian: retained pair outside layout");
    groups[k].emplace_back(j, i);
  }

  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      n_pairs, 2 * n_free);
  rows.setZero();

  parallel_for(groups.size(), [&](std::size_t k) {
    if (groups[k].empty()) return;
    const Eigen::VectorXcd& phi = fields.phi[k];
    // Per-element source data: gradient, nodal sum.
    std::vector<Eigen::Vector3cd> phi_grad(n_elems);
    std::vector<Complex> phi_sum(n_elems);
    for (std::size_t e = 0; e < n_elems; ++e) {
      const auto& t = mesh.tets[e];
      const auto& g = geo[e].grads;
      Eigen::Vector3cd gr = Eigen::Vector3cd::Zero();
      Complex s = 0.0;
      for (int m = 0; m < 4; ++m) {
        gr += phi[t[m]] * g.col(m).cast<Complex>();
        s += phi[t[m]];
      }
      phi_grad[e] = gr;
      phi_sum[e] = s;
    }

    for (const auto& [j, row_index] : groups[k]) {
      const Eigen::VectorXcd& psi = fields.psi[j];
      auto row = rows.row(row_index);
      for (std::size_t e = 0; e < n_elems; ++e) {
        const auto& t = mesh.tets[e];
        const auto& g = geo[e].grads;
        const double vol = geo[e].volume;
        Complex p[4], q[4];
        Eigen::Vector3cd psi_grad = Eigen::Vector3cd::Zero();
        Complex psi_sum = 0.0, dot = 0.0;
        for (int m = 0; m < 4; ++m) {
          p[m] = psi[t[m]];
          q[m] = phi[t[m]];
          psi_grad += p[m] * g.col(m).cast<Complex>();
          psi_sum += p[m];
          dot += p[m] * q[m];
        }
        // Unconjugated gradient product (the form is complex symmetric).
        const Complex grad_dot = psi_grad.x() * phi_grad[e].x() +
                                 psi_grad.y() * phi_grad[e].y() +
                                 psi_grad.z() * phi_grad[e].z();
        const Complex stiff_part = -kGamma * 0.25 * vol * grad_dot;
        for (int m = 0; m < 4; ++m) {
          const int fm = fmap.node_to_free[t[m]];
          if (fm < 0) continue;
          row[fm] += coeff.kappa[t[m]] * stiff_part;
          row[n_free + fm] +=
              -kGamma * coeff.mu[t[m]] *
              trilinear_weight(vol, p, q, psi_sum, phi_sum[e], dot, m);
        }
      }
    }
  });

  RealJacobian jac;
  jac.pair_count = n_pairs;
  jac.free_count = n_free;
  jac.mat.resize(2 * n_pairs, 2 * n_free);
  jac.mat.topRows(n_pairs) = rows.real();
  jac.mat.bottomRows(n_pairs) = rows.imag();
  return jac;
}

RealJacobian measurement_jacobian(const Mesh& mesh, const PatchSet& patches,
                                  const FreeNodeMap& fmap, const LogParams& params,
                                  double omega_over_c, const RetentionMask& mask) {
  const CoefficientField coeff =
      coefficients_from_params(mesh, fmap, params, omega_over_c);
  const ForwardSolver solver(mesh, coeff);
  const ForwardFields fields = solve_fields(solver, mesh, patches);
  return measurement_jacobian_from_fields(mesh, patches, fmap, coeff, fields, mask);
}

Eigen::VectorXcd born_perturbation(const Mesh& mesh, const ForwardSolver& solver,
                                   const Eigen::VectorXcd& phi_k,
                                   const Eigen::VectorXd& vartheta,
                                   const Eigen::VectorXd& theta) {
  if (vartheta.size() != mesh.node_count() || theta.size() != mesh.node_count())
    throw NumericalError("born_perturbation: direction fields must be nodal");
  const auto& geo = mesh.element_geometry();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(mesh.node_count());
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    const auto& g = geo[e].grads;
    const double vol = geo[e].volume;
    Complex p[4], q[4];
    Eigen::Vector3cd phi_grad = Eigen::Vector3cd::Zero();
    Complex theta_sum = 0.0, phi_sum = 0.0, dot = 0.0;
    double vmean = 0.0;
    for (int m = 0; m < 4; ++m) {
      p[m] = theta[t[m]];
      q[m] = phi_k[t[m]];
      phi_grad += q[m] * g.col(m).cast<Complex>();
      theta_sum += p[m];
      phi_sum += q[m];
      dot += p[m] * q[m];
      vmean += 0.25 * vartheta[t[m]];
    }
    for (int m = 0; m < 4; ++m) {
      const Complex grad_term =
          vmean * vol *
          (g.col(m).x() * phi_grad.x() + g.col(m).y() * phi_grad.y() +
           g.col(m).z() * phi_grad.z());
      const Complex mass_term = trilinear_weight(vol, p, q, theta_sum, phi_sum, dot, m);
      rhs[t[m]] -= grad_term + mass_term;
    }
  }
  return solver.solve_complex(rhs);
}

}  // namespace dotrecon
