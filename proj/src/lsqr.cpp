#include "dotrecon/lsqr.hpp"

#include <cmath>

#include "dotrecon/errors.hpp"

namespace dotrecon {

LsqrResult priorconditioned_lsqr(const LinearizedSystem& sys, double stop_level,
                                 int max_iter) {
  if (!sys.prior) throw NumericalError("lsqr: missing prior operator");
  if (sys.a.rows() != sys.y_tilde.size() || sys.a.cols() != sys.prior->dim())
    throw NumericalError("lsqr: inconsistent system dimensions");
  if (stop_level < 0.0) throw NumericalError("lsqr: negative stop level");

  const Eigen::Index n = sys.a.cols();
  LsqrResult res;
  res.beta = Eigen::VectorXd::Zero(n);

  // Golub-Kahan bidiagonalization of A L^{-1}. With s_i = L^{-1} v_i the
  // right Lanczos vectors never need L: the recurrences close under
  // s -> H^{-1}A^T u and the norm |L p| = sqrt(p^T H p).
  double beta_gk = sys.y_tilde.norm();
  res.residual_history.push_back(beta_gk);
  if (beta_gk <= stop_level) {
    res.stopped_by = LsqrStop::Discrepancy;
    return res;
  }

  Eigen::VectorXd u = sys.y_tilde / beta_gk;
  Eigen::VectorXd g = sys.a.transpose() * u;
  Eigen::VectorXd h = sys.prior->solve(g);
  double alpha = std::sqrt(std::max(0.0, g.dot(h)));
  if (alpha == 0.0) {
    res.stopped_by = LsqrStop::Breakdown;
    return res;
  }
  Eigen::VectorXd s = h / alpha;

  Eigen::VectorXd w = s;
  double phi_bar = beta_gk;
  double rho_bar = alpha;

  // Bidiagonalization coefficients at round-off scale signal that the
  // Krylov space is exhausted; continuing would divide garbage by garbage.
  const double tiny = 1e-13;
  double alpha_scale = alpha, beta_scale = beta_gk;

  for (int it = 1; it <= max_iter; ++it) {
    // u_{i+1}: left vector.
    Eigen::VectorXd q = sys.a * s - alpha * u;
    const double beta_next = q.norm();
    if (beta_next <= tiny * beta_scale) {
      res.stopped_by = LsqrStop::Breakdown;
      return res;
    }
    beta_scale = std::max(beta_scale, beta_next);
    u = q / beta_next;

    // s_{i+1} = L^{-1} v_{i+1}.
    Eigen::VectorXd p = sys.prior->solve(sys.a.transpose() * u) - beta_next * s;
    const double alpha_next = std::sqrt(std::max(0.0, p.dot(sys.prior->apply(p))));

    // Givens rotation eliminating beta_next from the lower bidiagonal.
    const double rho = std::hypot(rho_bar, beta_next);
    const double c = rho_bar / rho;
    const double sn = beta_next / rho;
    const double theta = sn * alpha_next;
    rho_bar = -c * alpha_next;
    const double phi = c * phi_bar;
    phi_bar = sn * phi_bar;

    res.beta += (phi / rho) * w;
    res.iterations = it;
    res.residual_history.push_back(phi_bar);

    if (phi_bar <= stop_level) {
      res.stopped_by = LsqrStop::Discrepancy;
      return res;
    }
    if (alpha_next <= tiny * alpha_scale) {
      res.stopped_by = LsqrStop::Breakdown;
      return res;
    }
    alpha_scale = std::max(alpha_scale, alpha_next);
    s = p / alpha_next;
    w = s - (theta / rho) * w;
    alpha = alpha_next;
  }
  res.stopped_by = LsqrStop::MaxIter;
  return res;
}

void whiten(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual,
            const Eigen::VectorXd& gamma_diag, Eigen::MatrixXd* a_out,
            Eigen::VectorXd* y_out) {
  if (jacobian.rows() != gamma_diag.size() || residual.size() != gamma_diag.size())
    throw NumericalError("whiten: row count does not match covariance diagonal");
  Eigen::VectorXd inv_sigma(gamma_diag.size());
  for (Eigen::Index i = 0; i < gamma_diag.size(); ++i) {
    if (!(gamma_diag[i] > 0.0))
      throw NumericalError("whiten: nonpositive variance at entry " + std::to_string(i));
    inv_sigma[i] = 1.0 / std::sqrt(gamma_diag[i]);
  }
  *a_out = inv_sigma.asDiagonal() * jacobian;
  *y_out = inv_sigma.asDiagonal() * residual;
}

}  // namespace dotrecon
