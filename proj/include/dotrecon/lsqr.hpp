#ifndef DOTRECON_LSQR_HPP
#define DOTRECON_LSQR_HPP

#include <vector>

#include <Eigen/Dense>

namespace dotrecon {

// Symmetric positive definite operator with both a product and an inverse
// application; the prior matrix implements it, dense stand-ins serve tests.
class SpdOperator {
 public:
  virtual ~SpdOperator() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& b) const = 0;
};

struct LinearizedSystem {
  Eigen::MatrixXd a;        // whitened Jacobian
  Eigen::VectorXd y_tilde;  // whitened data
  const SpdOperator* prior = nullptr;
};

enum class LsqrStop { Discrepancy, MaxIter, Breakdown };

struct LsqrResult {
  Eigen::VectorXd beta;                  // solution in original coordinates
  std::vector<double> residual_history;  // |A beta_m - y|, m = 0, 1, ...
  int iterations = 0;
  LsqrStop stopped_by = LsqrStop::MaxIter;
};

// LSQR on the prior-preconditioned least-squares problem min |A L^{-1} b - y|
// with H = L^T L, run entirely through applications of H^{-1} (and products
// with H for the bidiagonalization norms), so no factor L is ever formed.
// Starts from beta = 0; each iterate lies in the Krylov subspace
// span{ H^{-1}A^T y, (H^{-1}A^T A) H^{-1}A^T y, ... } and is returned in the
// original (unpreconditioned) coordinates. Plain Golub-Kahan recurrences, no
// reorthogonalization; the Morozov-style stop keeps iteration counts small,
// and for long runs the usual LSQR orthogonality loss caveats apply.
LsqrResult priorconditioned_lsqr(const LinearizedSystem& sys, double stop_level,
                                 int max_iter);

// Row-scales (J, r) by Gamma^{-1/2} for a diagonal covariance: entry i is
// divided by sqrt(gamma_diag[i]). Throws if any variance is not positive.
void whiten(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual,
            const Eigen::VectorXd& gamma_diag, Eigen::MatrixXd* a_out,
            Eigen::VectorXd* y_out);

}  // namespace dotrecon

#endif
