#include "dotrecon/prior.hpp"

#include <cmath>
#include <vector>

#include "dotrecon/errors.hpp"

namespace dotrecon {

PmValue pm_r(double t, double edge_threshold) {
  if (!(edge_threshold > 0.0)) throw NumericalError("pm_r: threshold must be positive");
  const double s = t / edge_threshold;
  PmValue v;
  v.c = 1.0 / (1.0 + s * s);
  v.r = 0.5 * edge_threshold * edge_threshold * std::log1p(s * s);
  v.r_prime = t * v.c;
  return v;
}

namespace {

// Gradient of the P1 extension of u_free (zero on Dirichlet nodes) on tet e.
Eigen::Vector3d element_gradient(const Mesh& mesh, const FreeNodeMap& fmap,
                                 const Eigen::VectorXd& u_free, std::size_t e) {
  const auto& t = mesh.tets[e];
  const auto& g = mesh.element_geometry()[e].grads;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  for (int m = 0; m < 4; ++m) {
    const int fm = fmap.node_to_free[t[m]];
    if (fm >= 0) grad += u_free[fm] * g.col(m);
  }
  return grad;
}

}  // namespace

double evaluate_r_functional(const Mesh& mesh, const FreeNodeMap& fmap,
                             const Eigen::VectorXd& u_free, double edge_threshold) {
  if (u_free.size() != fmap.count)
    throw NumericalError("evaluate_r_functional: field length != free node count");
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const double gn = element_gradient(mesh, fmap, u_free, e).norm();
    total += mesh.element_geometry()[e].volume * pm_r(gn, edge_threshold).r;
  }
  return total;
}

Eigen::SparseMatrix<double> assemble_h(const Mesh& mesh, const FreeNodeMap& fmap,
                                       const Eigen::VectorXd& u_free,
                                       double edge_threshold) {
  if (fmap.count >= mesh.node_count())
    throw NumericalError("assemble_h: Dirichlet set is empty, H would be singular");
  if (u_free.size() != fmap.count)
    throw NumericalError("assemble_h: field length != free node count");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.tets.size() * 16);
  const auto& geo = mesh.element_geometry();
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    const double gn = element_gradient(mesh, fmap, u_free, e).norm();
    const double weight = pm_r(gn, edge_threshold).c * geo[e].volume;
    const auto& g = geo[e].grads;
    for (int m = 0; m < 4; ++m) {
      const int fm = fmap.node_to_free[t[m]];
      if (fm < 0) continue;
      for (int l = 0; l < 4; ++l) {
        const int fl = fmap.node_to_free[t[l]];
        if (fl < 0) continue;
        trips.emplace_back(fm, fl, weight * g.col(m).dot(g.col(l)));
      }
    }
  }
  Eigen::SparseMatrix<double> h(fmap.count, fmap.count);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

PriorMatrix::PriorMatrix(const Mesh& mesh, const FreeNodeMap& fmap,
                         const Eigen::VectorXd& sigma_free,
                         const Eigen::VectorXd& upsilon_free, const PriorConfig& config)
    : n_(fmap.count), ratio_(config.ratio_b_over_a) {
  if (!(ratio_ > 0.0)) throw NumericalError("prior: b/a ratio must be positive");
  h_sigma_ = assemble_h(mesh, fmap, sigma_free, config.edge_threshold);
  h_upsilon_ = assemble_h(mesh, fmap, upsilon_free, config.edge_threshold);
  fact_sigma_.compute(h_sigma_);
  fact_upsilon_.compute(h_upsilon_);
  if (fact_sigma_.info() != Eigen::Success || fact_upsilon_.info() != Eigen::Success)
    throw NumericalError("prior: factorization failed (H not positive definite?)");
}

Eigen::VectorXd PriorMatrix::apply(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw NumericalError("prior apply: dimension mismatch");
  Eigen::VectorXd out(dim());
  out.head(n_) = h_sigma_ * x.head(n_);
  out.tail(n_) = ratio_ * (h_upsilon_ * x.tail(n_));
  return out;
}

Eigen::VectorXd PriorMatrix::solve(const Eigen::VectorXd& b) const {
  if (b.size() != dim()) throw NumericalError("prior solve: dimension mismatch");
  Eigen::VectorXd out(dim());
  out.head(n_) = fact_sigma_.solve(b.head(n_));
  out.tail(n_) = fact_upsilon_.solve(b.tail(n_)) / ratio_;
  return out;
}

}  // namespace dotrecon
