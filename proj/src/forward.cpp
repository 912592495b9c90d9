#include "dotrecon/forward.hpp"

#include <cmath>

#include "dotrecon/errors.hpp"

namespace dotrecon {

void CoefficientField::validate(int node_count) const {
  if (kappa.size() != node_count || mu.size() != node_count)
    throw NumericalError("coefficients: field length does not match mesh nodes");
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    if (!(kappa[i] > 0.0))
      throw NumericalError("coefficients: kappa must be strictly positive (node " +
                           std::to_string(i) + ")");
    if (mu[i] < 0.0)
      throw NumericalError("coefficients: mu must be nonnegative (node " +
                           std::to_string(i) + ")");
  }
}

AssembledParts assemble_parts(const Mesh& mesh, const CoefficientField& coeff) {
  coeff.validate(mesh.node_count());
  const int n = mesh.node_count();
  std::vector<Eigen::Triplet<double>> base_t, mass_t;
  base_t.reserve(mesh.tets.size() * 16 + mesh.boundary_facets.size() * 9);
  mass_t.reserve(mesh.tets.size() * 16);

  const auto& geo = mesh.element_geometry();
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    const double vol = geo[e].volume;
    const auto& g = geo[e].grads;
    const double kbar =
        0.25 * (coeff.kappa[t[0]] + coeff.kappa[t[1]] + coeff.kappa[t[2]] +
                coeff.kappa[t[3]]);
    const double smu =
        coeff.mu[t[0]] + coeff.mu[t[1]] + coeff.mu[t[2]] + coeff.mu[t[3]];
    for (int m = 0; m < 4; ++m) {
      for (int l = 0; l < 4; ++l) {
        const double stiff = kbar * vol * g.col(m).dot(g.col(l));
        // Exact integral of (P1 mu) * phi_m * phi_l over the tet. The nodal
        // pair is summed first so the (m,l) and (l,m) entries round
        // identically and the matrix is symmetric to the last bit.
        const double mu_mass =
            (vol / 120.0) *
            (smu + (coeff.mu[t[m]] + coeff.mu[t[l]]) +
             (m == l ? smu + 2.0 * coeff.mu[t[m]] : 0.0));
        const double mass = (m == l ? vol / 10.0 : vol / 20.0);
        base_t.emplace_back(t[m], t[l], stiff + mu_mass);
        mass_t.emplace_back(t[m], t[l], mass);
      }
    }
  }

  const auto& fg = mesh.facet_geometry();
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    const auto& facet = mesh.boundary_facets[f];
    const double area = fg[f].area;
    for (int m = 0; m < 3; ++m)
      for (int l = 0; l < 3; ++l)
        base_t.emplace_back(facet[m], facet[l],
                            2.0 * kGamma * area * (m == l ? 1.0 / 6.0 : 1.0 / 12.0));
  }

  AssembledParts parts;
  parts.base.resize(n, n);
  parts.base.setFromTriplets(base_t.begin(), base_t.end());
  parts.mass.resize(n, n);
  parts.mass.setFromTriplets(mass_t.begin(), mass_t.end());
  return parts;
}

SparseComplex assemble_system(const Mesh& mesh, const CoefficientField& coeff) {
  const AssembledParts parts = assemble_parts(mesh, coeff);
  SparseComplex sys = parts.base.cast<Complex>();
  if (coeff.omega_over_c != 0.0)
    sys += Complex(0.0, coeff.omega_over_c) * parts.mass.cast<Complex>();
  return sys;
}

Eigen::VectorXd assemble_boundary_load(const Mesh& mesh, const std::vector<int>& facets) {
  if (facets.empty()) throw NumericalError("boundary load: empty patch");
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.node_count());
  const auto& fg = mesh.facet_geometry();
  for (int f : facets) {
    if (f < 0 || f >= static_cast<int>(mesh.boundary_facets.size()))
      throw NumericalError("boundary load: facet index out of range");
    const double w = 2.0 * fg[f].area / 3.0;
    for (int v : mesh.boundary_facets[f]) load[v] += w;
  }
  return load;
}

namespace {

Eigen::VectorXd device_load(const Mesh& mesh, const std::vector<int>& facets,
                            const Eigen::Vector3d& center, double radius) {
  if (radius <= 0.0) return assemble_boundary_load(mesh, facets);
  Eigen::VectorXd load = disk_indicator_load(mesh, facets, center, radius);
  const double flux = load.sum();
  if (!(flux > 0.0))
    throw NumericalError("device load: patch does not overlap its disk");
  // Normalize the total flux to the exact disk's.
  load *= 2.0 * M_PI * radius * radius / flux;
  return load;
}

}  // namespace

Eigen::VectorXd source_load(const Mesh& mesh, const PatchSet& patches, int k) {
  return device_load(mesh, patches.sources[k], patches.source_centers[k],
                     patches.patch_radius);
}

Eigen::VectorXd sensor_load(const Mesh& mesh, const PatchSet& patches, int j) {
  return device_load(mesh, patches.sensors[j], patches.sensor_centers[j],
                     patches.patch_radius);
}

ForwardSolver::ForwardSolver(const Mesh& mesh, const CoefficientField& coeff)
    : omega_(coeff.omega_over_c) {
  AssembledParts parts = assemble_parts(mesh, coeff);
  base_ = std::move(parts.base);
  mass_ = std::move(parts.mass);
  if (omega_ == 0.0) {
    real_fact_ = std::make_unique<Eigen::SimplicialLDLT<SparseReal>>();
    real_fact_->compute(base_);
    if (real_fact_->info() != Eigen::Success)
      throw NumericalError("forward solver: real factorization failed");
  } else {
    system_ = base_.cast<Complex>() + Complex(0.0, omega_) * mass_.cast<Complex>();
    complex_fact_ = std::make_unique<Eigen::SparseLU<SparseComplex>>();
    complex_fact_->compute(system_);
    if (complex_fact_->info() != Eigen::Success)
      throw NumericalError("forward solver: complex factorization failed");
  }
}

const SparseComplex& ForwardSolver::system() const {
  if (system_.rows() == 0)
    system_ = base_.cast<Complex>() + Complex(0.0, omega_) * mass_.cast<Complex>();
  return system_;
}

void ForwardSolver::check_residual(const Eigen::VectorXcd& x,
                                   const Eigen::VectorXcd& b) const {
  const double bn = b.norm();
  if (bn == 0.0) return;
  const double rn = (system() * x - b).norm();
  if (!(rn <= 1e-10 * bn))
    throw NumericalError("forward solver: relative residual " + std::to_string(rn / bn) +
                         " exceeds 1e-10");
}

Eigen::VectorXcd ForwardSolver::solve(const Eigen::VectorXd& load) const {
  if (omega_ == 0.0) {
    Eigen::VectorXd x = real_fact_->solve(load);
    if (real_fact_->info() != Eigen::Success)
      throw NumericalError("forward solver: solve failed");
    const double bn = load.norm();
    if (bn > 0.0 && !((base_ * x - load).norm() <= 1e-10 * bn))
      throw NumericalError("forward solver: relative residual exceeds 1e-10");
    return x.cast<Complex>();
  }
  return solve_complex(load.cast<Complex>());
}

Eigen::VectorXcd ForwardSolver::solve_complex(const Eigen::VectorXcd& load) const {
  if (omega_ == 0.0) {
    // Real system: solve the real and imaginary parts separately.
    Eigen::VectorXd xr = real_fact_->solve(load.real());
    Eigen::VectorXd xi = real_fact_->solve(load.imag());
    if (real_fact_->info() != Eigen::Success)
      throw NumericalError("forward solver: solve failed");
    Eigen::VectorXcd x(load.size());
    x.real() = xr;
    x.imag() = xi;
    check_residual(x, load);
    return x;
  }
  Eigen::VectorXcd x = complex_fact_->solve(load);
  if (complex_fact_->info() != Eigen::Success)
    throw NumericalError("forward solver: solve failed");
  check_residual(x, load);
  return x;
}

ForwardFields solve_fields(const ForwardSolver& solver, const Mesh& mesh,
                           const PatchSet& patches, bool with_duals) {
  ForwardFields fields;
  fields.phi.reserve(patches.sources.size());
  for (int k = 0; k < patches.source_count(); ++k)
    fields.phi.push_back(solver.solve(source_load(mesh, patches, k)));
  if (with_duals) {
    fields.psi.reserve(patches.sensors.size());
    for (int j = 0; j < patches.sensor_count(); ++j)
      fields.psi.push_back(solver.solve(sensor_load(mesh, patches, j)));
  }
  return fields;
}

Eigen::MatrixXcd compute_measurements(const ForwardFields& fields, const Mesh& mesh,
                                      const PatchSet& patches) {
  const int num_sensors = patches.sensor_count();
  const int num_sources = patches.source_count();
  if (static_cast<int>(fields.phi.size()) != num_sources)
    throw NumericalError("measurements: field count does not match sources");
  Eigen::MatrixXcd meas(num_sensors, num_sources);
  for (int j = 0; j < num_sensors; ++j) {
    // 2*gamma*int_{m_j} Psi_j phi dS = gamma * (sensor load . phi), since the
    // load carries the factor 2 from the weak form. The load is real, so
    // Eigen's conjugating dot() is a plain transpose product here.
    const Eigen::VectorXd bj = sensor_load(mesh, patches, j);
    for (int k = 0; k < num_sources; ++k)
      meas(j, k) = kGamma * bj.cast<Complex>().dot(fields.phi[k]);
  }
  return meas;
}

}  // namespace dotrecon
