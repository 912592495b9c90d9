#ifndef DOTRECON_FORWARD_HPP
#define DOTRECON_FORWARD_HPP

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"

namespace dotrecon {

using Complex = std::complex<double>;
using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

// Dimension constant of the Robin boundary coupling in 3D.
inline constexpr double kGamma = 0.25;

// Nodal P1 diffusivity/absorption fields plus the modulation parameter.
// kappa must be strictly positive everywhere; mu nonnegative (strictly
// positive in any physical run, zero tolerated for analytic checks).
struct CoefficientField {
  Eigen::VectorXd kappa;
  Eigen::VectorXd mu;
  double omega_over_c = 0.0;

  void validate(int node_count) const;
};

// The two real parts of the discrete bilinear form:
//   system(omega) = base + i*(omega/c) * mass
// where base = kappa-stiffness + mu-mass + 2*gamma*(boundary mass).
// The kappa stiffness term uses the element average of the nodal kappa
// (exact for P1 kappa); the mu mass term is integrated exactly for P1 mu.
struct AssembledParts {
  SparseReal base;
  SparseReal mass;
};

AssembledParts assemble_parts(const Mesh& mesh, const CoefficientField& coeff);

// Full complex system matrix; complex symmetric (equal to its plain
// transpose) because the weak form carries no conjugation.
SparseComplex assemble_system(const Mesh& mesh, const CoefficientField& coeff);

// Load vector 2*int_patch v dS: supported on the patch's nodes, entries sum
// to twice the patch area.
Eigen::VectorXd assemble_boundary_load(const Mesh& mesh, const std::vector<int>& facets);

// Device loads used throughout: for analytic circular patches the exact disk
// indicator is clipped against the facets and normalized to the exact disk
// flux, so the discrete device is mesh-independent up to quadrature; explicit
// facet-list patches stay pure characteristic functions. Sources, duals,
// measurements, and the Jacobian all use the same loads, so reciprocity and
// the adjoint identity hold verbatim.
Eigen::VectorXd source_load(const Mesh& mesh, const PatchSet& patches, int k);
Eigen::VectorXd sensor_load(const Mesh& mesh, const PatchSet& patches, int j);

// One factorization per coefficient set, shared by all right-hand sides.
// omega == 0 takes a real SPD path; otherwise complex sparse LU.
class ForwardSolver {
 public:
  ForwardSolver(const Mesh& mesh, const CoefficientField& coeff);

  Eigen::VectorXcd solve(const Eigen::VectorXd& load) const;
  Eigen::VectorXcd solve_complex(const Eigen::VectorXcd& load) const;

  double omega_over_c() const { return omega_; }
  const SparseComplex& system() const;

 private:
  double omega_;
  SparseReal base_, mass_;
  mutable SparseComplex system_;  // built on demand for residual checks
  std::unique_ptr<Eigen::SimplicialLDLT<SparseReal>> real_fact_;
  std::unique_ptr<Eigen::SparseLU<SparseComplex>> complex_fact_;

  void check_residual(const Eigen::VectorXcd& x, const Eigen::VectorXcd& b) const;
};

struct ForwardFields {
  std::vector<Eigen::VectorXcd> phi;  // per source
  std::vector<Eigen::VectorXcd> psi;  // per sensor
};

ForwardFields solve_fields(const ForwardSolver& solver, const Mesh& mesh,
                           const PatchSet& patches, bool with_duals = true);

// M_{jk} = 2*gamma*int_{m_j} phi_k dS, evaluated with the exact P1 facet rule.
Eigen::MatrixXcd compute_measurements(const ForwardFields& fields, const Mesh& mesh,
                                      const PatchSet& patches);

}  // namespace dotrecon

#endif
