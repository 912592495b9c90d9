#ifndef DOTRECON_PHANTOM_HPP
#define DOTRECON_PHANTOM_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dotrecon/mesh.hpp"

namespace dotrecon {

// Inclusion geometry primitives. A vertical cylinder has flat caps; a
// capsule is a segment with a spherical-cap radius, used to build tubes.
struct InclusionShape {
  enum class Kind { VerticalCylinder, Capsule };
  Kind kind = Kind::VerticalCylinder;
  Eigen::Vector3d a = Eigen::Vector3d::Zero();  // axis start (or cap center)
  Eigen::Vector3d b = Eigen::Vector3d::Zero();  // axis end
  double radius = 0.0;

  bool contains(const Eigen::Vector3d& x) const;
};

// Piecewise-constant phantom: homogeneous background with a list of
// inclusions, each a union of shapes that overrides kappa and/or mu.
struct Phantom {
  struct Inclusion {
    std::vector<InclusionShape> shapes;
    std::optional<double> kappa_value;
    std::optional<double> mu_value;

    bool contains(const Eigen::Vector3d& x) const;
  };

  double kappa_bg = 0.05;
  double mu_bg = 0.5;
  std::vector<Inclusion> inclusions;

  Eigen::VectorXd kappa_field(const Mesh& mesh) const;
  Eigen::VectorXd mu_field(const Mesh& mesh) const;
};

enum class PhantomPreset { Case1Mu, Case1Kappa, Case2, Case4, Custom };

PhantomPreset phantom_preset_from_string(const std::string& name);

// Builds the preset and verifies its shapes fit inside the mesh's bounding
// box. Custom gives the homogeneous cylinder background with no inclusions.
Phantom build_phantom(PhantomPreset preset, const Mesh& mesh);

}  // namespace dotrecon

#endif
