#include "dotrecon/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "dotrecon/errors.hpp"

namespace dotrecon {

bool InclusionShape::contains(const Eigen::Vector3d& x) const {
  if (kind == Kind::VerticalCylinder) {
    const double zlo = std::min(a.z(), b.z()), zhi = std::max(a.z(), b.z());
    if (x.z() < zlo || x.z() > zhi) return false;
    const double dx = x.x() - a.x(), dy = x.y() - a.y();
    return dx * dx + dy * dy <= radius * radius;
  }
  // Capsule: distance to the segment [a, b].
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + t * ab)).squaredNorm() <= radius * radius;
}

bool Phantom::Inclusion::contains(const Eigen::Vector3d& x) const {
  for (const auto& s : shapes)
    if (s.contains(x)) return true;
  return false;
}

Eigen::VectorXd Phantom::kappa_field(const Mesh& mesh) const {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(mesh.node_count(), kappa_bg);
  for (int i = 0; i < mesh.node_count(); ++i)
    for (const auto& inc : inclusions)
      if (inc.kappa_value && inc.contains(mesh.vertices[i])) f[i] = *inc.kappa_value;
  return f;
}

Eigen::VectorXd Phantom::mu_field(const Mesh& mesh) const {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(mesh.node_count(), mu_bg);
  for (int i = 0; i < mesh.node_count(); ++i)
    for (const auto& inc : inclusions)
      if (inc.mu_value && inc.contains(mesh.vertices[i])) f[i] = *inc.mu_value;
  return f;
}

PhantomPreset phantom_preset_from_string(const std::string& name) {
  if (name == "case1_mu") return PhantomPreset::Case1Mu;
  if (name == "case1_kappa") return PhantomPreset::Case1Kappa;
  if (name == "case2") return PhantomPreset::Case2;
  if (name == "case4") return PhantomPreset::Case4;
  if (name == "custom") return PhantomPreset::Custom;
  throw ConfigError("unknown phantom preset '" + name + "'");
}

namespace {

Phantom::Inclusion cylinder_absorption_inclusion() {
  // Radius-0.2, height-0.6 cylinder touching the bottom, offset to (0.4, 0).
  Phantom::Inclusion inc;
  InclusionShape s;
  s.kind = InclusionShape::Kind::VerticalCylinder;
  s.a = {0.4, 0.0, 0.0};
  s.b = {0.4, 0.0, 0.6};
  s.radius = 0.2;
  inc.shapes.push_back(s);
  inc.mu_value = 2.5;
  return inc;
}

Phantom::Inclusion cylinder_diffusivity_inclusion() {
  // Like cylinder touching the top, on the opposite side at (-0.4, 0).
  Phantom::Inclusion inc;
  InclusionShape s;
  s.kind = InclusionShape::Kind::VerticalCylinder;
  s.a = {-0.4, 0.0, 0.4};
  s.b = {-0.4, 0.0, 1.0};
  s.radius = 0.2;
  inc.shapes.push_back(s);
  inc.kappa_value = 0.25;
  return inc;
}

InclusionShape capsule(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double r) {
  InclusionShape s;
  s.kind = InclusionShape::Kind::Capsule;
  s.a = a;
  s.b = b;
  s.radius = r;
  return s;
}

// Twisted z-shaped tubes: an x-parallel arm, the shared y-parallel middle
// section at height z = 2, and a z-parallel arm. The two tubes coincide in
// the middle section and twist to opposite sides.
Phantom::Inclusion ball_tube_inclusion(bool absorption) {
  const double r = 1.5, arm = 5.0;
  const Eigen::Vector3d mid_a(0.0, -2.5, 2.0), mid_b(0.0, 2.5, 2.0);
  Phantom::Inclusion inc;
  inc.shapes.push_back(capsule(mid_a, mid_b, r));
  if (absorption) {
    inc.shapes.push_back(capsule(mid_a, mid_a + Eigen::Vector3d(-arm, 0, 0), r));
    inc.shapes.push_back(capsule(mid_b, mid_b + Eigen::Vector3d(0, 0, -arm), r));
    inc.mu_value = 0.125;
  } else {
    inc.shapes.push_back(capsule(mid_a, mid_a + Eigen::Vector3d(arm, 0, 0), r));
    inc.shapes.push_back(capsule(mid_b, mid_b + Eigen::Vector3d(0, 0, arm), r));
    inc.kappa_value = 0.075;
  }
  return inc;
}

void check_inside(const Phantom& phantom, const Mesh& mesh) {
  Eigen::Vector3d lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  for (const auto& inc : phantom.inclusions) {
    for (const auto& s : inc.shapes) {
      // Flat caps of a vertical cylinder may touch the boundary; only the
      // radial directions carry the radius pad then.
      Eigen::Vector3d pad = Eigen::Vector3d::Constant(s.radius);
      if (s.kind == InclusionShape::Kind::VerticalCylinder) pad.z() = 0.0;
      const Eigen::Vector3d slo = s.a.cwiseMin(s.b) - pad;
      const Eigen::Vector3d shi = s.a.cwiseMax(s.b) + pad;
      if ((slo.array() < lo.array() - 1e-9).any() ||
          (shi.array() > hi.array() + 1e-9).any())
        throw ConfigError("build_phantom: inclusion does not fit inside the mesh");
    }
  }
}

}  // namespace

Phantom build_phantom(PhantomPreset preset, const Mesh& mesh) {
  Phantom p;
  switch (preset) {
    case PhantomPreset::Case1Mu:
      p.kappa_bg = 0.05;
      p.mu_bg = 0.5;
      p.inclusions.push_back(cylinder_absorption_inclusion());
      break;
    case PhantomPreset::Case1Kappa:
      p.kappa_bg = 0.05;
      p.mu_bg = 0.5;
      p.inclusions.push_back(cylinder_diffusivity_inclusion());
      break;
    case PhantomPreset::Case2:
      p.kappa_bg = 0.05;
      p.mu_bg = 0.5;
      p.inclusions.push_back(cylinder_absorption_inclusion());
      p.inclusions.push_back(cylinder_diffusivity_inclusion());
      break;
    case PhantomPreset::Case4:
      p.kappa_bg = 0.15;
      p.mu_bg = 0.025;
      p.inclusions.push_back(ball_tube_inclusion(true));
      p.inclusions.push_back(ball_tube_inclusion(false));
      break;
    case PhantomPreset::Custom:
      p.kappa_bg = 0.05;
      p.mu_bg = 0.5;
      break;
  }
  check_inside(p, mesh);
  return p;
}

}  // namespace dotrecon
