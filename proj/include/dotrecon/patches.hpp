#ifndef DOTRECON_PATCHES_HPP
#define DOTRECON_PATCHES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dotrecon/mesh.hpp"

namespace dotrecon {

// Source and sensor patches: unions of whole boundary facets, mutually
// disjoint. The Dirichlet set S (all nodes of all patches by default) pins
// the log-parameters to the background on the instrumented boundary.
// Source and sensor patches. Analytic layouts (patch_radius > 0) realize the
// exact circular device by clipping it against the boundary facets, so the
// discrete device agrees across different meshes of the same geometry;
// explicit facet-list layouts (patch_radius == 0) are plain facet unions.
struct PatchSet {
  std::vector<std::vector<int>> sources;  // facets overlapping each source
  std::vector<std::vector<int>> sensors;
  std::vector<Eigen::Vector3d> source_centers;
  std::vector<Eigen::Vector3d> sensor_centers;
  std::vector<int> dirichlet_nodes;  // sorted, unique
  double patch_radius = 0.0;
  std::uint64_t layout_hash = 0;

  int source_count() const { return static_cast<int>(sources.size()); }
  int sensor_count() const { return static_cast<int>(sensors.size()); }
  // Realized device area: disk-clipped for analytic layouts, whole-facet
  // union for explicit ones.
  double source_area(const Mesh& mesh, int k) const;
  double sensor_area(const Mesh& mesh, int j) const;
  double patch_area(const Mesh& mesh, const std::vector<int>& facets) const;
};

struct CylinderRingLayout {
  int num_sources = 24;
  int num_sensors = 24;
  double patch_radius = 0.1;
  double cylinder_radius = 1.0;
  double cylinder_height = 1.0;
  std::vector<double> ring_heights;  // defaults to {0.25, 0.5, 0.75} * height
};

struct BallEvenLayout {
  int num_sources = 32;
  int num_sensors = 60;
  double patch_radius = 1.0;
  double ball_radius = 10.0;
};

PatchSet define_patches_cylinder(const Mesh& mesh, const CylinderRingLayout& layout);
PatchSet define_patches_ball(const Mesh& mesh, const BallEvenLayout& layout);

// Overlap fraction of a boundary facet with the ball |x - center| <= radius,
// by recursive subdivision (64 subtriangles, centroid rule).
double facet_disk_overlap(const Mesh& mesh, int facet, const Eigen::Vector3d& center,
                          double radius);

// P1 load of the exact disk indicator integrated over the given facets with
// the same sub-facet rule. Entries sum to twice the clipped area.
Eigen::VectorXd disk_indicator_load(const Mesh& mesh, const std::vector<int>& facets,
                                    const Eigen::Vector3d& center, double radius);

// Explicit facet lists (externally meshed geometries). Disjointness and
// non-emptiness are enforced the same way as for the analytic layouts.
PatchSet define_patches_explicit(const Mesh& mesh,
                                 const std::vector<std::vector<int>>& sources,
                                 const std::vector<std::vector<int>>& sensors);

// Analytic patch centers only; used to compute retention masks and layout
// hashes without a mesh.
std::vector<Eigen::Vector3d> cylinder_ring_centers(const CylinderRingLayout& layout,
                                                   std::vector<int>* is_source);
std::vector<Eigen::Vector3d> ball_even_centers(const BallEvenLayout& layout,
                                               std::vector<int>* is_source);

struct MeshDiagnostics {
  double min_tet_volume = 0.0;
  double max_tet_volume = 0.0;
  int nonpositive_tets = 0;
  int inward_facets = 0;
  double boundary_closure = 0.0;  // |sum of area-weighted normals| / area
  bool patches_disjoint = true;
  int dirichlet_count = 0;
  std::string summary() const;
};

MeshDiagnostics validate(const Mesh& mesh, const PatchSet* patches = nullptr);

}  // namespace dotrecon

#endif
