#ifndef DOTRECON_MESH_HPP
#define DOTRECON_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dotrecon {

// Per-tet quantities used by every assembly loop: signed volume and the
// constant gradients of the four P1 basis functions (columns match the
// tet's local vertex order).
struct ElementGeometry {
  double volume;
  Eigen::Matrix<double, 3, 4> grads;
};

struct FacetGeometry {
  double area;
  Eigen::Vector3d normal;    // unit, outward
  Eigen::Vector3d centroid;
};

// Immutable tetrahedral P1 mesh. Boundary facets tile the boundary exactly
// once each with outward orientation; derived geometry is computed once in
// finalize() and shared read-only afterwards.
class Mesh {
 public:
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<std::array<int, 3>> boundary_facets;

  // Validates invariants (positive volumes, boundary closure) and fills the
  // derived caches. Throws NumericalError on an invalid mesh.
  void finalize();

  int node_count() const { return static_cast<int>(vertices.size()); }
  int tet_count() const { return static_cast<int>(tets.size()); }

  const std::vector<ElementGeometry>& element_geometry() const { return elem_geo_; }
  const std::vector<FacetGeometry>& facet_geometry() const { return facet_geo_; }

  double total_volume() const { return total_volume_; }
  double boundary_area() const { return boundary_area_; }

  // Hash over vertex coordinates and connectivity; written into solution
  // files so a reload can detect a mesh mismatch.
  std::uint64_t reference_hash() const;

 private:
  std::vector<ElementGeometry> elem_geo_;
  std::vector<FacetGeometry> facet_geo_;
  double total_volume_ = 0.0;
  double boundary_area_ = 0.0;
};

double tet_signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                         const Eigen::Vector3d& c, const Eigen::Vector3d& d);

// Derives boundary facets as the tet faces shared by exactly one tet,
// oriented outward. Used by the generators and the MSH loader.
void derive_boundary_facets(Mesh& mesh);

// Structured primitive meshes. Cylinder: ring-patterned disk triangulation
// extruded in z with an index-ordered prism split. Ball: red refinement of a
// center-vertex octahedron with per-level projection of boundary vertices
// onto the sphere. Both are deterministic for fixed inputs.
Mesh generate_cylinder(double radius, double height, double h_target);
Mesh generate_ball(double radius, double h_target);

// Gmsh MSH 2.2 ASCII. The loader accepts tetrahedra (type 4) and triangles
// (type 2, ignored for connectivity); any other element type is an error.
Mesh load_msh(const std::string& path);
void write_msh(const Mesh& mesh, const std::string& path);

// Node-set map for the parameter space: nodes not in the Dirichlet set S,
// numbered 0..count-1.
struct FreeNodeMap {
  std::vector<int> node_to_free;  // -1 for nodes on S
  std::vector<int> free_to_node;
  int count = 0;
};

FreeNodeMap build_free_node_map(const Mesh& mesh, const std::vector<int>& dirichlet_nodes);

}  // namespace dotrecon

#endif
