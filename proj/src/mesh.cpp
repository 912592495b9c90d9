#include "dotrecon/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "dotrecon/errors.hpp"
#include "dotrecon/util.hpp"

namespace dotrecon {

double tet_signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                         const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

namespace {

ElementGeometry element_geometry_of(const Mesh& mesh, const std::array<int, 4>& t) {
  const Eigen::Vector3d& a = mesh.vertices[t[0]];
  Eigen::Matrix3d e;
  e.col(0) = mesh.vertices[t[1]] - a;
  e.col(1) = mesh.vertices[t[2]] - a;
  e.col(2) = mesh.vertices[t[3]] - a;
  ElementGeometry g;
  g.volume = e.determinant() / 6.0;
  // Rows of e^{-T} are the gradients of the barycentric coordinates of
  // vertices 1..3; vertex 0 closes the partition of unity.
  Eigen::Matrix3d inv = e.inverse();
  g.grads.col(1) = inv.row(0).transpose();
  g.grads.col(2) = inv.row(1).transpose();
  g.grads.col(3) = inv.row(2).transpose();
  g.grads.col(0) = -(g.grads.col(1) + g.grads.col(2) + g.grads.col(3));
  return g;
}

FacetGeometry facet_geometry_of(const Mesh& mesh, const std::array<int, 3>& f) {
  const Eigen::Vector3d& a = mesh.vertices[f[0]];
  const Eigen::Vector3d& b = mesh.vertices[f[1]];
  const Eigen::Vector3d& c = mesh.vertices[f[2]];
  FacetGeometry g;
  const Eigen::Vector3d n = (b - a).cross(c - a);
  g.area = 0.5 * n.norm();
  g.normal = n.normalized();
  g.centroid = (a + b + c) / 3.0;
  return g;
}

}  // namespace

void Mesh::finalize() {
  if (vertices.empty() || tets.empty())
    throw NumericalError("mesh: no vertices or tetrahedra");
  for (const auto& t : tets)
    for (int v : t)
      if (v < 0 || v >= node_count())
        throw NumericalError("mesh: tet references an invalid vertex index");

  elem_geo_.resize(tets.size());
  total_volume_ = 0.0;
  for (std::size_t i = 0; i < tets.size(); ++i) {
    elem_geo_[i] = element_geometry_of(*this, tets[i]);
    if (!(elem_geo_[i].volume > 0.0))
      throw NumericalError("mesh: tetrahedron " + std::to_string(i) +
                           " has nonpositive volume");
    total_volume_ += elem_geo_[i].volume;
  }

  if (boundary_facets.empty()) derive_boundary_facets(*this);

  facet_geo_.resize(boundary_facets.size());
  boundary_area_ = 0.0;
  Eigen::Vector3d closure = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < boundary_facets.size(); ++i) {
    facet_geo_[i] = facet_geometry_of(*this, boundary_facets[i]);
    boundary_area_ += facet_geo_[i].area;
    closure += facet_geo_[i].area * facet_geo_[i].normal;
  }
  if (closure.norm() > 1e-10 * boundary_area_)
    throw NumericalError("mesh: boundary facets do not close (orientation?)");
}

std::uint64_t Mesh::reference_hash() const {
  Fnv1a h;
  h.add_u64(vertices.size());
  h.add_u64(tets.size());
  for (const auto& v : vertices)
    for (int d = 0; d < 3; ++d) h.add_double(v[d]);
  for (const auto& t : tets)
    for (int v : t) h.add_u64(static_cast<std::uint64_t>(v));
  return h.value();
}

void derive_boundary_facets(Mesh& mesh) {
  // Outward-oriented faces of a positively oriented tet (a,b,c,d).
  static const int face_of[4][3] = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> seen;
  for (const auto& t : mesh.tets) {
    for (const auto& fo : face_of) {
      std::array<int, 3> f = {t[fo[0]], t[fo[1]], t[fo[2]]};
      std::array<int, 3> key = f;
      std::sort(key.begin(), key.end());
      auto it = seen.find(key);
      if (it == seen.end())
        seen.emplace(key, std::make_pair(f, 1));
      else
        it->second.second += 1;
    }
  }
  mesh.boundary_facets.clear();
  for (const auto& [key, val] : seen) {
    if (val.second == 1)
      mesh.boundary_facets.push_back(val.first);
    else if (val.second != 2)
      throw NumericalError("mesh: a face is shared by more than two tets");
  }
}

// ---------------------------------------------------------------------------
// Cylinder: hexagonal-ring disk triangulation extruded along z. All rim
// vertices lie exactly on the circle; prisms are split into three tets with
// diagonals chosen by vertex-index order, which is conforming by construction.

namespace {

struct DiskMesh {
  std::vector<Eigen::Vector2d> points;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> rim;  // indices of the outermost ring, in angular order
};

DiskMesh triangulate_disk(double radius, int rings) {
  DiskMesh d;
  d.points.emplace_back(0.0, 0.0);
  std::vector<int> ring_start(rings + 1, 0);
  for (int i = 1; i <= rings; ++i) {
    ring_start[i] = static_cast<int>(d.points.size());
    const int n = 6 * i;
    const double r = radius * i / rings;
    for (int m = 0; m < n; ++m) {
      const double ang = 2.0 * M_PI * m / n;
      d.points.emplace_back(r * std::cos(ang), r * std::sin(ang));
    }
  }
  // Fan around the center.
  for (int m = 0; m < 6; ++m)
    d.tris.push_back({0, ring_start[1] + m, ring_start[1] + (m + 1) % 6});
  // Band between ring i-1 and ring i, six sectors each.
  for (int i = 2; i <= rings; ++i) {
    const int ni = 6 * i, no = 6 * (i - 1);
    auto outer = [&](int m) { return ring_start[i] + ((m % ni) + ni) % ni; };
    auto inner = [&](int m) { return ring_start[i - 1] + ((m % no) + no) % no; };
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t < i; ++t) {
        d.tris.push_back({outer(s * i + t), outer(s * i + t + 1), inner(s * (i - 1) + t)});
        if (t < i - 1)
          d.tris.push_back({inner(s * (i - 1) + t), outer(s * i + t + 1),
                            inner(s * (i - 1) + t + 1)});
      }
    }
  }
  for (int m = 0; m < 6 * rings; ++m) d.rim.push_back(ring_start[rings] + m);
  return d;
}

}  // namespace

Mesh generate_cylinder(double radius, double height, double h_target) {
  if (!(radius > 0.0) || !(height > 0.0) || !(h_target > 0.0))
    throw ConfigError("generate_cylinder: radius, height, h_target must be positive");
  const int rings = std::max(1, static_cast<int>(std::ceil(radius / h_target)));
  const int layers = std::max(1, static_cast<int>(std::ceil(height / h_target)));

  const DiskMesh disk = triangulate_disk(radius, rings);
  const int per_layer = static_cast<int>(disk.points.size());

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(per_layer) * (layers + 1));
  for (int l = 0; l <= layers; ++l) {
    const double z = height * l / layers;
    for (const auto& p : disk.points) mesh.vertices.emplace_back(p.x(), p.y(), z);
  }

  // Split each prism into three tets; sort the prism's columns by disk index
  // so shared quad faces get the same diagonal from both sides.
  for (int l = 0; l < layers; ++l) {
    const int lo = l * per_layer, hi = (l + 1) * per_layer;
    for (const auto& tri : disk.tris) {
      std::array<int, 3> c = tri;
      std::sort(c.begin(), c.end());
      const int u0 = lo + c[0], u1 = lo + c[1], u2 = lo + c[2];
      const int w0 = hi + c[0], w1 = hi + c[1], w2 = hi + c[2];
      for (std::array<int, 4> t :
           {std::array<int, 4>{u0, u1, u2, w2}, std::array<int, 4>{u0, u1, w1, w2},
            std::array<int, 4>{u0, w0, w1, w2}}) {
        if (tet_signed_volume(mesh.vertices[t[0]], mesh.vertices[t[1]],
                              mesh.vertices[t[2]], mesh.vertices[t[3]]) < 0.0)
          std::swap(t[2], t[3]);
        mesh.tets.push_back(t);
      }
    }
  }

  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// Ball: center-vertex octahedron refined uniformly (red refinement, shortest
// interior diagonal) with boundary vertices projected to the sphere after
// every level.

namespace {

struct RefineState {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 4>> tets;
  std::set<int> boundary_verts;
};

int midpoint(RefineState& s, std::map<std::pair<int, int>, int>& cache, int a, int b,
             double radius) {
  const auto key = std::minmax(a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::Vector3d m = 0.5 * (s.verts[a] + s.verts[b]);
  const bool on_surface = s.boundary_verts.count(a) && s.boundary_verts.count(b);
  const int id = static_cast<int>(s.verts.size());
  s.verts.push_back(m);
  cache.emplace(key, id);
  if (on_surface) s.boundary_verts.insert(id);
  (void)radius;
  return id;
}

void refine_once(RefineState& s, double radius) {
  std::map<std::pair<int, int>, int> mid;
  std::vector<std::array<int, 4>> out;
  out.reserve(s.tets.size() * 8);
  for (const auto& t : s.tets) {
    const int v0 = t[0], v1 = t[1], v2 = t[2], v3 = t[3];
    const int m01 = midpoint(s, mid, v0, v1, radius);
    const int m02 = midpoint(s, mid, v0, v2, radius);
    const int m03 = midpoint(s, mid, v0, v3, radius);
    const int m12 = midpoint(s, mid, v1, v2, radius);
    const int m13 = midpoint(s, mid, v1, v3, radius);
    const int m23 = midpoint(s, mid, v2, v3, radius);
    out.push_back({v0, m01, m02, m03});
    out.push_back({v1, m01, m12, m13});
    out.push_back({v2, m02, m12, m23});
    out.push_back({v3, m03, m13, m23});
    // Interior octahedron: split along its shortest diagonal.
    const double d0 = (s.verts[m01] - s.verts[m23]).squaredNorm();
    const double d1 = (s.verts[m02] - s.verts[m13]).squaredNorm();
    const double d2 = (s.verts[m03] - s.verts[m12]).squaredNorm();
    if (d0 <= d1 && d0 <= d2) {
      out.push_back({m01, m23, m02, m03});
      out.push_back({m01, m23, m03, m13});
      out.push_back({m01, m23, m13, m12});
      out.push_back({m01, m23, m12, m02});
    } else if (d1 <= d2) {
      out.push_back({m02, m13, m01, m03});
      out.push_back({m02, m13, m03, m23});
      out.push_back({m02, m13, m23, m12});
      out.push_back({m02, m13, m12, m01});
    } else {
      out.push_back({m03, m12, m01, m02});
      out.push_back({m03, m12, m02, m23});
      out.push_back({m03, m12, m23, m13});
      out.push_back({m03, m12, m13, m01});
    }
  }
  s.tets = std::move(out);
  // Midpoints of surface edges sag inside the sphere; push them back out.
  for (int v : s.boundary_verts) s.verts[v] = radius * s.verts[v].normalized();
}

}  // namespace

Mesh generate_ball(double radius, double h_target) {
  if (!(radius > 0.0) || !(h_target > 0.0))
    throw ConfigError("generate_ball: radius and h_target must be positive");

  RefineState s;
  s.verts = {Eigen::Vector3d::Zero(),
             {radius, 0, 0}, {-radius, 0, 0},
             {0, radius, 0}, {0, -radius, 0},
             {0, 0, radius}, {0, 0, -radius}};
  for (int i = 1; i <= 6; ++i) s.boundary_verts.insert(i);
  const int px[4] = {1, 3, 2, 4};  // +x,+y,-x,-y in angular order
  for (int q = 0; q < 4; ++q) {
    const int a = px[q], b = px[(q + 1) % 4];
    s.tets.push_back({0, a, b, 5});
    s.tets.push_back({0, b, a, 6});
  }

  const double surface_edge = radius * std::sqrt(2.0);
  int levels = 0;
  while (surface_edge / std::pow(2.0, levels) > h_target && levels < 12) ++levels;
  for (int l = 0; l < levels; ++l) refine_once(s, radius);

  Mesh mesh;
  mesh.vertices = std::move(s.verts);
  mesh.tets = std::move(s.tets);
  for (auto& t : mesh.tets) {
    if (tet_signed_volume(mesh.vertices[t[0]], mesh.vertices[t[1]],
                          mesh.vertices[t[2]], mesh.vertices[t[3]]) < 0.0)
      std::swap(t[2], t[3]);
  }
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------

FreeNodeMap build_free_node_map(const Mesh& mesh, const std::vector<int>& dirichlet_nodes) {
  FreeNodeMap m;
  m.node_to_free.assign(mesh.node_count(), -2);
  for (int s : dirichlet_nodes) {
    if (s < 0 || s >= mesh.node_count())
      throw ConfigError("free node map: Dirichlet node out of range");
    m.node_to_free[s] = -1;
  }
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (m.node_to_free[i] == -2) {
      m.node_to_free[i] = m.count++;
      m.free_to_node.push_back(i);
    }
  }
  return m;
}

}  // namespace dotrecon
