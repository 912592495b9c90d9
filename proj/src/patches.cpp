#include "dotrecon/patches.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dotrecon/errors.hpp"
#include "dotrecon/util.hpp"

namespace dotrecon {

namespace {

// Bresenham-style interleave of K sources and J sensors along a sequence of
// K+J patch positions; strict alternation when K == J.
std::vector<int> interleave_flags(int num_sources, int num_sensors) {
  std::vector<int> flags;
  int s = 0, m = 0;
  for (int p = 0; p < num_sources + num_sensors; ++p) {
    const bool take_source =
        s < num_sources &&
        (m >= num_sensors ||
         static_cast<long long>(s) * num_sensors <= static_cast<long long>(m) * num_sources);
    flags.push_back(take_source ? 1 : 0);
    (take_source ? s : m) += 1;
  }
  return flags;
}

std::uint64_t hash_layout(const char* kind, int num_sources, int num_sensors,
                          double patch_radius,
                          const std::vector<Eigen::Vector3d>& centers) {
  Fnv1a h;
  h.add_bytes(kind, std::char_traits<char>::length(kind));
  h.add_u64(static_cast<std::uint64_t>(num_sources));
  h.add_u64(static_cast<std::uint64_t>(num_sensors));
  h.add_double(patch_radius);
  for (const auto& c : centers)
    for (int d = 0; d < 3; ++d) h.add_double(c[d]);
  return h.value();
}

PatchSet patches_from_centers(const Mesh& mesh,
                              const std::vector<Eigen::Vector3d>& centers,
                              const std::vector<int>& is_source, double patch_radius,
                              std::uint64_t layout_hash) {
  PatchSet ps;
  ps.patch_radius = patch_radius;
  ps.layout_hash = layout_hash;

  const auto& fg = mesh.facet_geometry();
  std::vector<int> owner(mesh.boundary_facets.size(), -1);
  std::vector<std::vector<int>> facet_lists(centers.size());
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    // Cheap reject before the sub-facet overlap test.
    const double reach = patch_radius + 2.0 * std::sqrt(fg[f].area);
    for (std::size_t p = 0; p < centers.size(); ++p) {
      if ((fg[f].centroid - centers[p]).norm() > reach) continue;
      if (facet_disk_overlap(mesh, static_cast<int>(f), centers[p], patch_radius) <=
          0.0)
        continue;
      if (owner[f] >= 0)
        throw ConfigError("define_patches: patches overlap on facet " +
                          std::to_string(f) + " (reduce patch_radius)");
      owner[f] = static_cast<int>(p);
      facet_lists[p].push_back(static_cast<int>(f));
    }
  }

  std::set<int> dirichlet;
  for (std::size_t p = 0; p < centers.size(); ++p) {
    if (facet_lists[p].empty())
      throw ConfigError(
          "define_patches: patch " + std::to_string(p) +
          " captured no boundary facets (mesh too coarse for patch_radius)");
    for (int f : facet_lists[p])
      for (int v : mesh.boundary_facets[f]) dirichlet.insert(v);
    if (is_source[p]) {
      ps.sources.push_back(facet_lists[p]);
      ps.source_centers.push_back(centers[p]);
    } else {
      ps.sensors.push_back(facet_lists[p]);
      ps.sensor_centers.push_back(centers[p]);
    }
  }
  ps.dirichlet_nodes.assign(dirichlet.begin(), dirichlet.end());
  return ps;
}

}  // namespace

namespace {

// Recursive midpoint-rule integration over a facet, with vertices tracked in
// the parent facet's barycentric coordinates so P1 hat values at subtriangle
// centroids are exact.
template <typename Visit>
void for_subtriangles(const Eigen::Vector3d verts[3], const Eigen::Vector3d bary[3],
                      int depth, const Visit& visit) {
  if (depth == 0) {
    visit(verts, bary);
    return;
  }
  const Eigen::Vector3d mv[3] = {0.5 * (verts[0] + verts[1]),
                                 0.5 * (verts[1] + verts[2]),
                                 0.5 * (verts[2] + verts[0])};
  const Eigen::Vector3d mb[3] = {0.5 * (bary[0] + bary[1]), 0.5 * (bary[1] + bary[2]),
                                 0.5 * (bary[2] + bary[0])};
  const Eigen::Vector3d cv[4][3] = {{verts[0], mv[0], mv[2]},
                                    {mv[0], verts[1], mv[1]},
                                    {mv[2], mv[1], verts[2]},
                                    {mv[0], mv[1], mv[2]}};
  const Eigen::Vector3d cb[4][3] = {{bary[0], mb[0], mb[2]},
                                    {mb[0], bary[1], mb[1]},
                                    {mb[2], mb[1], bary[2]},
                                    {mb[0], mb[1], mb[2]}};
  for (int c = 0; c < 4; ++c) for_subtriangles(cv[c], cb[c], depth - 1, visit);
}

constexpr int kClipDepth = 3;  // 64 subtriangles per facet

}  // namespace

double facet_disk_overlap(const Mesh& mesh, int facet, const Eigen::Vector3d& center,
                          double radius) {
  const auto& f = mesh.boundary_facets[facet];
  const Eigen::Vector3d verts[3] = {mesh.vertices[f[0]], mesh.vertices[f[1]],
                                    mesh.vertices[f[2]]};
  const Eigen::Vector3d bary[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ()};
  double inside = 0.0, total = 0.0;
  for_subtriangles(verts, bary, kClipDepth,
                   [&](const Eigen::Vector3d v[3], const Eigen::Vector3d[3]) {
                     const double area =
                         0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm();
                     total += area;
                     if (((v[0] + v[1] + v[2]) / 3.0 - center).norm() <= radius)
                       inside += area;
                   });
  return total > 0.0 ? inside / total : 0.0;
}

Eigen::VectorXd disk_indicator_load(const Mesh& mesh, const std::vector<int>& facets,
                                    const Eigen::Vector3d& center, double radius) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.node_count());
  for (int fi : facets) {
    const auto& f = mesh.boundary_facets[fi];
    const Eigen::Vector3d verts[3] = {mesh.vertices[f[0]], mesh.vertices[f[1]],
                                      mesh.vertices[f[2]]};
    const Eigen::Vector3d bary[3] = {Eigen::Vector3d::UnitX(),
                                     Eigen::Vector3d::UnitY(),
                                     Eigen::Vector3d::UnitZ()};
    for_subtriangles(verts, bary, kClipDepth,
                     [&](const Eigen::Vector3d v[3], const Eigen::Vector3d b[3]) {
                       const Eigen::Vector3d ctr = (v[0] + v[1] + v[2]) / 3.0;
                       if ((ctr - center).norm() > radius) return;
                       const double area =
                           0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm();
                       const Eigen::Vector3d hat = (b[0] + b[1] + b[2]) / 3.0;
                       for (int m = 0; m < 3; ++m)
                         load[f[m]] += 2.0 * area * hat[m];
                     });
  }
  return load;
}

double PatchSet::patch_area(const Mesh& mesh, const std::vector<int>& facets) const {
  double a = 0.0;
  for (int f : facets) a += mesh.facet_geometry()[f].area;
  return a;
}

double PatchSet::source_area(const Mesh& mesh, int k) const {
  if (patch_radius <= 0.0) return patch_area(mesh, sources[k]);
  double a = 0.0;
  for (int f : sources[k])
    a += facet_disk_overlap(mesh, f, source_centers[k], patch_radius) *
         mesh.facet_geometry()[f].area;
  return a;
}

double PatchSet::sensor_area(const Mesh& mesh, int j) const {
  if (patch_radius <= 0.0) return patch_area(mesh, sensors[j]);
  double a = 0.0;
  for (int f : sensors[j])
    a += facet_disk_overlap(mesh, f, sensor_centers[j], patch_radius) *
         mesh.facet_geometry()[f].area;
  return a;
}

std::vector<Eigen::Vector3d> cylinder_ring_centers(const CylinderRingLayout& layout,
                                                   std::vector<int>* is_source) {
  if (layout.num_sources < 1 || layout.num_sensors < 1)
    throw ConfigError("cylinder layout: need at least one source and one sensor");
  std::vector<double> heights = layout.ring_heights;
  if (heights.empty())
    heights = {0.25 * layout.cylinder_height, 0.5 * layout.cylinder_height,
               0.75 * layout.cylinder_height};

  const int total = layout.num_sources + layout.num_sensors;
  const int nrings = static_cast<int>(heights.size());
  const std::vector<int> flags = interleave_flags(layout.num_sources, layout.num_sensors);

  std::vector<Eigen::Vector3d> centers;
  if (is_source) is_source->clear();
  int p = 0;
  for (int r = 0; r < nrings; ++r) {
    const int n_r = total / nrings + (r < total % nrings ? 1 : 0);
    // Successive rings are rotated by one patch-of-total step so that no
    // two rings have angularly aligned patches.
    const double offset = 2.0 * M_PI * r / total;
    for (int s = 0; s < n_r; ++s, ++p) {
      const double ang = 2.0 * M_PI * s / n_r + offset;
      centers.emplace_back(layout.cylinder_radius * std::cos(ang),
                           layout.cylinder_radius * std::sin(ang), heights[r]);
      if (is_source) is_source->push_back(flags[p]);
    }
  }
  return centers;
}

namespace {

// All cyclic permutations of (a, b, c) with every sign choice, deduplicated.
void add_cyclic_signed(std::vector<Eigen::Vector3d>& out, double a, double b, double c) {
  const double vals[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
  for (const auto& v : vals) {
    for (int s0 : {-1, 1}) {
      for (int s1 : {-1, 1}) {
        for (int s2 : {-1, 1}) {
          const Eigen::Vector3d p(s0 * v[0], s1 * v[1], s2 * v[2]);
          bool dup = false;
          for (const auto& q : out)
            if ((p - q).norm() < 1e-9) dup = true;
          if (!dup) out.push_back(p);
        }
      }
    }
  }
}

}  // namespace

std::vector<Eigen::Vector3d> ball_even_centers(const BallEvenLayout& layout,
                                               std::vector<int>* is_source) {
  if (layout.num_sources < 1 || layout.num_sensors < 1)
    throw ConfigError("ball layout: need at least one source and one sensor");
  std::vector<Eigen::Vector3d> centers;
  if (is_source) is_source->clear();

  if (layout.num_sources == 32 && layout.num_sensors == 60) {
    // Canonical arrangement: sensors on the vertices of a truncated
    // icosahedron, sources at its 12 pentagon and 20 hexagon face centers.
    // Each source's own face vertices are its nearest sensors (five for a
    // pentagon, six for a hexagon), well separated from the rest.
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> raw;
    add_cyclic_signed(raw, 0.0, 1.0, phi);          // pentagon centers
    add_cyclic_signed(raw, 1.0, 1.0, 1.0);          // hexagon centers...
    add_cyclic_signed(raw, 1.0 / phi, 0.0, phi);    // ...(dodecahedral set)
    std::vector<int> flags(raw.size(), 1);
    const std::size_t source_count = raw.size();
    add_cyclic_signed(raw, 0.0, 1.0, 3.0 * phi);    // vertices
    add_cyclic_signed(raw, 1.0, 2.0 + phi, 2.0 * phi);
    add_cyclic_signed(raw, phi, 2.0, 2.0 * phi + 1.0);
    flags.resize(raw.size(), 0);
    if (source_count != 32 || raw.size() != 92)
      throw NumericalError("ball layout: truncated icosahedron construction failed");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      centers.push_back(layout.ball_radius * raw[i].normalized());
      if (is_source) is_source->push_back(flags[i]);
    }
    return centers;
  }

  // General counts: interleaved Fibonacci lattice.
  const int total = layout.num_sources + layout.num_sensors;
  const std::vector<int> flags = interleave_flags(layout.num_sources, layout.num_sensors);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < total; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / total;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ang = golden * i;
    centers.emplace_back(layout.ball_radius * rho * std::cos(ang),
                         layout.ball_radius * rho * std::sin(ang),
                         layout.ball_radius * z);
    if (is_source) is_source->push_back(flags[i]);
  }
  return centers;
}

PatchSet define_patches_cylinder(const Mesh& mesh, const CylinderRingLayout& layout) {
  std::vector<int> is_source;
  const auto centers = cylinder_ring_centers(layout, &is_source);
  const auto hash = hash_layout("cylinder_rings", layout.num_sources,
                                layout.num_sensors, layout.patch_radius, centers);
  return patches_from_centers(mesh, centers, is_source, layout.patch_radius, hash);
}

PatchSet define_patches_ball(const Mesh& mesh, const BallEvenLayout& layout) {
  std::vector<int> is_source;
  const auto centers = ball_even_centers(layout, &is_source);
  const auto hash = hash_layout("ball_even", layout.num_sources, layout.num_sensors,
                                layout.patch_radius, centers);
  return patches_from_centers(mesh, centers, is_source, layout.patch_radius, hash);
}

PatchSet define_patches_explicit(const Mesh& mesh,
                                 const std::vector<std::vector<int>>& sources,
                                 const std::vector<std::vector<int>>& sensors) {
  PatchSet ps;
  const auto& fg = mesh.facet_geometry();
  std::set<int> used;
  std::set<int> dirichlet;
  auto add = [&](const std::vector<int>& facets, bool source) {
    if (facets.empty())
      throw ConfigError("define_patches: explicit patch with no facets");
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    double area = 0.0;
    for (int f : facets) {
      if (f < 0 || f >= static_cast<int>(mesh.boundary_facets.size()))
        throw ConfigError("define_patches: facet index out of range");
      if (!used.insert(f).second)
        throw ConfigError("define_patches: patches overlap on facet " +
                          std::to_string(f));
      c += fg[f].area * fg[f].centroid;
      area += fg[f].area;
      for (int v : mesh.boundary_facets[f]) dirichlet.insert(v);
    }
    if (source) {
      ps.sources.push_back(facets);
      ps.source_centers.push_back(c / area);
    } else {
      ps.sensors.push_back(facets);
      ps.sensor_centers.push_back(c / area);
    }
  };
  for (const auto& f : sources) add(f, true);
  for (const auto& f : sensors) add(f, false);
  ps.dirichlet_nodes.assign(dirichlet.begin(), dirichlet.end());

  std::vector<Eigen::Vector3d> centers = ps.source_centers;
  centers.insert(centers.end(), ps.sensor_centers.begin(), ps.sensor_centers.end());
  ps.layout_hash = hash_layout("explicit", static_cast<int>(sources.size()),
                               static_cast<int>(sensors.size()), 0.0, centers);
  return ps;
}

MeshDiagnostics validate(const Mesh& mesh, const PatchSet* patches) {
  // Report-only and self-contained: recomputes geometry so that it can also
  // describe meshes that would fail finalize().
  MeshDiagnostics d;
  bool first = true;
  for (const auto& t : mesh.tets) {
    const double v = tet_signed_volume(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                       mesh.vertices[t[2]], mesh.vertices[t[3]]);
    if (first) {
      d.min_tet_volume = d.max_tet_volume = v;
      first = false;
    }
    d.min_tet_volume = std::min(d.min_tet_volume, v);
    d.max_tet_volume = std::max(d.max_tet_volume, v);
    if (!(v > 0.0)) ++d.nonpositive_tets;
  }

  // Outward check: the owning tet's centroid must be behind each facet.
  std::map<std::array<int, 3>, Eigen::Vector3d> tet_centroid_of_face;
  for (const auto& t : mesh.tets) {
    Eigen::Vector3d c = (mesh.vertices[t[0]] + mesh.vertices[t[1]] +
                         mesh.vertices[t[2]] + mesh.vertices[t[3]]) /
                        4.0;
    static const int face_of[4][3] = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    for (const auto& fo : face_of) {
      std::array<int, 3> key = {t[fo[0]], t[fo[1]], t[fo[2]]};
      std::sort(key.begin(), key.end());
      tet_centroid_of_face[key] = c;
    }
  }
  Eigen::Vector3d closure = Eigen::Vector3d::Zero();
  double total_area = 0.0;
  for (const auto& facet : mesh.boundary_facets) {
    const Eigen::Vector3d& a = mesh.vertices[facet[0]];
    const Eigen::Vector3d n =
        (mesh.vertices[facet[1]] - a).cross(mesh.vertices[facet[2]] - a);
    const double area = 0.5 * n.norm();
    const Eigen::Vector3d centroid =
        (a + mesh.vertices[facet[1]] + mesh.vertices[facet[2]]) / 3.0;
    std::array<int, 3> key = facet;
    std::sort(key.begin(), key.end());
    auto it = tet_centroid_of_face.find(key);
    if (it != tet_centroid_of_face.end() && n.dot(centroid - it->second) < 0.0)
      ++d.inward_facets;
    closure += 0.5 * n;
    total_area += area;
  }
  d.boundary_closure = closure.norm() / std::max(1e-300, total_area);

  if (patches) {
    std::set<int> used;
    for (const auto& list : patches->sources)
      for (int f : list) d.patches_disjoint &= used.insert(f).second;
    for (const auto& list : patches->sensors)
      for (int f : list) d.patches_disjoint &= used.insert(f).second;
    d.dirichlet_count = static_cast<int>(patches->dirichlet_nodes.size());
  }
  return d;
}

std::string MeshDiagnostics::summary() const {
  std::ostringstream os;
  os << "tet volume [" << min_tet_volume << ", " << max_tet_volume << "]"
     << ", nonpositive tets: " << nonpositive_tets
     << ", inward facets: " << inward_facets
     << ", boundary closure: " << boundary_closure
     << ", patches disjoint: " << (patches_disjoint ? "yes" : "no")
     << ", |S|: " << dirichlet_count;
  return os.str();
}

}  // namespace dotrecon
