#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "dotrecon/errors.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"

using namespace dotrecon;

namespace {

// Unit tetrahedron on the coordinate axes.
Mesh unit_tet() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.tets = {{0, 1, 2, 3}};
  m.finalize();
  return m;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("unit tet mesh basics") {
  const Mesh m = unit_tet();
  CHECK(m.boundary_facets.size() == 4);
  CHECK(m.total_volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  const MeshDiagnostics d = validate(m);
  CHECK(d.min_tet_volume == doctest::Approx(1.0 / 6.0));
  CHECK(d.nonpositive_tets == 0);
  CHECK(d.inward_facets == 0);
}

TEST_CASE("validate flags an inverted tet") {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.tets = {{0, 2, 1, 3}};  // negative signed volume
  const MeshDiagnostics d = validate(m);
  CHECK(d.nonpositive_tets == 1);
  CHECK(d.min_tet_volume < 0.0);
  CHECK_THROWS_AS(m.finalize(), NumericalError);
}

TEST_CASE("cylinder volume within 2 percent of pi") {
  const Mesh m = generate_cylinder(1.0, 1.0, 0.1);
  CHECK(std::abs(m.total_volume() - M_PI) / M_PI < 0.02);
  // Boundary closure: sum of area-weighted outward normals vanishes.
  const MeshDiagnostics d = validate(m);
  CHECK(d.boundary_closure < 1e-10);
  CHECK(d.inward_facets == 0);
  CHECK(d.nonpositive_tets == 0);
}

TEST_CASE("ball volume within 2 percent of (4/3) pi r^3") {
  const Mesh m = generate_ball(10.0, 1.0);
  const double exact = 4.0 / 3.0 * M_PI * 1000.0;
  CHECK(std::abs(m.total_volume() - exact) / exact < 0.02);
  const MeshDiagnostics d = validate(m);
  CHECK(d.boundary_closure < 1e-10);
  CHECK(d.inward_facets == 0);
  CHECK(d.nonpositive_tets == 0);
}

TEST_CASE("huge h gives a coarse but valid mesh") {
  const Mesh m = generate_cylinder(1.0, 1.0, 10.0);
  const MeshDiagnostics d = validate(m);
  CHECK(d.nonpositive_tets == 0);
  CHECK(m.total_volume() > 0.0);
  CHECK_THROWS_AS(generate_cylinder(1.0, 1.0, -1.0), ConfigError);
}

TEST_CASE("msh round trip preserves vertices and tets") {
  const Mesh m = generate_cylinder(1.0, 1.0, 0.35);
  const std::string path = temp_path("dotrecon_roundtrip.msh");
  write_msh(m, path);
  const Mesh r = load_msh(path);
  REQUIRE(r.vertices.size() == m.vertices.size());
  REQUIRE(r.tets.size() == m.tets.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    CHECK((r.vertices[i] - m.vertices[i]).norm() == 0.0);
  for (std::size_t i = 0; i < m.tets.size(); ++i) CHECK(r.tets[i] == m.tets[i]);
  CHECK(r.reference_hash() == m.reference_hash());
  std::remove(path.c_str());
}

TEST_CASE("msh loader on a single tet file") {
  const std::string path = temp_path("dotrecon_single.msh");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs(
        "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
        "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
        "$Elements\n1\n1 4 2 0 0 1 2 3 4\n$EndElements\n",
        f);
    std::fclose(f);
  }
  const Mesh m = load_msh(path);
  CHECK(m.node_count() == 4);
  CHECK(m.boundary_facets.size() == 4);
  CHECK(m.total_volume() == doctest::Approx(1.0 / 6.0));
  std::remove(path.c_str());
}

TEST_CASE("msh loader rejects bad node references and element types") {
  const std::string path = temp_path("dotrecon_bad.msh");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs(
        "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
        "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
        "$Elements\n1\n1 4 2 0 0 0 2 3 4\n$EndElements\n",
        f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_msh(path), IoError);
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs(
        "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
        "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
        "$Elements\n1\n1 5 2 0 0 1 2 3 4\n$EndElements\n",
        f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_msh(path), IoError);
  std::remove(path.c_str());
}

TEST_CASE("cylinder ring layout: disjoint patches, nonempty S") {
  const Mesh m = generate_cylinder(1.0, 1.0, 0.1);
  CylinderRingLayout layout;  // 24 + 24 in three rings
  const PatchSet ps = define_patches_cylinder(m, layout);
  CHECK(ps.source_count() == 24);
  CHECK(ps.sensor_count() == 24);
  CHECK(!ps.dirichlet_nodes.empty());
  const MeshDiagnostics d = validate(m, &ps);
  CHECK(d.patches_disjoint);
  CHECK(d.dirichlet_count > 0);

  // Free node map is a bijection onto the complement of S.
  const FreeNodeMap fmap = build_free_node_map(m, ps.dirichlet_nodes);
  CHECK(fmap.count == m.node_count() - static_cast<int>(ps.dirichlet_nodes.size()));
  for (int f = 0; f < fmap.count; ++f)
    CHECK(fmap.node_to_free[fmap.free_to_node[f]] == f);
}

TEST_CASE("patch areas approximate pi r_p^2 on a fine mesh") {
  const Mesh m = generate_cylinder(1.0, 1.0, 0.05);
  CylinderRingLayout layout;
  const PatchSet ps = define_patches_cylinder(m, layout);
  const double target = M_PI * layout.patch_radius * layout.patch_radius;
  for (int k = 0; k < ps.source_count(); ++k)
    CHECK(std::abs(ps.source_area(m, k) - target) / target < 0.10);
  for (int j = 0; j < ps.sensor_count(); ++j)
    CHECK(std::abs(ps.sensor_area(m, j) - target) / target < 0.10);
}

TEST_CASE("explicit patches reject a shared facet") {
  const Mesh m = unit_tet();
  CHECK_THROWS_AS(define_patches_explicit(m, {{0}}, {{0}}), ConfigError);
  const PatchSet ps = define_patches_explicit(m, {{0}}, {{1}});
  CHECK(ps.source_count() == 1);
  CHECK(ps.sensor_count() == 1);
}

TEST_CASE("ball layout produces the requested patch counts") {
  const Mesh m = generate_ball(10.0, 1.0);
  BallEvenLayout layout;  // 32 + 60
  const PatchSet ps = define_patches_ball(m, layout);
  CHECK(ps.source_count() == 32);
  CHECK(ps.sensor_count() == 60);
  const MeshDiagnostics d = validate(m, &ps);
  CHECK(d.patches_disjoint);
}
