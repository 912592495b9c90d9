#include <cmath>

#include "doctest.h"
#include "dotrecon/errors.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"
#include "dotrecon/prior.hpp"
#include "dotrecon/util.hpp"

using namespace dotrecon;

namespace {

struct Setup {
  Mesh mesh;
  FreeNodeMap fmap;
};

Setup cylinder_setup(double h) {
  Setup s;
  s.mesh = generate_cylinder(1.0, 1.0, h);
  CylinderRingLayout layout;
  layout.num_sources = 4;
  layout.num_sensors = 4;
  layout.patch_radius = 0.18;
  const PatchSet ps = define_patches_cylinder(s.mesh, layout);
  s.fmap = build_free_node_map(s.mesh, ps.dirichlet_nodes);
  return s;
}

// Unit tet with node 0 as the Dirichlet set; linear fields through the
// origin are then representable exactly on the free nodes.
Setup unit_tet_setup() {
  Setup s;
  s.mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  s.mesh.tets = {{0, 1, 2, 3}};
  s.mesh.finalize();
  s.fmap = build_free_node_map(s.mesh, {0});
  return s;
}

Eigen::VectorXd random_field(int n, std::uint64_t seed, double scale) {
  const CounterRng rng(seed);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = scale * rng.normal(i);
  return u;
}

// Independent plain P1 stiffness on the free nodes (oracle for H(0)).
Eigen::SparseMatrix<double> plain_stiffness(const Mesh& mesh, const FreeNodeMap& fmap) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    const auto& g = mesh.element_geometry()[e].grads;
    const double vol = mesh.element_geometry()[e].volume;
    for (int m = 0; m < 4; ++m) {
      const int fm = fmap.node_to_free[t[m]];
      if (fm < 0) continue;
      for (int l = 0; l < 4; ++l) {
        const int fl = fmap.node_to_free[t[l]];
        if (fl < 0) continue;
        trips.emplace_back(fm, fl, 1.0 * vol * g.col(m).dot(g.col(l)));
      }
    }
  }
  Eigen::SparseMatrix<double> k(fmap.count, fmap.count);
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

}  // namespace

TEST_CASE("pm_r closed forms at t = 0 and t = T, FD derivative check") {
  const double T = 5e-3;
  const PmValue at0 = pm_r(0.0, T);
  CHECK(at0.r == 0.0);
  CHECK(at0.c == 1.0);
  CHECK(at0.r_prime == 0.0);

  const PmValue atT = pm_r(T, T);
  CHECK(atT.r == doctest::Approx(0.5 * T * T * std::log(2.0)).epsilon(1e-14));
  CHECK(atT.c == doctest::Approx(0.5).epsilon(1e-14));

  // r' against central differences of r over t in (0, 10T].
  for (int i = 1; i <= 20; ++i) {
    const double t = 10.0 * T * i / 20.0;
    const double dt = 1e-6 * T;
    const double fd = (pm_r(t + dt, T).r - pm_r(t - dt, T).r) / (2.0 * dt);
    CHECK(pm_r(t, T).r_prime == doctest::Approx(fd).epsilon(1e-8));
  }

  // c stays in (0, 1].
  for (double t : {0.0, 1e-4, 5e-3, 0.1, 10.0}) {
    CHECK(pm_r(t, T).c > 0.0);
    CHECK(pm_r(t, T).c <= 1.0);
  }
}

TEST_CASE("R functional: zero field, constant-gradient value, monotone scaling") {
  const double T = 0.1;
  const Setup s = unit_tet_setup();
  CHECK(evaluate_r_functional(s.mesh, s.fmap, Eigen::VectorXd::Zero(3), T) == 0.0);

  // u = x + y + z vanishes at the Dirichlet node, |grad u| = sqrt(3),
  // so R = V * r(sqrt(3)) with V = 1/6.
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(3);
  const double expected = (1.0 / 6.0) * pm_r(std::sqrt(3.0), T).r;
  CHECK(evaluate_r_functional(s.mesh, s.fmap, u, T) ==
        doctest::Approx(expected).epsilon(1e-13));

  const Setup c = cylinder_setup(0.3);
  const Eigen::VectorXd w = random_field(c.fmap.count, 11, 0.01);
  const double r1 = evaluate_r_functional(c.mesh, c.fmap, w, 5e-3);
  const double r2 = evaluate_r_functional(c.mesh, c.fmap, 2.0 * w, 5e-3);
  CHECK(r2 >= r1);
  CHECK(r1 > 0.0);
}

TEST_CASE("H(0) equals the plain reduced stiffness matrix exactly") {
  const Setup s = cylinder_setup(0.25);
  const Eigen::SparseMatrix<double> h =
      assemble_h(s.mesh, s.fmap, Eigen::VectorXd::Zero(s.fmap.count), 5e-3);
  const Eigen::SparseMatrix<double> k = plain_stiffness(s.mesh, s.fmap);
  CHECK((Eigen::MatrixXd(h) - Eigen::MatrixXd(k)).norm() == 0.0);
}

TEST_CASE("|grad u| = T on every tet halves the stiffness") {
  const double T = 5e-3;
  const Setup s = unit_tet_setup();
  // u = (T/sqrt(3)) (x+y+z): gradient norm T on the single tet.
  const Eigen::VectorXd u = (T / std::sqrt(3.0)) * Eigen::VectorXd::Ones(3);
  const Eigen::MatrixXd h = Eigen::MatrixXd(assemble_h(s.mesh, s.fmap, u, T));
  const Eigen::MatrixXd k = Eigen::MatrixXd(plain_stiffness(s.mesh, s.fmap));
  CHECK((h - 0.5 * k).norm() <= 1e-12 * k.norm());
}

TEST_CASE("gradient identity: H(u) u matches finite differences of R") {
  const Setup s = cylinder_setup(0.3);
  const double T = 5e-3;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Eigen::VectorXd u = random_field(s.fmap.count, seed, 2e-3);
    const Eigen::SparseMatrix<double> h = assemble_h(s.mesh, s.fmap, u, T);
    const Eigen::VectorXd grad = h * u;
    const Eigen::VectorXd d = random_field(s.fmap.count, seed + 100, 1.0);
    const double step = 1e-7;
    const double fd = (evaluate_r_functional(s.mesh, s.fmap, u + step * d, T) -
                       evaluate_r_functional(s.mesh, s.fmap, u - step * d, T)) /
                      (2.0 * step);
    CHECK(grad.dot(d) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("prior matrix: SPD, blocks, ratio scaling, solve round-trip") {
  Setup s = cylinder_setup(0.42);
  REQUIRE(s.mesh.node_count() <= 300);
  PriorConfig config;
  const Eigen::VectorXd sigma = random_field(s.fmap.count, 7, 1e-3);
  const Eigen::VectorXd upsilon = random_field(s.fmap.count, 8, 1e-3);
  const PriorMatrix prior(s.mesh, s.fmap, sigma, upsilon, config);

  // Smallest eigenvalue > 0 via a dense symmetric eigensolver.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Eigen::MatrixXd(prior.sigma_block()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // beta = 0, b/a = 1: both blocks equal the plain reduced stiffness.
  PriorConfig unit;
  unit.ratio_b_over_a = 1.0;
  const PriorMatrix p0(s.mesh, s.fmap, Eigen::VectorXd::Zero(s.fmap.count),
                       Eigen::VectorXd::Zero(s.fmap.count), unit);
  const Eigen::MatrixXd k = Eigen::MatrixXd(plain_stiffness(s.mesh, s.fmap));
  CHECK((Eigen::MatrixXd(p0.sigma_block()) - k).norm() == 0.0);
  CHECK((Eigen::MatrixXd(p0.upsilon_block_unscaled()) - k).norm() == 0.0);

  // Solve round-trip H^{-1}(H x) = x.
  const Eigen::VectorXd x = random_field(2 * s.fmap.count, 9, 1.0);
  const Eigen::VectorXd round = prior.solve(prior.apply(x));
  CHECK((round - x).norm() <= 1e-10 * x.norm());

  // Scaling b/a scales only the upsilon block of the operator.
  PriorConfig scaled = config;
  scaled.ratio_b_over_a = 3.0 * config.ratio_b_over_a;
  const PriorMatrix p3(s.mesh, s.fmap, sigma, upsilon, scaled);
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(2 * s.fmap.count);
  xs.head(s.fmap.count) = x.head(s.fmap.count);
  CHECK((p3.apply(xs) - prior.apply(xs)).norm() == 0.0);
  Eigen::VectorXd xu = Eigen::VectorXd::Zero(2 * s.fmap.count);
  xu.tail(s.fmap.count) = x.tail(s.fmap.count);
  CHECK((p3.apply(xu) - 3.0 * prior.apply(xu)).norm() <=
        1e-14 * prior.apply(xu).norm());

  // Loewner order: x^T H(u) x <= x^T H(0) x.
  const Eigen::SparseMatrix<double> hu = assemble_h(s.mesh, s.fmap, sigma, 5e-3);
  const Eigen::SparseMatrix<double> h0 = plain_stiffness(s.mesh, s.fmap);
  for (std::uint64_t seed : {21, 22, 23}) {
    const Eigen::VectorXd y = random_field(s.fmap.count, seed, 1.0);
    CHECK(y.dot(hu * y) <= y.dot(h0 * y) * (1.0 + 1e-12));
  }

  // Empty Dirichlet set is rejected (H would be singular).
  const FreeNodeMap all = build_free_node_map(s.mesh, {});
  CHECK_THROWS_AS(assemble_h(s.mesh, all, Eigen::VectorXd::Zero(all.count), 5e-3),
                  NumericalError);
}
