#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dotrecon/config.hpp"
#include "dotrecon/errors.hpp"
#include "dotrecon/io.hpp"
#include "dotrecon/measurement.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/util.hpp"

using namespace dotrecon;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

MeasurementSet sample_set(double omega) {
  MeasurementSet data;
  data.omega_over_c = omega;
  data.num_sources = 2;
  data.num_sensors = 3;
  data.layout_hash = 0xDEADBEEF12345678ull;
  data.sim_node_count = 321;
  data.mask.pairs = {{0, 0}, {0, 2}, {1, 1}};
  const int p = 3;
  const int n = omega == 0.0 ? p : 2 * p;
  data.values.resize(n);
  data.gamma_diag.resize(n);
  const CounterRng rng(17);
  for (int i = 0; i < n; ++i) {
    data.values[i] = rng.normal(i) * 1e-3;
    data.gamma_diag[i] = 1e-8 * (1.0 + rng.uniform(100 + i));
  }
  return data;
}

}  // namespace

TEST_CASE("measurement file round trip, modulated and unmodulated") {
  for (double omega : {0.0, 0.021}) {
    const MeasurementSet data = sample_set(omega);
    const std::string path = temp_path("dotrecon_meas.txt");
    write_measurements(data, path);
    const MeasurementSet back = read_measurements(path);
    CHECK(back.omega_over_c == data.omega_over_c);
    CHECK(back.num_sources == data.num_sources);
    CHECK(back.num_sensors == data.num_sensors);
    CHECK(back.layout_hash == data.layout_hash);
    CHECK(back.sim_node_count == data.sim_node_count);
    REQUIRE(back.mask.pairs == data.mask.pairs);
    CHECK((back.values - data.values).norm() == 0.0);
    CHECK((back.gamma_diag - data.gamma_diag).norm() <= 1e-22);
    std::remove(path.c_str());
  }
}

TEST_CASE("measurement reader rejects malformed input") {
  const std::string path = temp_path("dotrecon_meas_bad.txt");
  {
    std::ofstream out(path);
    out << "#omega_over_c=0\n#K=2 #J=3\n#layout_hash=0\n";
    out << "0 0 1.0 0 0 0\n";  // sigma_Re = 0 is invalid
  }
  CHECK_THROWS_AS(read_measurements(path), IoError);
  {
    std::ofstream out(path);
    out << "#K=2 #J=3\n#layout_hash=0\n0 0 1.0 0 1e-3 0\n";  // missing omega
  }
  CHECK_THROWS_AS(read_measurements(path), IoError);
  std::remove(path.c_str());
}

TEST_CASE("solution file round trip") {
  Solution s;
  s.mesh_hash = 0xABCDEF0011223344ull;
  s.kappa0 = 0.052;
  s.mu0 = 0.55;
  const CounterRng rng(4);
  s.kappa.resize(10);
  s.mu.resize(10);
  for (int i = 0; i < 10; ++i) {
    s.kappa[i] = 0.05 * std::exp(0.1 * rng.normal(i));
    s.mu[i] = 0.5 * std::exp(0.1 * rng.normal(50 + i));
  }
  const std::string path = temp_path("dotrecon_sol.txt");
  write_solution(s, path);
  const Solution back = read_solution(path);
  CHECK(back.mesh_hash == s.mesh_hash);
  CHECK(back.kappa0 == s.kappa0);
  CHECK(back.mu0 == s.mu0);
  CHECK((back.kappa - s.kappa).norm() == 0.0);
  CHECK((back.mu - s.mu).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("vtk export: single tet layout and 9-digit reload") {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.tets = {{0, 1, 2, 3}};
  m.finalize();
  Eigen::VectorXd kappa(4), mu(4);
  kappa << 0.05, 0.051234567891, 0.052, 0.0533;
  mu << 0.5, 0.512345678912, 0.52, 0.533;
  const std::string path = temp_path("dotrecon_tet.vtk");
  write_vtk(m, kappa, mu, path);

  // Structural check: 4 points, 1 cell of type 10, both scalar arrays.
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("POINTS 4 double") != std::string::npos);
  CHECK(text.find("CELLS 1 5") != std::string::npos);
  CHECK(text.find("CELL_TYPES 1\n10") != std::string::npos);
  CHECK(text.find("SCALARS absorption double 1") != std::string::npos);
  CHECK(text.find("SCALARS diffusivity double 1") != std::string::npos);

  Eigen::VectorXd kappa_back, mu_back;
  read_vtk_fields(path, &kappa_back, &mu_back);
  REQUIRE(kappa_back.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(kappa_back[i] == doctest::Approx(kappa[i]).epsilon(1e-9));
    CHECK(mu_back[i] == doctest::Approx(mu[i]).epsilon(1e-9));
  }

  // Constant fields export as identical values.
  write_vtk(m, Eigen::VectorXd::Constant(4, 0.05), Eigen::VectorXd::Constant(4, 0.5),
            path);
  read_vtk_fields(path, &kappa_back, &mu_back);
  CHECK(kappa_back.maxCoeff() == kappa_back.minCoeff());
  CHECK(mu_back.maxCoeff() == mu_back.minCoeff());
  std::remove(path.c_str());
}

TEST_CASE("config: parsing, overrides, unknown keys, bad values") {
  const std::string path = temp_path("dotrecon_cfg.txt");
  {
    std::ofstream out(path);
    out << "# a comment\n";
    out << "tau = 1.3\n";
    out << "mesh=some/path.msh\n";
    out << "ring_heights = 0.25, 0.5, 0.75\n";
    out << "typo_key = 5\n";
  }
  Config cfg = load_config_file(path);
  apply_override(cfg, "tau=1.6");
  CHECK(cfg.get_double("tau", 0.0) == 1.6);
  CHECK(cfg.get_string("mesh", "") == "some/path.msh");
  const std::vector<double> rh = cfg.get_double_list("ring_heights", {});
  REQUIRE(rh.size() == 3);
  CHECK(rh[1] == 0.5);
  CHECK_THROWS_AS(cfg.ensure_all_consumed(), ConfigError);  // typo_key unread
  CHECK(cfg.get_int("typo_key", 0) == 5);
  cfg.ensure_all_consumed();  // now everything is consumed

  apply_override(cfg, "tau=abc");
  CHECK_THROWS_AS(cfg.get_double("tau", 0.0), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "no_equals"), ConfigError);
  CHECK_THROWS_AS(cfg.require_string("absent"), ConfigError);
  std::remove(path.c_str());
}
