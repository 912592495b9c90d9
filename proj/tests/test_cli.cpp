#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dotrecon/eval.hpp"
#include "dotrecon/io.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/phantom.hpp"

using namespace dotrecon;
namespace fs = std::filesystem;

namespace {

const char* cli = DOTRECON_CLI_PATH;

fs::path workdir() {
  const fs::path p = fs::temp_directory_path() / "dotrecon_cli_test";
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli pipeline: mesh-gen, simulate determinism, effective config") {
  const fs::path dir = workdir();
  const std::string mesh = (dir / "small.msh").string();
  CHECK(run("mesh-gen --set shape=cylinder --set h=0.16 --out " + mesh) == 0);
  CHECK(fs::exists(mesh));
  CHECK(fs::exists(mesh + ".effective.cfg"));

  const std::string sim_args =
      "simulate --mesh " + mesh +
      " --set K=6 --set J=6 --set patch_radius=0.15 --set d_mask=0.3"
      " --set phantom=case2 --set noise_rel=0.01 --seed 7 --out ";
  const std::string m1 = (dir / "m1.txt").string();
  const std::string m2 = (dir / "m2.txt").string();
  CHECK(run(sim_args + m1) == 0);
  CHECK(run(sim_args + m2) == 0);
  CHECK(slurp(m1) == slurp(m2));  // byte-identical for a fixed seed

  // Re-running from the recorded effective config reproduces the file.
  const std::string m3 = (dir / "m3.txt").string();
  CHECK(run("simulate --config " + m1 + ".effective.cfg --out " + m3) == 0);
  CHECK(slurp(m1) == slurp(m3));
}

TEST_CASE("cli error paths: exit codes and invalid input") {
  const fs::path dir = workdir();
  CHECK(run("no-such-command") == 2);
  CHECK(run("mesh-gen --set shape=dodecahedron --out x.msh") == 2);
  CHECK(run("mesh-gen --set shape=cylinder --set bogus_key=1 --out " +
            (dir / "y.msh").string()) == 2);
  CHECK(run("simulate --mesh /nonexistent.msh --out z.txt") == 4);
  CHECK(run("mesh-gen") == 2);  // missing out
}

TEST_CASE("cli reconstruct + export-vtk + evaluate on a tiny problem") {
  const fs::path dir = workdir();
  const std::string fine = (dir / "fine.msh").string();
  const std::string coarse = (dir / "coarse.msh").string();
  CHECK(run("mesh-gen --set shape=cylinder --set h=0.11 --out " + fine) == 0);
  CHECK(run("mesh-gen --set shape=cylinder --set h=0.16 --out " + coarse) == 0);

  const std::string layout =
      " --set K=8 --set J=8 --set patch_radius=0.13 --set d_mask=0.35";
  const std::string meas = (dir / "meas.txt").string();
  CHECK(run("simulate --mesh " + fine + layout +
            " --set phantom=case1_mu --set noise_rel=0.01 --seed 11 --out " + meas) ==
        0);

  const std::string sol = (dir / "sol.txt").string();
  CHECK(run("reconstruct --mesh " + coarse + layout + " --set data=" + meas +
            " --set tau=1.45 --set max_outer=12 --out " + sol) == 0);
  CHECK(fs::exists(sol));
  CHECK(fs::exists(sol + ".log"));

  // Convergence log: final outer residual at or below the target.
  double target = -1.0, last_outer = 1e300;
  {
    std::ifstream log(sol + ".log");
    std::string line;
    while (std::getline(log, line)) {
      if (line.rfind("# epsilon=", 0) == 0) {
        const auto pos = line.find("target=");
        target = std::stod(line.substr(pos + 7));
      } else if (line.rfind("outer ", 0) == 0) {
        std::istringstream ss(line);
        std::string word;
        int idx;
        double r;
        ss >> word >> idx >> word >> r;
        last_outer = r;
      }
    }
  }
  REQUIRE(target > 0.0);
  CHECK(last_outer <= target);

  const std::string vtk = (dir / "sol.vtk").string();
  CHECK(run("export-vtk --mesh " + coarse + " --set solution=" + sol + " --out " +
            vtk) == 0);
  Eigen::VectorXd kv, mv;
  read_vtk_fields(vtk, &kv, &mv);
  const Solution s = read_solution(sol);
  CHECK(kv.size() == s.kappa.size());

  const std::string report = (dir / "eval.txt").string();
  CHECK(run("evaluate --mesh " + coarse + " --set solution=" + sol +
            " --set phantom=case1_mu --out " + report) == 0);
  const std::string text = slurp(report);
  CHECK(text.find("mu.centroid_error") != std::string::npos);

  // Mesh mismatch is caught.
  CHECK(run("export-vtk --mesh " + fine + " --set solution=" + sol + " --out " +
            vtk) == 2);
}

TEST_CASE("evaluate: truth fed back gives zero errors, uniform gives not_detected") {
  const fs::path dir = workdir();
  const Mesh mesh = generate_cylinder(1.0, 1.0, 0.12);
  const Phantom truth = build_phantom(PhantomPreset::Case2, mesh);

  const EvalReport perfect = evaluate_fields(
      truth.kappa_field(mesh), truth.mu_field(mesh), truth.kappa_bg, truth.mu_bg,
      truth, mesh, 0.01, 0.1);
  CHECK(perfect.kappa.detected);
  CHECK(perfect.mu.detected);
  CHECK(perfect.kappa.centroid_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(perfect.mu.centroid_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(perfect.kappa.cross_talk == 0.0);
  CHECK(perfect.mu.cross_talk == 0.0);

  const EvalReport flat = evaluate_fields(
      Eigen::VectorXd::Constant(mesh.node_count(), truth.kappa_bg),
      Eigen::VectorXd::Constant(mesh.node_count(), truth.mu_bg), truth.kappa_bg,
      truth.mu_bg, truth, mesh, 0.01, 0.1);
  CHECK(!flat.kappa.detected);
  CHECK(!flat.mu.detected);
  CHECK(flat.to_text().find("not_detected") != std::string::npos);
  (void)dir;
}
