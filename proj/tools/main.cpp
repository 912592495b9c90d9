#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dotrecon/config.hpp"
#include "dotrecon/errors.hpp"
#include "dotrecon/eval.hpp"
#include "dotrecon/io.hpp"
#include "dotrecon/measurement.hpp"
#include "dotrecon/mesh.hpp"
#include "dotrecon/patches.hpp"
#include "dotrecon/phantom.hpp"
#include "dotrecon/recon.hpp"

namespace {

using namespace dotrecon;

constexpr const char* kUsage = R"(usage: dotrecon <command> [options]

commands:
  mesh-gen     generate a primitive mesh and write it as Gmsh MSH 2.2
  simulate     forward-simulate noisy boundary measurements for a phantom
  reconstruct  recover absorption and diffusivity from a measurement file
  export-vtk   write a solution as a VTK legacy unstructured grid
  evaluate     score a solution against a known phantom

options:
  --config PATH   read key=value settings from PATH
  --set key=value override a setting (repeatable)
  --mesh PATH     shorthand for --set mesh=PATH
  --out PATH      shorthand for --set out=PATH
  --seed N        shorthand for --set seed=N

Every run writes '<out>.effective.cfg' with the resolved settings; re-running
the same command with '--config' on that file reproduces the run.
)";

Mesh load_mesh_key(Config& cfg, const std::string& key) {
  return load_msh(cfg.require_string(key));
}

// Patch layout shared by simulate and reconstruct; must match between the
// two (the layout hash in the measurement file is checked downstream).
PatchSet build_layout(Config& cfg, const Mesh& mesh, double* d_mask_out) {
  const std::string layout = cfg.get_string("layout", "cylinder_rings");
  if (layout == "cylinder_rings") {
    CylinderRingLayout l;
    l.num_sources = static_cast<int>(cfg.get_int("K", l.num_sources));
    l.num_sensors = static_cast<int>(cfg.get_int("J", l.num_sensors));
    l.cylinder_radius = cfg.get_double("domain_radius", l.cylinder_radius);
    l.cylinder_height = cfg.get_double("domain_height", l.cylinder_height);
    l.patch_radius = cfg.get_double("patch_radius", 0.1 * l.cylinder_radius);
    l.ring_heights = cfg.get_double_list("ring_heights", {});
    const double d_mask =
        cfg.get_double("d_mask", kCylinderMaskDistance * l.cylinder_radius);
    if (d_mask_out) *d_mask_out = d_mask;
    return define_patches_cylinder(mesh, l);
  }
  if (layout == "ball_even") {
    BallEvenLayout l;
    l.num_sources = static_cast<int>(cfg.get_int("K", l.num_sources));
    l.num_sensors = static_cast<int>(cfg.get_int("J", l.num_sensors));
    l.ball_radius = cfg.get_double("domain_radius", l.ball_radius);
    l.patch_radius = cfg.get_double("patch_radius", 0.1 * l.ball_radius);
    const double d_mask = cfg.get_double("d_mask", ball_mask_distance(l));
    if (d_mask_out) *d_mask_out = d_mask;
    return define_patches_ball(mesh, l);
  }
  throw ConfigError("unknown layout '" + layout + "' (cylinder_rings | ball_even)");
}

int cmd_mesh_gen(Config& cfg) {
  const std::string shape = cfg.get_string("shape", "cylinder");
  const std::string out = cfg.require_string("out");
  Mesh mesh;
  if (shape == "cylinder") {
    mesh = generate_cylinder(cfg.get_double("radius", 1.0), cfg.get_double("height", 1.0),
                             cfg.get_double("h", 0.1));
  } else if (shape == "ball") {
    mesh = generate_ball(cfg.get_double("radius", 10.0), cfg.get_double("h", 1.0));
  } else {
    throw ConfigError("unknown shape '" + shape + "' (cylinder | ball)");
  }
  cfg.ensure_all_consumed();
  write_msh(mesh, out);
  const MeshDiagnostics diag = validate(mesh);
  std::cout << "wrote " << out << ": " << mesh.node_count() << " nodes, "
            << mesh.tet_count() << " tets; " << diag.summary() << "\n";
  return 0;
}

int cmd_simulate(Config& cfg) {
  const Mesh mesh = load_mesh_key(cfg, "mesh");
  const std::string out = cfg.require_string("out");
  SimOptions opts;
  const PatchSet patches = build_layout(cfg, mesh, &opts.d_mask);
  const Phantom phantom =
      build_phantom(phantom_preset_from_string(cfg.get_string("phantom", "case2")), mesh);
  opts.omega_over_c = cfg.get_double("omega_over_c", 0.0);
  opts.noise_rel = cfg.get_double("noise_rel", 0.01);
  opts.seed = cfg.get_u64("seed", 0);
  cfg.ensure_all_consumed();

  const MeasurementSet data = simulate_measurements(mesh, phantom, patches, opts);
  write_measurements(data, out);
  std::cout << "wrote " << out << ": " << data.mask.pair_count()
            << " retained pairs, " << data.entry_count() << " real entries\n";
  return 0;
}

int cmd_reconstruct(Config& cfg) {
  const Mesh mesh = load_mesh_key(cfg, "mesh");
  const MeasurementSet data = read_measurements(cfg.require_string("data"));
  const std::string out = cfg.require_string("out");
  const std::string log_path = cfg.get_string("log", out + ".log");
  const PatchSet patches = build_layout(cfg, mesh, nullptr);

  ReconConfig rc;
  rc.prior.edge_threshold = cfg.get_double("T", rc.prior.edge_threshold);
  rc.prior.ratio_b_over_a = cfg.get_double("b_over_a", rc.prior.ratio_b_over_a);
  rc.tau = cfg.get_double("tau", rc.tau);
  rc.max_outer = static_cast<int>(cfg.get_int("max_outer", rc.max_outer));
  rc.lsqr_max_iter = static_cast<int>(cfg.get_int("lsqr_max_iter", rc.lsqr_max_iter));

  Mesh background_mesh;
  const Mesh* bg_mesh_ptr = nullptr;
  PatchSet background_patches;
  const PatchSet* bg_patches_ptr = nullptr;
  if (cfg.has("background_mesh")) {
    background_mesh = load_msh(cfg.require_string("background_mesh"));
    Config layout_cfg = cfg;  // reuse the layout keys on the coarse mesh
    background_patches = build_layout(layout_cfg, background_mesh, nullptr);
    bg_mesh_ptr = &background_mesh;
    bg_patches_ptr = &background_patches;
  }
  cfg.ensure_all_consumed();

  const ReconResult result =
      reconstruct(data, mesh, patches, rc, bg_mesh_ptr, bg_patches_ptr);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  Solution solution;
  solution.mesh_hash = mesh.reference_hash();
  solution.kappa0 = result.background.kappa0;
  solution.mu0 = result.background.mu0;
  solution.kappa = result.kappa_field;
  solution.mu = result.mu_field;
  write_solution(solution, out);

  std::ofstream log(log_path);
  if (!log) throw IoError("cannot write convergence log '" + log_path + "'");
  log.precision(12);
  log << "# epsilon=" << result.epsilon << " tau=" << result.tau
      << " target=" << result.tau * result.epsilon << "\n";
  log << "outer 0 residual " << result.initial_residual << "\n";
  for (std::size_t l = 0; l < result.outer_residuals.size(); ++l)
    log << "outer " << l + 1 << " residual " << result.outer_residuals[l] << "\n";
  for (std::size_t l = 0; l < result.lsqr_histories.size(); ++l) {
    const auto& trace = result.lsqr_histories[l];
    for (std::size_t m = 0; m < trace.residuals.size(); ++m)
      log << "lsqr " << l << ' ' << m << " residual " << trace.residuals[m] << "\n";
  }

  std::cout << "wrote " << out << " (kappa0=" << result.background.kappa0
            << ", mu0=" << result.background.mu0 << ", "
            << result.outer_residuals.size() << " linearizations, "
            << (result.converged ? "converged" : "NOT converged") << ")\n";
  if (!result.converged) return 3;
  return 0;
}

int cmd_export_vtk(Config& cfg) {
  const Mesh mesh = load_mesh_key(cfg, "mesh");
  const Solution solution = read_solution(cfg.require_string("solution"));
  const std::string out = cfg.require_string("out");
  cfg.ensure_all_consumed();
  if (solution.mesh_hash != mesh.reference_hash())
    throw ConfigError("export-vtk: solution was computed on a different mesh");
  write_vtk(mesh, solution.kappa, solution.mu, out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_evaluate(Config& cfg) {
  const Mesh mesh = load_mesh_key(cfg, "mesh");
  const Solution solution = read_solution(cfg.require_string("solution"));
  const std::string out = cfg.require_string("out");
  const Phantom truth =
      build_phantom(phantom_preset_from_string(cfg.require_string("phantom")), mesh);
  const double band_kappa = cfg.get_double("band_kappa", 0.01);
  const double band_mu = cfg.get_double("band_mu", 0.1);
  cfg.ensure_all_consumed();
  if (solution.mesh_hash != mesh.reference_hash())
    throw ConfigError("evaluate: solution was computed on a different mesh");

  const EvalReport report =
      evaluate_fields(solution.kappa, solution.mu, solution.kappa0, solution.mu0,
                      truth, mesh, band_kappa, band_mu);
  std::ofstream fout(out);
  if (!fout) throw IoError("cannot write report '" + out + "'");
  fout << report.to_text();
  std::cout << report.to_text();
  return 0;
}

int run(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  const std::string command = argv[1];
  if (command == "-h" || command == "--help" || command == "help") {
    std::cout << kUsage;
    return 0;
  }

  Config cfg;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) throw ConfigError("flag " + arg + " expects a value");
      return argv[++i];
    };
    if (arg == "--config") {
      const Config file_cfg = load_config_file(value());
      for (const auto& [k, v] : file_cfg.entries()) cfg.set(k, v);
    } else if (arg == "--set") {
      apply_override(cfg, value());
    } else if (arg == "--mesh") {
      cfg.set("mesh", value());
    } else if (arg == "--out") {
      cfg.set("out", value());
    } else if (arg == "--seed") {
      cfg.set("seed", value());
    } else {
      throw ConfigError("unknown flag '" + arg + "'");
    }
  }
  // A recorded command key (from an effective config) must match.
  const std::string recorded = cfg.get_string("command", command);
  if (recorded != command)
    throw ConfigError("config was recorded for command '" + recorded + "'");

  int rc;
  if (command == "mesh-gen")
    rc = cmd_mesh_gen(cfg);
  else if (command == "simulate")
    rc = cmd_simulate(cfg);
  else if (command == "reconstruct")
    rc = cmd_reconstruct(cfg);
  else if (command == "export-vtk")
    rc = cmd_export_vtk(cfg);
  else if (command == "evaluate")
    rc = cmd_evaluate(cfg);
  else
    throw ConfigError("unknown command '" + command + "'");

  if (cfg.has("out")) {
    Config snapshot = cfg;
    write_effective_config(snapshot, command,
                           snapshot.get_string("out", "") + ".effective.cfg");
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dotrecon::ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  } catch (const dotrecon::IoError& e) {
    std::cerr << "error[io]: " << e.what() << "\n";
    return 4;
  } catch (const dotrecon::NumericalError& e) {
    std::cerr << "error[numerical]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error[numerical]: " << e.what() << "\n";
    return 3;
  }
}
