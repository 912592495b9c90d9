#include "dotrecon/recon.hpp"

#include <algorithm>
#include <cmath>

#include "dotrecon/errors.hpp"
#include "dotrecon/forward.hpp"

namespace dotrecon {

void ReconConfig::validate() const {
  if (!(tau >= 1.0)) throw ConfigError("recon: fudge factor tau must be >= 1");
  if (max_outer < 1) throw ConfigError("recon: max_outer must be >= 1");
  if (lsqr_max_iter < 1) throw ConfigError("recon: lsqr_max_iter must be >= 1");
  if (!(prior.edge_threshold > 0.0)) throw ConfigError("recon: T must be positive");
  if (!(prior.ratio_b_over_a > 0.0)) throw ConfigError("recon: b/a must be positive");
}

double morozov_level(const MeasurementSet& data) {
  return std::sqrt(static_cast<double>(data.values.size()));
}

namespace {

double whitened_misfit(const MeasurementSet& data, const Eigen::VectorXd& model) {
  if (model.size() != data.values.size())
    throw NumericalError("whitened misfit: stacked length mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    const double r = data.values[i] - model[i];
    acc += r * r / data.gamma_diag[i];
  }
  return std::sqrt(acc);
}

void check_layout(const MeasurementSet& data, const PatchSet& patches) {
  if (data.num_sources != patches.source_count() ||
      data.num_sensors != patches.sensor_count())
    throw ConfigError("recon: measurement layout (K, J) does not match patches");
  if (data.layout_hash != 0 && patches.layout_hash != 0 &&
      data.layout_hash != patches.layout_hash)
    throw ConfigError("recon: measurement layout hash does not match patches");
}

// Whitened misfit of the homogeneous model at constant (kappa, mu).
double homogeneous_misfit(const MeasurementSet& data, const Mesh& mesh,
                          const PatchSet& patches, double kappa, double mu) {
  CoefficientField coeff;
  coeff.kappa.setConstant(mesh.node_count(), kappa);
  coeff.mu.setConstant(mesh.node_count(), mu);
  coeff.omega_over_c = data.omega_over_c;
  const ForwardSolver solver(mesh, coeff);
  const ForwardFields fields = solve_fields(solver, mesh, patches, /*with_duals=*/false);
  const Eigen::MatrixXcd meas = compute_measurements(fields, mesh, patches);
  return whitened_misfit(data, stack_measurements(meas, data.mask, data.omega_over_c));
}

}  // namespace

BackgroundEstimate estimate_background(const MeasurementSet& data, const Mesh& mesh,
                                       const PatchSet& patches,
                                       const ReconConfig& config) {
  check_layout(data, patches);
  BackgroundEstimate best;
  int evals = 0;
  auto objective = [&](double log10_kappa, double log10_mu) {
    ++evals;
    return homogeneous_misfit(data, mesh, patches, std::pow(10.0, log10_kappa),
                              std::pow(10.0, log10_mu));
  };

  // Coarse log-grid seed.
  const int g = std::max(2, config.background_grid);
  const double lo = -2.5, hi = 0.5;
  double bx = 0.0, by = 0.0, bf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double x = lo + (hi - lo) * i / (g - 1);
      const double y = lo + (hi - lo) * j / (g - 1);
      const double f = objective(x, y);
      if (f < bf) {
        bf = f;
        bx = x;
        by = y;
      }
    }
  }

  // Nelder-Mead in log10 coordinates.
  struct Vertex {
    double x, y, f;
  };
  std::array<Vertex, 3> simplex = {Vertex{bx, by, bf},
                                   Vertex{bx + 0.25, by, objective(bx + 0.25, by)},
                                   Vertex{bx, by + 0.25, objective(bx, by + 0.25)}};
  bool budget_ok = true;
  while (true) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const double diam = std::max(std::hypot(simplex[1].x - simplex[0].x,
                                            simplex[1].y - simplex[0].y),
                                 std::hypot(simplex[2].x - simplex[0].x,
                                            simplex[2].y - simplex[0].y));
    if (diam < 1e-4) break;
    if (evals >= config.background_max_evals) {
      budget_ok = false;
      break;
    }
    const double cx = 0.5 * (simplex[0].x + simplex[1].x);
    const double cy = 0.5 * (simplex[0].y + simplex[1].y);
    auto eval_at = [&](double t) {
      Vertex v;
      v.x = cx + t * (simplex[2].x - cx);
      v.y = cy + t * (simplex[2].y - cy);
      v.f = objective(v.x, v.y);
      return v;
    };
    Vertex refl = eval_at(-1.0);
    if (refl.f < simplex[0].f) {
      Vertex exp = eval_at(-2.0);
      simplex[2] = exp.f < refl.f ? exp : refl;
    } else if (refl.f < simplex[1].f) {
      simplex[2] = refl;
    } else {
      Vertex contr = eval_at(refl.f < simplex[2].f ? -0.5 : 0.5);
      if (contr.f < std::min(refl.f, simplex[2].f)) {
        simplex[2] = contr;
      } else {
        // Shrink toward the best vertex.
        for (int i = 1; i < 3; ++i) {
          simplex[i].x = 0.5 * (simplex[i].x + simplex[0].x);
          simplex[i].y = 0.5 * (simplex[i].y + simplex[0].y);
          simplex[i].f = objective(simplex[i].x, simplex[i].y);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  best.kappa0 = std::pow(10.0, simplex[0].x);
  best.mu0 = std::pow(10.0, simplex[0].y);
  best.misfit = simplex[0].f;
  best.evaluations = evals;
  best.converged = budget_ok;
  return best;
}

ReconResult reconstruct(const MeasurementSet& data, const Mesh& mesh,
                        const PatchSet& patches, const ReconConfig& config,
                        const Mesh* background_mesh,
                        const PatchSet* background_patches) {
  config.validate();
  check_layout(data, patches);
  if ((background_mesh == nullptr) != (background_patches == nullptr))
    throw ConfigError("recon: background mesh and patches must be given together");

  ReconResult result;
  result.tau = config.tau;
  result.epsilon = morozov_level(data);
  const double target = config.tau * result.epsilon;

  if (data.sim_node_count > 0 &&
      static_cast<double>(data.sim_node_count) < 1.5 * mesh.node_count())
    result.warnings.push_back(
        "inverse-crime guard: simulation mesh (" + std::to_string(data.sim_node_count) +
        " nodes) is not 1.5x finer than the reconstruction mesh (" +
        std::to_string(mesh.node_count()) + " nodes)");

  result.background = estimate_background(
      data, background_mesh ? *background_mesh : mesh,
      background_patches ? *background_patches : patches, config);
  if (!result.background.converged)
    result.warnings.push_back("background estimation hit its evaluation budget");

  const FreeNodeMap fmap = build_free_node_map(mesh, patches.dirichlet_nodes);
  LogParams params =
      LogParams::zero(fmap.count, result.background.kappa0, result.background.mu0);

  struct State {
    CoefficientField coeff;
    ForwardSolver solver;
    ForwardFields fields;  // phi only until duals are needed
    Eigen::VectorXd model;
    double residual;
  };
  auto evaluate = [&](const LogParams& p) {
    CoefficientField coeff =
        coefficients_from_params(mesh, fmap, p, data.omega_over_c);
    ForwardSolver solver(mesh, coeff);
    ForwardFields fields = solve_fields(solver, mesh, patches, /*with_duals=*/false);
    Eigen::VectorXd model = stack_measurements(
        compute_measurements(fields, mesh, patches), data.mask, data.omega_over_c);
    const double residual = whitened_misfit(data, model);
    return State{std::move(coeff), std::move(solver), std::move(fields),
                 std::move(model), residual};
  };

  State state = evaluate(params);
  result.initial_residual = state.residual;

  LogParams best_params = params;
  double best_residual = state.residual;

  const int rows_per_block = data.mask.pair_count();
  const bool modulated = data.omega_over_c != 0.0;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    // Duals for the adjoint Jacobian at the current iterate.
    state.fields.psi.clear();
    state.fields.psi.reserve(patches.sensors.size());
    for (int j = 0; j < patches.sensor_count(); ++j)
      state.fields.psi.push_back(state.solver.solve(sensor_load(mesh, patches, j)));

    const RealJacobian jac = measurement_jacobian_from_fields(
        mesh, patches, fmap, state.coeff, state.fields, data.mask);
    // Row slice matching the stacked data layout: Re block only at omega = 0.
    const Eigen::MatrixXd jac_rows =
        modulated ? jac.mat : jac.mat.topRows(rows_per_block);

    const Eigen::VectorXd beta = params.stacked();
    const Eigen::VectorXd y =
        data.values - state.model + jac_rows * beta;

    LinearizedSystem sys;
    whiten(jac_rows, y, data.gamma_diag, &sys.a, &sys.y_tilde);
    const PriorMatrix prior(mesh, fmap, params.sigma, params.upsilon, config.prior);
    sys.prior = &prior;

    const LsqrResult inner = priorconditioned_lsqr(sys, target, config.lsqr_max_iter);
    LsqrTrace trace;
    trace.residuals = inner.residual_history;
    trace.iterations = inner.iterations;
    trace.stopped_by = inner.stopped_by;
    result.lsqr_histories.push_back(std::move(trace));

    params.set_stacked(inner.beta);
    state = evaluate(params);
    result.outer_residuals.push_back(state.residual);

    if (state.residual < best_residual) {
      best_residual = state.residual;
      best_params = params;
    }
    if (state.residual <= target) {
      result.converged = true;
      break;
    }
  }

  if (!result.converged) {
    params = best_params;
    result.warnings.push_back("outer loop stopped at max_outer without reaching tau*eps");
  }
  result.params = params;
  const CoefficientField final_coeff =
      coefficients_from_params(mesh, fmap, params, data.omega_over_c);
  result.kappa_field = final_coeff.kappa;
  result.mu_field = final_coeff.mu;
  return result;
}

}  // namespace dotrecon
