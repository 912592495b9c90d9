#ifndef DOTRECON_IO_HPP
#define DOTRECON_IO_HPP

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "dotrecon/measurement.hpp"
#include "dotrecon/mesh.hpp"

namespace dotrecon {

// Measurement file: plain text, '#key=value' headers (omega_over_c, K, J,
// layout_hash, sim_nodes), then one 'k j Re Im sigma_Re sigma_Im' line per
// retained pair in source-major order. Im columns are written as 0 for
// unmodulated data.
void write_measurements(const MeasurementSet& data, const std::string& path);
MeasurementSet read_measurements(const std::string& path);

// Solution file: '#mesh_hash', '#nodes', '#kappa0', '#mu0' headers followed
// by one 'kappa mu' line per node. The archival companion to the VTK export.
struct Solution {
  std::uint64_t mesh_hash = 0;
  double kappa0 = 0.0;
  double mu0 = 0.0;
  Eigen::VectorXd kappa;
  Eigen::VectorXd mu;
};

void write_solution(const Solution& solution, const std::string& path);
Solution read_solution(const std::string& path);

// VTK legacy ASCII unstructured grid with POINT_DATA scalars "absorption"
// and "diffusivity", 9 significant digits.
void write_vtk(const Mesh& mesh, const Eigen::VectorXd& kappa,
               const Eigen::VectorXd& mu, const std::string& path);

// Reads back the two scalar arrays of a file written by write_vtk.
void read_vtk_fields(const std::string& path, Eigen::VectorXd* kappa,
                     Eigen::VectorXd* mu);

}  // namespace dotrecon

#endif
