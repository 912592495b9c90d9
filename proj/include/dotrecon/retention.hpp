#ifndef DOTRECON_RETENTION_HPP
#define DOTRECON_RETENTION_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dotrecon {

// Kept (source k, sensor j) measurement pairs in source-major order. The
// same ordering defines the rows of stacked measurement vectors and of the
// Jacobian, so every consumer agrees on entry identity.
struct RetentionMask {
  std::vector<std::pair<int, int>> pairs;  // (k, j)

  int pair_count() const { return static_cast<int>(pairs.size()); }
  // Number of real entries in a stacked vector: one per pair unmodulated,
  // two (Re and Im) otherwise.
  int entry_count(double omega_over_c) const {
    return omega_over_c == 0.0 ? pair_count() : 2 * pair_count();
  }
};

RetentionMask full_retention(int num_sources, int num_sensors);

// Stacks the retained entries of a complex sensor-by-source matrix as
// [Re block; Im block]; the Im block is dropped entirely when omega == 0.
Eigen::VectorXd stack_measurements(const Eigen::MatrixXcd& meas,
                                   const RetentionMask& mask, double omega_over_c);

}  // namespace dotrecon

#endif
