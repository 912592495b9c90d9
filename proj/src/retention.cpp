#include "dotrecon/retention.hpp"

#include "dotrecon/errors.hpp"

namespace dotrecon {

RetentionMask full_retention(int num_sources, int num_sensors) {
  RetentionMask mask;
  mask.pairs.reserve(static_cast<std::size_t>(num_sources) * num_sensors);
  for (int k = 0; k < num_sources; ++k)
    for (int j = 0; j < num_sensors; ++j) mask.pairs.emplace_back(k, j);
  return mask;
}

Eigen::VectorXd stack_measurements(const Eigen::MatrixXcd& meas,
                                   const RetentionMask& mask, double omega_over_c) {
  const int p = mask.pair_count();
  Eigen::VectorXd v(mask.entry_count(omega_over_c));
  for (int i = 0; i < p; ++i) {
    const auto& [k, j] = mask.pairs[i];
    if (j < 0 || j >= meas.rows() || k < 0 || k >= meas.cols())
      throw NumericalError("stack_measurements: retained pair outside matrix");
    v[i] = meas(j, k).real();
    if (omega_over_c != 0.0) v[p + i] = meas(j, k).imag();
  }
  return v;
}

}  // namespace dotrecon
