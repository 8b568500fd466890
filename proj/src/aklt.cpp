#include <array>
#include <cmath>
#include <complex>

#include "phasesketch/qudit_sim.hpp"

namespace phasesketch {

namespace {

using Complex = std::complex<double>;

// Bond-dimension-2 AKLT tensors, physical index 0,1,2 <-> S_z = +1, 0, -1.
std::array<Eigen::Matrix2cd, 3> aklt_tensors() {
  const double a = std::sqrt(2.0 / 3.0);
  const double b = std::sqrt(1.0 / 3.0);
  Eigen::Matrix2cd up, zero, down;
  up << 0, a, 0, 0;        // sqrt(2/3) sigma^+
  zero << -b, 0, 0, b;     // -sqrt(1/3) sigma^z
  down << 0, 0, -a, 0;     // -sqrt(2/3) sigma^-
  return {up, zero, down};
}

}  // namespace

Eigen::VectorXcd aklt_unnormalized(int n_sites, const Eigen::Vector2cd& left,
                                   const Eigen::Vector2cd& right) {
  const auto tensors = aklt_tensors();
  std::size_t dim = 1;
  for (int i = 0; i < n_sites; ++i) dim *= 3;

  // Partial contractions left-to-right; site i has stride 3^(i-1) in the
  // amplitude index, so appending site i+1 adds s * 3^i.
  std::vector<Eigen::RowVector2cd> partial(1);
  partial[0] = left.transpose();
  std::size_t prefix_dim = 1;
  for (int site = 0; site < n_sites; ++site) {
    std::vector<Eigen::RowVector2cd> next(prefix_dim * 3);
    for (std::size_t cfg = 0; cfg < prefix_dim; ++cfg)
      for (int s = 0; s < 3; ++s)
        next[cfg + s * prefix_dim] = partial[cfg] * tensors[s];
    partial = std::move(next);
    prefix_dim *= 3;
  }

  Eigen::VectorXcd amps(dim);
  for (std::size_t cfg = 0; cfg < dim; ++cfg) amps[cfg] = partial[cfg] * right;
  return amps;
}

}  // namespace phasesketch
