#pragma once

#include <Eigen/Dense>

namespace phasesketch {

/// Pfaffian of a real skew-symmetric matrix, Parlett-Reid elimination with
/// partial pivoting. Returns 0 for odd dimension or a singular matrix.
double pfaffian(Eigen::MatrixXd a);

}  // namespace phasesketch
