#include "phasesketch/pfaffian.hpp"

#include <cmath>

namespace phasesketch {

double pfaffian(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n % 2 != 0) return 0.0;
  double pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    // Pivot: largest entry in column k below the diagonal.
    Eigen::Index kp = k + 1;
    double best = std::abs(a(k + 1, k));
    for (Eigen::Index i = k + 2; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        kp = i;
      }
    if (best == 0.0) return 0.0;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const double inv = 1.0 / a(k, k + 1);
      Eigen::VectorXd tau = a.row(k).segment(k + 2, n - k - 2).transpose() * inv;
      Eigen::VectorXd col = a.col(k + 1).segment(k + 2, n - k - 2);
      a.bottomRightCorner(n - k - 2, n - k - 2).noalias() +=
          tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace phasesketch
