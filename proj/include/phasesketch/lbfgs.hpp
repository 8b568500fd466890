#pragma once

#include <Eigen/Dense>
#include <functional>

namespace phasesketch {

struct LbfgsOptions {
  int max_iters = 2000;
  double tol_g = 1e-9;   // gradient norm
  double tol_f = 1e-12;  // relative energy change
  int memory = 10;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Objective: f(x) with the gradient written into the second argument.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a strong-Wolfe line search. Never throws on
/// optimization trouble: a failed line search after a memory-reset restart
/// ends the run with converged=false and the best iterate seen.
LbfgsResult lbfgs_minimize(const Objective& fg, Eigen::VectorXd x0,
                           const LbfgsOptions& opts = {});

}  // namespace phasesketch
