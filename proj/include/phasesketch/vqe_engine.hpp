#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phasesketch/analysis.hpp"
#include "phasesketch/exact_oracle.hpp"
#include "phasesketch/lbfgs.hpp"
#include "phasesketch/sweep_config.hpp"

namespace phasesketch {

enum class InitStrategy { Random, DepthExtrapolated, CrossG };

std::string to_string(InitStrategy s);
InitStrategy init_strategy_from_string(const std::string& name);

/// One VQE run's full outcome.
struct RunRecord {
  std::string model_kind;
  int lattice_size = 0;
  double g = 0.0;
  int p = 0;
  std::uint64_t seed = 0;
  InitStrategy init_strategy = InitStrategy::Random;
  std::vector<double> theta_final;  // flattened AnsatzParams layout
  std::vector<double> sub_expectations;
  double energy = 0.0;
  std::map<std::string, double> order_params;
  int iterations = 0;
  double grad_norm_final = 0.0;
  bool converged = false;
  double wall_time = 0.0;
  bool best = false;
  std::optional<double> exact_e0;
  std::optional<double> exact_fidelity;
};

struct MinimizeOptions {
  LbfgsOptions lbfgs;
  std::vector<OrderParamKind> order_params;
  const GroundSpace* exact = nullptr;  // attaches exact_e0 / exact_fidelity
};

/// Quasi-Newton descent on f(theta) = sum c_i(g) <H_i>, dispatched to the
/// statevector or Gaussian backend by model kind. Optimization trouble never
/// throws: converged=false with the best iterate.
RunRecord minimize(const ModelInstance& model, const HamiltonianParams& g, int p,
                   const Eigen::VectorXd& theta0, const MinimizeOptions& opts = {});

/// Up to three warm-start candidates for (g, p): smooth-resample and zero-pad
/// from the best lower-depth record at the same g, and the cross-g reuse pick
/// scored by dot(c(g), sub_expectations) over same-p records. Deterministic;
/// ties break by (energy, seed).
std::vector<Eigen::VectorXd> warm_start_candidates(const std::vector<RunRecord>& history,
                                                   const ModelInstance& model,
                                                   const HamiltonianParams& g, int p);

/// Deterministic per-task seed.
std::uint64_t task_seed(std::uint64_t base_seed, int g_index, int p, int restart, int stage);

/// Random initial parameters: theta uniform on [0, bound_scale/p], boundary
/// angles uniform on [0, pi].
Eigen::VectorXd random_init(const ModelInstance& model, int p, std::uint64_t seed,
                            double bound_scale = 1.0);

using RecordSink = std::function<void(const RunRecord&)>;

/// Three-stage pipeline over the config grid: random restarts, one
/// depth-extrapolated run per (g, p) in ascending p, one cross-g run per
/// (g, p). Completed tasks found in `existing` (matched by seed) are reused.
/// Every fresh record is passed to `sink` when it completes; the returned set
/// has best=true on each (g, p)'s lowest-energy record.
std::vector<RunRecord> run_sweep(const SweepConfig& config,
                                 const std::vector<RunRecord>& existing = {},
                                 const RecordSink& sink = {});

/// Flags the lowest-energy record per (g, p); ties break by lowest seed.
void mark_best(std::vector<RunRecord>& records);

}  // namespace phasesketch
