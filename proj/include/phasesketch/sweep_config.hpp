#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phasesketch/analysis.hpp"
#include "phasesketch/lbfgs.hpp"
#include "phasesketch/model.hpp"

namespace phasesketch {

/// Declarative description of a (g-grid x depth-grid x seeds) experiment.
struct SweepConfig {
  ModelKind model_kind = ModelKind::Tfim1d;
  int lattice_size = 4;
  std::vector<double> g_grid;  // resolved to an explicit sorted list
  std::vector<int> p_grid;
  int n_restarts = 5;
  bool warm_start_depth = true;   // stage 2
  bool warm_start_cross_g = true;  // stage 3
  std::uint64_t base_seed = 1;
  bool compute_exact = false;
  std::vector<OrderParamKind> order_params;
  std::string output_dir = "records";
  int workers = 1;
  LbfgsOptions optimizer;

  // Paper constants, overridable for ablations.
  std::optional<double> coupling_j;
  std::optional<double> bias_hz;
  std::optional<double> onsite_mu;
  double init_bound_scale = 1.0;  // random init uniform on [0, scale / p]
};

/// Parses and validates a JSON config. Validation errors name the offending
/// field path (e.g. "g_grid.count").
SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::string& path);

/// Model built from the config, with any constant overrides applied.
ModelInstance build_config_model(const SweepConfig& config);

}  // namespace phasesketch
