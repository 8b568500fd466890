#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "phasesketch/flo_sim.hpp"
#include "phasesketch/model.hpp"
#include "phasesketch/qudit_sim.hpp"

namespace phasesketch {

enum class OrderParamKind { Mz, StringOrder, Dimerisation, SpinCorrelation, Coop };

std::string to_string(OrderParamKind kind);
OrderParamKind order_param_from_string(const std::string& name);

/// Model order parameters. m_z: TFIM; string order (alpha = z, endpoints 2 and
/// L-1), staggered dimerisation, spin correlation: BBC; COOP: SSH.
double order_parameter(const StateVector& state, OrderParamKind kind,
                       const ModelInstance& model);
double order_parameter(const MajoranaCovariance& state, OrderParamKind kind,
                       const ModelInstance& model);

/// Forward differences of the best VQE energy over the depth grid. Row r of
/// `values` belongs to depth p_grid[r+1]: (E(p_{r+1}) - E(p_r)) / (p_{r+1} - p_r).
struct DerivativeTable {
  std::vector<double> g_grid;
  std::vector<int> p_grid;
  Eigen::MatrixXd values;
  bool normalized = false;
  std::vector<std::pair<int, int>> holes;  // (p index, g index) of missing inputs
};

/// `energies` is p_grid.size() x g_grid.size(); NaN marks a missing cell.
/// Differences touching a hole are NaN and the hole is listed.
DerivativeTable energy_derivative_table(const std::vector<double>& g_grid,
                                        const std::vector<int>& p_grid,
                                        const Eigen::MatrixXd& energies, bool normalize);

/// Rescales each row to max |value| = 1 (all-zero rows untouched). Idempotent.
void normalize_rows(DerivativeTable& table);

/// Central differences on the interior, one-sided at the ends. Needs >= 3 points.
std::vector<double> g_derivative(const std::vector<double>& g_grid,
                                 const std::vector<double>& series);

enum class ExtremumMode { ArgMin, ArgMaxAbs };

/// Grid g achieving the row extremum; ties break toward smaller g. NaN cells
/// are skipped. Optional 3-point median prefilter against spurious extrema.
double locate_extremum(const std::vector<double>& g_grid, const std::vector<double>& row,
                       ExtremumMode mode, bool median_filter = false);
std::vector<double> locate_transition(const DerivativeTable& table, ExtremumMode mode,
                                      bool median_filter = false);

struct ExpFit {
  double a = 0.0;
  double gamma = 0.0;
  double e0_fit = 0.0;
  double residual = 0.0;  // RMS
};

/// Least-squares fit of E(p) = a * exp(-gamma * p) + e0 by variable projection:
/// for fixed gamma the linear pair (a, e0) is solved exactly; gamma by grid
/// search plus local refinement. A flat series returns (0, 0, E, 0).
ExpFit exp_fit(const std::vector<int>& p_values, const std::vector<double>& energies);

}  // namespace phasesketch
