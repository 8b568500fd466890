#include "phasesketch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phasesketch {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_range(double value, double bound, const char* name) {
  if (!(std::abs(value) <= bound + 1e-8))
    throw std::logic_error(std::string(name) + " outside its admissible range");
}

// Spin-1 S^z eigenvalue of physical index s (0,1,2 <-> +1,0,-1); for d = 2 the
// Pauli-Z eigenvalue (+1 for |0>, -1 for |1>).
double z_eigenvalue(int s, int d) { return d == 2 ? 1.0 - 2.0 * s : 1.0 - s; }

double magnetisation_z(const StateVector& state) {
  const int n = state.n_sites;
  const int d = state.local_dim;
  double total = 0.0;
  for (Eigen::Index x = 0; x < state.amps.size(); ++x) {
    const double w = std::norm(state.amps[x]);
    if (w == 0.0) continue;
    Eigen::Index rest = x;
    double zsum = 0.0;
    for (int i = 0; i < n; ++i) {
      zsum += z_eigenvalue(static_cast<int>(rest % d), d);
      rest /= d;
    }
    total += w * zsum;
  }
  return total / n;
}

// <S_i^z exp(i pi (S_{i+1}^z + ... + S_{j-1}^z)) S_j^z> with i=2, j=L-1.
// Everything is S^z-diagonal, so one pass over the amplitudes suffices.
double string_order(const StateVector& state) {
  const int n = state.n_sites;
  if (n < 4) throw std::invalid_argument("string order needs L >= 4");
  double total = 0.0;
  std::vector<int> digits(n);
  for (Eigen::Index x = 0; x < state.amps.size(); ++x) {
    const double w = std::norm(state.amps[x]);
    if (w == 0.0) continue;
    Eigen::Index rest = x;
    for (int i = 0; i < n; ++i) {
      digits[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    double v = z_eigenvalue(digits[1], 3) * z_eigenvalue(digits[n - 2], 3);
    for (int i = 2; i < n - 2; ++i)
      if (digits[i] != 1) v = -v;  // exp(i pi S^z) = diag(-1, 1, -1)
    total += w * v;
  }
  return total;
}

std::vector<double> bond_exchanges(const StateVector& state) {
  const int n = state.n_sites;
  std::vector<double> out;
  out.reserve(n - 1);
  for (int i = 1; i < n; ++i) {
    SiteOperator bond(OperatorKind::SpinLinear, {i, i + 1}, spin1_exchange());
    out.push_back(expectation(state, bond));
  }
  return out;
}

double dimerisation(const StateVector& state) {
  const int n = state.n_sites;
  if (n < 3) throw std::invalid_argument("dimerisation needs L >= 3");
  const auto bonds = bond_exchanges(state);  // bonds[i] = <S_{i+1} . S_{i+2}>, 0-based
  double total = 0.0;
  for (int i = 2; i <= n - 1; ++i) {
    const double diff = bonds[i - 2] - bonds[i - 1];
    total += (i % 2 == 0 ? diff : -diff);
  }
  return total / (n - 2);
}

double spin_correlation(const StateVector& state) {
  // Normalised so a fully polarised product state scores 2 (the aligned-pair
  // expectation <S.S> = 1 carries a factor 2).
  const auto bonds = bond_exchanges(state);
  double total = 0.0;
  for (double b : bonds) total += b;
  return 2.0 * total / bonds.size();
}

std::vector<double> median3(const std::vector<double>& row) {
  if (row.size() < 3) return row;
  std::vector<double> out = row;
  for (std::size_t i = 1; i + 1 < row.size(); ++i) {
    double a = row[i - 1], b = row[i], c = row[i + 1];
    out[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
  return out;
}

// Sum of squares of the best linear fit E ~ a * basis + e0, via the 2-column
// least-squares problem.
double projected_sse(const std::vector<double>& basis, const std::vector<double>& e,
                     double* a_out, double* e0_out) {
  const Eigen::Index m = static_cast<Eigen::Index>(e.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = basis[i];
    design(i, 1) = 1.0;
    rhs[i] = e[i];
  }
  Eigen::Vector2d sol = design.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                            .setThreshold(1e-12)
                            .solve(rhs);
  if (a_out) *a_out = sol[0];
  if (e0_out) *e0_out = sol[1];
  return (design * sol - rhs).squaredNorm();
}

double gamma_sse(double gamma, const std::vector<int>& p, const std::vector<double>& e,
                 double* a_out = nullptr, double* e0_out = nullptr) {
  std::vector<double> basis(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) basis[i] = std::exp(-gamma * p[i]);
  return projected_sse(basis, e, a_out, e0_out);
}

}  // namespace

std::string to_string(OrderParamKind kind) {
  switch (kind) {
    case OrderParamKind::Mz: return "m_z";
    case OrderParamKind::StringOrder: return "string_order";
    case OrderParamKind::Dimerisation: return "dimerisation";
    case OrderParamKind::SpinCorrelation: return "spin_correlation";
    case OrderParamKind::Coop: return "coop";
  }
  throw std::logic_error("unreachable");
}

OrderParamKind order_param_from_string(const std::string& name) {
  if (name == "m_z") return OrderParamKind::Mz;
  if (name == "string_order") return OrderParamKind::StringOrder;
  if (name == "dimerisation") return OrderParamKind::Dimerisation;
  if (name == "spin_correlation") return OrderParamKind::SpinCorrelation;
  if (name == "coop") return OrderParamKind::Coop;
  throw std::invalid_argument("unknown order parameter: " + name);
}

double order_parameter(const StateVector& state, OrderParamKind kind,
                       const ModelInstance& model) {
  const bool tfim = model.kind == ModelKind::Tfim1d || model.kind == ModelKind::Tfim2d;
  switch (kind) {
    case OrderParamKind::Mz: {
      if (!tfim) throw std::invalid_argument("m_z is a TFIM order parameter");
      const double v = magnetisation_z(state);
      check_range(v, 1.0, "m_z");
      return v;
    }
    case OrderParamKind::StringOrder:
      if (model.kind != ModelKind::Bbc)
        throw std::invalid_argument("string order is a BBC order parameter");
      return string_order(state);
    case OrderParamKind::Dimerisation: {
      if (model.kind != ModelKind::Bbc)
        throw std::invalid_argument("dimerisation is a BBC order parameter");
      const double v = dimerisation(state);
      check_range(v, 4.0, "dimerisation");
      return v;
    }
    case OrderParamKind::SpinCorrelation:
      if (model.kind != ModelKind::Bbc)
        throw std::invalid_argument("spin correlation is a BBC order parameter");
      return spin_correlation(state);
    case OrderParamKind::Coop:
      throw std::invalid_argument("COOP lives on the Gaussian backend");
  }
  throw std::logic_error("unreachable");
}

double order_parameter(const MajoranaCovariance& state, OrderParamKind kind,
                       const ModelInstance& model) {
  if (kind != OrderParamKind::Coop || model.kind != ModelKind::Ssh2d)
    throw std::invalid_argument("Gaussian states support only the SSH COOP");
  const double v = corner_occupation_parity(state, model.lattice.lx);
  check_range(v, 1.0, "coop");
  return v;
}

DerivativeTable energy_derivative_table(const std::vector<double>& g_grid,
                                        const std::vector<int>& p_grid,
                                        const Eigen::MatrixXd& energies, bool normalize) {
  if (p_grid.size() < 2) throw std::invalid_argument("need at least two depths");
  if (energies.rows() != static_cast<Eigen::Index>(p_grid.size()) ||
      energies.cols() != static_cast<Eigen::Index>(g_grid.size()))
    throw std::invalid_argument("energy matrix shape does not match the grids");
  if (!std::is_sorted(g_grid.begin(), g_grid.end()) ||
      !std::is_sorted(p_grid.begin(), p_grid.end()))
    throw std::invalid_argument("grids must be sorted");

  DerivativeTable table;
  table.g_grid = g_grid;
  table.p_grid = p_grid;
  table.values.resize(static_cast<Eigen::Index>(p_grid.size()) - 1,
                      static_cast<Eigen::Index>(g_grid.size()));
  for (Eigen::Index r = 0; r < energies.rows(); ++r)
    for (Eigen::Index c = 0; c < energies.cols(); ++c)
      if (std::isnan(energies(r, c)))
        table.holes.emplace_back(static_cast<int>(r), static_cast<int>(c));
  for (Eigen::Index r = 0; r + 1 < energies.rows(); ++r) {
    const double dp = p_grid[r + 1] - p_grid[r];
    for (Eigen::Index c = 0; c < energies.cols(); ++c)
      table.values(r, c) = (energies(r + 1, c) - energies(r, c)) / dp;
  }
  if (normalize) normalize_rows(table);
  return table;
}

void normalize_rows(DerivativeTable& table) {
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    double peak = 0.0;
    for (Eigen::Index c = 0; c < table.values.cols(); ++c)
      if (!std::isnan(table.values(r, c)))
        peak = std::max(peak, std::abs(table.values(r, c)));
    if (peak > 0.0) table.values.row(r) /= peak;
  }
  table.normalized = true;
}

std::vector<double> g_derivative(const std::vector<double>& g_grid,
                                 const std::vector<double>& series) {
  const std::size_t n = g_grid.size();
  if (n < 3) throw std::invalid_argument("derivative needs at least 3 grid points");
  if (series.size() != n) throw std::invalid_argument("series length mismatch");
  std::vector<double> out(n);
  out[0] = (series[1] - series[0]) / (g_grid[1] - g_grid[0]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (series[i + 1] - series[i - 1]) / (g_grid[i + 1] - g_grid[i - 1]);
  out[n - 1] = (series[n - 1] - series[n - 2]) / (g_grid[n - 1] - g_grid[n - 2]);
  return out;
}

double locate_extremum(const std::vector<double>& g_grid, const std::vector<double>& row,
                       ExtremumMode mode, bool median_filter) {
  if (row.size() != g_grid.size()) throw std::invalid_argument("row length mismatch");
  const std::vector<double> data = median_filter ? median3(row) : row;
  int best = -1;
  double best_score = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (std::isnan(data[i])) continue;
    const double score = mode == ExtremumMode::ArgMin ? -data[i] : std::abs(data[i]);
    if (best < 0 || score > best_score) {
      best = static_cast<int>(i);
      best_score = score;
    }
  }
  if (best < 0) throw std::invalid_argument("row holds no finite values");
  return g_grid[best];
}

std::vector<double> locate_transition(const DerivativeTable& table, ExtremumMode mode,
                                      bool median_filter) {
  std::vector<double> out;
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    std::vector<double> row(table.values.cols());
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) row[c] = table.values(r, c);
    out.push_back(locate_extremum(table.g_grid, row, mode, median_filter));
  }
  return out;
}

ExpFit exp_fit(const std::vector<int>& p_values, const std::vector<double>& energies) {
  const std::size_t m = p_values.size();
  if (m < 4 || energies.size() != m)
    throw std::invalid_argument("exp_fit needs >= 4 matching points");

  const auto [emin, emax] = std::minmax_element(energies.begin(), energies.end());
  const double mean = std::accumulate(energies.begin(), energies.end(), 0.0) / m;
  if (*emax - *emin <= 1e-12 * std::max(1.0, std::abs(mean)))
    return {0.0, 0.0, mean, 0.0};

  // Variable projection: coarse log-spaced gamma grid, then golden-section
  // refinement of the projected sum of squares.
  const double lo = std::log(1e-4), hi = std::log(30.0);
  const int n_grid = 120;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_grid; ++i) {
    const double gamma = std::exp(lo + (hi - lo) * i / (n_grid - 1));
    const double sse = gamma_sse(gamma, p_values, energies);
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }
  double a = std::exp(lo + (hi - lo) * std::max(0, best - 1) / (n_grid - 1));
  double b = std::exp(lo + (hi - lo) * std::min(n_grid - 1, best + 1) / (n_grid - 1));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = gamma_sse(x1, p_values, energies), f2 = gamma_sse(x2, p_values, energies);
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = gamma_sse(x1, p_values, energies);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = gamma_sse(x2, p_values, energies);
    }
  }
  ExpFit fit;
  fit.gamma = 0.5 * (a + b);
  const double sse = gamma_sse(fit.gamma, p_values, energies, &fit.a, &fit.e0_fit);
  fit.residual = std::sqrt(sse / m);
  return fit;
}

}  // namespace phasesketch
