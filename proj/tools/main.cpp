#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phasesketch/analysis.hpp"
#include "phasesketch/exact_oracle.hpp"
#include "phasesketch/record_store.hpp"
#include "phasesketch/sweep_config.hpp"
#include "phasesketch/vqe_engine.hpp"

namespace {

using namespace phasesketch;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

int resolve_workers(int cli_workers, int config_workers) {
  if (cli_workers > 0) return cli_workers;
  if (config_workers > 0) return config_workers;
  if (const char* env = std::getenv("PHASESKETCH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Derivative columns use compact names: d m_z / d h_x -> "dmz_dhx".
std::string compact(const std::string& name) {
  std::string out;
  for (char c : name)
    if (c != '_') out.push_back(c);
  return out;
}

std::string g_column_name(const std::string& model_kind) {
  if (model_kind == "bbc") return "phi";
  if (model_kind == "ssh-2d") return "r";
  return "h_x";
}

struct Grid {
  std::string model_kind;
  int lattice_size = 0;
  std::vector<double> g_grid;
  std::vector<int> p_grid;
  std::map<std::pair<double, int>, const RunRecord*> best;  // (g, p) -> record
};

Grid organize(std::vector<RunRecord>& records) {
  if (records.empty()) throw std::runtime_error("record store is empty");
  mark_best(records);
  Grid grid;
  grid.model_kind = records.front().model_kind;
  grid.lattice_size = records.front().lattice_size;
  std::set<double> gs;
  std::set<int> ps;
  for (const auto& r : records) {
    if (r.model_kind != grid.model_kind)
      throw std::runtime_error("record store mixes model kinds");
    gs.insert(r.g);
    ps.insert(r.p);
    if (r.best) grid.best[{r.g, r.p}] = &r;
  }
  grid.g_grid.assign(gs.begin(), gs.end());
  grid.p_grid.assign(ps.begin(), ps.end());
  return grid;
}

Eigen::MatrixXd best_energies(const Grid& grid) {
  Eigen::MatrixXd e(grid.p_grid.size(), grid.g_grid.size());
  for (std::size_t r = 0; r < grid.p_grid.size(); ++r)
    for (std::size_t c = 0; c < grid.g_grid.size(); ++c) {
      auto it = grid.best.find({grid.g_grid[c], grid.p_grid[r]});
      e(r, c) = it == grid.best.end() ? kNan : it->second->energy;
    }
  return e;
}

void warn_holes(const DerivativeTable& table) {
  if (table.holes.empty()) return;
  std::cerr << "warning: incomplete grid, missing (g, p) cells:";
  for (const auto& [pi, gi] : table.holes)
    std::cerr << " (" << table.g_grid[gi] << ", " << table.p_grid[pi] << ")";
  std::cerr << "\n";
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path);
    out_ << std::setprecision(17);
    for (const auto& c : columns) out_ << c << ',';
    out_ << "format_version\r\n";
  }

  void row(const std::vector<double>& values) {
    for (double v : values) {
      if (!std::isnan(v)) out_ << v;
      out_ << ',';
    }
    out_ << format_version() << "\r\n";
  }

 private:
  std::ofstream out_;
};

std::vector<std::string> order_param_names(const Grid& grid) {
  std::set<std::string> names;
  for (const auto& [key, rec] : grid.best)
    for (const auto& [name, value] : rec->order_params) names.insert(name);
  return {names.begin(), names.end()};
}

int cmd_run(const std::string& config_path, int workers) {
  SweepConfig config = load_sweep_config(config_path);
  config.workers = resolve_workers(workers, config.workers);
  RecordStore store(config.output_dir);
  const std::vector<RunRecord> existing = store.load();
  std::size_t fresh = 0;
  auto records = run_sweep(config, existing, [&](const RunRecord& rec) {
    store.append(rec);
    ++fresh;
  });
  std::cout << records.size() << " records (" << fresh << " new) in " << config.output_dir
            << "\n";
  return 0;
}

int cmd_analyze(const std::string& records_dir, bool normalize) {
  RecordStore store(records_dir);
  auto records = store.load();
  const Grid grid = organize(records);
  const std::string gname = g_column_name(grid.model_kind);

  DerivativeTable table =
      energy_derivative_table(grid.g_grid, grid.p_grid, best_energies(grid), false);
  warn_holes(table);
  DerivativeTable normed = table;
  normalize_rows(normed);

  const auto op_names = order_param_names(grid);
  std::vector<std::string> columns{"p", gname, "dE_dp", "dE_dp_norm"};
  for (const auto& name : op_names) {
    columns.push_back(name);
    columns.push_back("d" + compact(name) + "_d" + compact(gname));
  }

  CsvWriter csv((std::filesystem::path(records_dir) / "analysis.csv").string(), columns);
  for (std::size_t r = 0; r < grid.p_grid.size(); ++r) {
    // Order-parameter series and their g-derivatives at this depth.
    std::map<std::string, std::vector<double>> series, deriv;
    for (const auto& name : op_names) {
      auto& s = series[name];
      for (double g : grid.g_grid) {
        auto it = grid.best.find({g, grid.p_grid[r]});
        const auto* rec = it == grid.best.end() ? nullptr : it->second;
        s.push_back(rec && rec->order_params.count(name) ? rec->order_params.at(name) : kNan);
      }
      bool complete = std::none_of(s.begin(), s.end(), [](double v) { return std::isnan(v); });
      deriv[name] = complete && s.size() >= 3 ? g_derivative(grid.g_grid, s)
                                              : std::vector<double>(s.size(), kNan);
    }
    for (std::size_t c = 0; c < grid.g_grid.size(); ++c) {
      std::vector<double> row{static_cast<double>(grid.p_grid[r]), grid.g_grid[c]};
      if (r == 0) {
        row.push_back(kNan);
        row.push_back(kNan);
      } else {
        row.push_back(table.values(r - 1, c));
        row.push_back(normed.values(r - 1, c));
      }
      for (const auto& name : op_names) {
        row.push_back(series[name][c]);
        row.push_back(deriv[name][c]);
      }
      csv.row(row);
      if (normalize && r > 0) table.values(r - 1, c) = normed.values(r - 1, c);
    }
  }
  std::cout << "wrote " << records_dir << "/analysis.csv\n";
  return 0;
}

int cmd_fit(const std::string& records_dir) {
  RecordStore store(records_dir);
  auto records = store.load();
  const Grid grid = organize(records);
  CsvWriter csv((std::filesystem::path(records_dir) / "expfit.csv").string(),
                {g_column_name(grid.model_kind), "a", "gamma", "e0_fit", "residual"});
  for (double g : grid.g_grid) {
    std::vector<int> ps;
    std::vector<double> es;
    for (int p : grid.p_grid) {
      auto it = grid.best.find({g, p});
      if (it == grid.best.end()) continue;
      ps.push_back(p);
      es.push_back(it->second->energy);
    }
    if (ps.size() < 4) {
      std::cerr << "warning: skipping g=" << g << " (" << ps.size() << " depths)\n";
      continue;
    }
    const ExpFit fit = exp_fit(ps, es);
    csv.row({g, fit.a, fit.gamma, fit.e0_fit, fit.residual});
  }
  std::cout << "wrote " << records_dir << "/expfit.csv\n";
  return 0;
}

int cmd_exact(const std::string& config_path) {
  const SweepConfig config = load_sweep_config(config_path);
  const ModelInstance model = build_config_model(config);
  RecordStore store(config.output_dir);
  auto records = store.load();

  std::map<double, GroundSpace> exact;
  for (double g : config.g_grid) exact.emplace(g, ground_space(model, {model.kind, g}));

  const bool flo = model.kind == ModelKind::Ssh2d;
  for (auto& rec : records) {
    auto it = exact.find(rec.g);
    if (it == exact.end()) continue;
    const AnsatzParams params = AnsatzParams::unflatten(
        Eigen::Map<const Eigen::VectorXd>(rec.theta_final.data(), rec.theta_final.size()),
        rec.p, model.n_subs(), model.kind == ModelKind::Bbc);
    rec.exact_e0 = it->second.energy;
    rec.exact_fidelity =
        flo ? ground_space_fidelity(flo_run_circuit(model, {model.kind, rec.g}, params),
                                    it->second)
            : ground_space_fidelity(run_circuit(model, {model.kind, rec.g}, params),
                                    it->second);
  }

  // Rewrite the store with the attached references.
  namespace fs = std::filesystem;
  fs::remove(fs::path(config.output_dir) / "records.jsonl");
  fs::remove(fs::path(config.output_dir) / "journal.jsonl");
  for (const auto& rec : records) store.append(rec);
  std::cout << "attached exact references to " << records.size() << " records\n";
  return 0;
}

int cmd_report(const std::string& records_dir) {
  RecordStore store(records_dir);
  auto records = store.load();
  const Grid grid = organize(records);
  const std::string gname = g_column_name(grid.model_kind);

  DerivativeTable table =
      energy_derivative_table(grid.g_grid, grid.p_grid, best_energies(grid), true);
  warn_holes(table);
  const auto e_estimates = locate_transition(table, ExtremumMode::ArgMin);

  const auto op_names = order_param_names(grid);
  std::vector<std::string> columns{"p", "argmin_dE_dp"};
  for (const auto& name : op_names)
    columns.push_back("argmax_d" + compact(name) + "_d" + compact(gname));

  CsvWriter csv((std::filesystem::path(records_dir) / "report.csv").string(), columns);
  for (std::size_t r = 0; r < grid.p_grid.size(); ++r) {
    std::vector<double> row{static_cast<double>(grid.p_grid[r])};
    row.push_back(r == 0 ? kNan : e_estimates[r - 1]);
    for (const auto& name : op_names) {
      std::vector<double> s;
      for (double g : grid.g_grid) {
        auto it = grid.best.find({g, grid.p_grid[r]});
        const auto* rec = it == grid.best.end() ? nullptr : it->second;
        s.push_back(rec && rec->order_params.count(name) ? rec->order_params.at(name) : kNan);
      }
      bool complete = std::none_of(s.begin(), s.end(), [](double v) { return std::isnan(v); });
      if (complete && s.size() >= 3) {
        row.push_back(
            locate_extremum(grid.g_grid, g_derivative(grid.g_grid, s), ExtremumMode::ArgMaxAbs));
      } else {
        row.push_back(kNan);
      }
    }
    csv.row(row);
  }
  std::cout << "wrote " << records_dir << "/report.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-diagram sketching with low-depth variational circuits"};
  app.require_subcommand(1);

  std::string config_path, records_dir;
  int workers = 0;
  bool resume = false, normalize = false;

  auto* run = app.add_subcommand("run", "Execute a sweep config");
  run->add_option("--config", config_path, "Sweep config JSON")->required();
  run->add_option("--workers", workers, "Worker threads");
  run->add_flag("--resume", resume, "Resume a partial sweep (default behaviour)");

  auto* analyze = app.add_subcommand("analyze", "Emit derivative and order-parameter tables");
  analyze->add_option("--records", records_dir, "Record store directory")->required();
  analyze->add_flag("--normalize", normalize, "Normalize each depth row to max |value| = 1");

  auto* fit = app.add_subcommand("fit", "Exponential fits of E(p) per g");
  fit->add_option("--records", records_dir, "Record store directory")->required();

  auto* exact = app.add_subcommand("exact", "Attach exact references to stored records");
  exact->add_option("--config", config_path, "Sweep config JSON")->required();

  auto* report = app.add_subcommand("report", "Per-depth transition estimates");
  report->add_option("--records", records_dir, "Record store directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, workers);
    if (analyze->parsed()) return cmd_analyze(records_dir, normalize);
    if (fit->parsed()) return cmd_fit(records_dir);
    if (exact->parsed()) return cmd_exact(config_path);
    if (report->parsed()) return cmd_report(records_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
