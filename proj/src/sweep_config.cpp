#include "phasesketch/sweep_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace phasesketch {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config error at " + path + ": " + what);
}

const json& require(const json& obj, const std::string& parent, const std::string& key) {
  if (!obj.contains(key)) fail(parent.empty() ? key : parent + "." + key, "missing field");
  return obj.at(key);
}

template <typename T>
T as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    fail(path, "wrong type");
  }
}

std::vector<double> parse_g_grid(const json& node) {
  if (node.is_array()) {
    auto grid = as<std::vector<double>>(node, "g_grid");
    if (grid.empty()) fail("g_grid", "empty grid");
    if (!std::is_sorted(grid.begin(), grid.end())) fail("g_grid", "must be sorted");
    return grid;
  }
  if (node.is_object()) {
    const double lo = as<double>(require(node, "g_grid", "min"), "g_grid.min");
    const double hi = as<double>(require(node, "g_grid", "max"), "g_grid.max");
    const int count = as<int>(require(node, "g_grid", "count"), "g_grid.count");
    if (count < 1) fail("g_grid.count", "must be >= 1");
    if (hi < lo) fail("g_grid.max", "must be >= min");
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
      grid[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return grid;
  }
  fail("g_grid", "expected an array or {min, max, count}");
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("<root>", "expected an object");

  SweepConfig cfg;
  const json& model = require(doc, "", "model");
  try {
    cfg.model_kind =
        model_kind_from_string(as<std::string>(require(model, "model", "kind"), "model.kind"));
  } catch (const std::invalid_argument& e) {
    fail("model.kind", e.what());
  }
  cfg.lattice_size = as<int>(require(model, "model", "size"), "model.size");
  if (cfg.lattice_size < 2) fail("model.size", "must be >= 2");

  cfg.g_grid = parse_g_grid(require(doc, "", "g_grid"));
  cfg.p_grid = as<std::vector<int>>(require(doc, "", "p_grid"), "p_grid");
  if (cfg.p_grid.empty()) fail("p_grid", "empty grid");
  for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) {
    if (cfg.p_grid[i] < 1) fail("p_grid", "depths must be >= 1");
    if (i > 0 && cfg.p_grid[i] <= cfg.p_grid[i - 1]) fail("p_grid", "must be strictly increasing");
  }

  if (doc.contains("n_restarts")) cfg.n_restarts = as<int>(doc["n_restarts"], "n_restarts");
  if (cfg.n_restarts < 1) fail("n_restarts", "must be >= 1");

  if (doc.contains("warm_start")) {
    const json& ws = doc["warm_start"];
    if (!ws.is_object()) fail("warm_start", "expected an object");
    if (ws.contains("depth_extrapolation"))
      cfg.warm_start_depth = as<bool>(ws["depth_extrapolation"], "warm_start.depth_extrapolation");
    if (ws.contains("cross_g"))
      cfg.warm_start_cross_g = as<bool>(ws["cross_g"], "warm_start.cross_g");
  }

  if (doc.contains("base_seed")) cfg.base_seed = as<std::uint64_t>(doc["base_seed"], "base_seed");
  if (doc.contains("compute_exact"))
    cfg.compute_exact = as<bool>(doc["compute_exact"], "compute_exact");

  if (doc.contains("order_params")) {
    for (const auto& name : as<std::vector<std::string>>(doc["order_params"], "order_params")) {
      try {
        cfg.order_params.push_back(order_param_from_string(name));
      } catch (const std::invalid_argument& e) {
        fail("order_params", e.what());
      }
    }
  }

  if (doc.contains("output_dir")) cfg.output_dir = as<std::string>(doc["output_dir"], "output_dir");
  if (doc.contains("workers")) cfg.workers = as<int>(doc["workers"], "workers");
  if (cfg.workers < 0) fail("workers", "must be >= 0");

  if (doc.contains("optimizer")) {
    const json& opt = doc["optimizer"];
    if (!opt.is_object()) fail("optimizer", "expected an object");
    if (opt.contains("max_iters"))
      cfg.optimizer.max_iters = as<int>(opt["max_iters"], "optimizer.max_iters");
    if (opt.contains("tol_g")) cfg.optimizer.tol_g = as<double>(opt["tol_g"], "optimizer.tol_g");
    if (opt.contains("tol_f")) cfg.optimizer.tol_f = as<double>(opt["tol_f"], "optimizer.tol_f");
    if (opt.contains("memory")) cfg.optimizer.memory = as<int>(opt["memory"], "optimizer.memory");
    if (cfg.optimizer.max_iters < 1) fail("optimizer.max_iters", "must be >= 1");
  }

  if (doc.contains("constants")) {
    const json& c = doc["constants"];
    if (!c.is_object()) fail("constants", "expected an object");
    if (c.contains("j")) cfg.coupling_j = as<double>(c["j"], "constants.j");
    if (c.contains("h_z")) cfg.bias_hz = as<double>(c["h_z"], "constants.h_z");
    if (c.contains("mu")) cfg.onsite_mu = as<double>(c["mu"], "constants.mu");
    if (c.contains("init_bound_scale"))
      cfg.init_bound_scale = as<double>(c["init_bound_scale"], "constants.init_bound_scale");
    if (cfg.init_bound_scale <= 0) fail("constants.init_bound_scale", "must be > 0");
  }

  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

ModelInstance build_config_model(const SweepConfig& config) {
  ModelInstance model = build_model(config.model_kind, config.lattice_size);
  if (config.coupling_j) model.coupling_j = *config.coupling_j;
  if (config.bias_hz) model.bias_hz = *config.bias_hz;
  if (config.onsite_mu) model.onsite_mu = *config.onsite_mu;
  return model;
}

}  // namespace phasesketch
