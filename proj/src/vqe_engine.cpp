#include "phasesketch/vqe_engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "phasesketch/flo_sim.hpp"
#include "phasesketch/qudit_sim.hpp"

namespace phasesketch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Monotone cubic (Fritsch-Carlson) interpolation with linear extension
// outside the sample range.
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    slopes_.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      slopes_[0] = slopes_[1] = d[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        slopes_[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    slopes_[0] = endpoint_slope(h[0], h[1], d[0], d[1]);
    slopes_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }

  double operator()(double x) const {
    const std::size_t n = x_.size();
    if (n == 1) return y_[0];
    if (x <= x_[0]) return y_[0] + slopes_[0] * (x - x_[0]);
    if (x >= x_[n - 1]) return y_[n - 1] + slopes_[n - 1] * (x - x_[n - 1]);
    std::size_t i = 0;
    while (x > x_[i + 1]) ++i;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return y_[i] * (2 * t3 - 3 * t2 + 1) + h * slopes_[i] * (t3 - 2 * t2 + t) +
           y_[i + 1] * (-2 * t3 + 3 * t2) + h * slopes_[i + 1] * (t3 - t2);
  }

 private:
  static double endpoint_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }

  std::vector<double> x_, y_, slopes_;
};

bool record_less(const RunRecord& a, const RunRecord& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.seed < b.seed;
}

const RunRecord* best_lower_depth(const std::vector<RunRecord>& history, double g, int p) {
  const RunRecord* pick = nullptr;
  for (const auto& r : history)
    if (r.g == g && r.p < p && (!pick || record_less(r, *pick))) pick = &r;
  return pick;
}

AnsatzParams record_params(const RunRecord& r, const ModelInstance& model) {
  Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(r.theta_final.data(), r.theta_final.size());
  return AnsatzParams::unflatten(x, r.p, model.n_subs(), model.kind == ModelKind::Bbc);
}

std::optional<Eigen::VectorXd> smooth_resample_candidate(const std::vector<RunRecord>& history,
                                                         const ModelInstance& model, double g,
                                                         int p) {
  const RunRecord* src = best_lower_depth(history, g, p);
  if (!src) return std::nullopt;
  const AnsatzParams sp = record_params(*src, model);
  const int k = model.n_subs();
  AnsatzParams out;
  out.theta.resize(p, k);
  std::vector<double> x(sp.depth());
  for (int l = 0; l < sp.depth(); ++l) x[l] = static_cast<double>(l + 1) / sp.depth();
  for (int i = 0; i < k; ++i) {
    std::vector<double> y(sp.depth());
    for (int l = 0; l < sp.depth(); ++l) y[l] = sp.theta(l, i);
    Pchip interp(x, y);
    for (int l = 0; l < p; ++l) out.theta(l, i) = interp(static_cast<double>(l + 1) / p);
  }
  out.boundary = sp.boundary;
  return out.flatten();
}

std::optional<Eigen::VectorXd> zero_pad_candidate(const std::vector<RunRecord>& history,
                                                  const ModelInstance& model, double g, int p) {
  const RunRecord* src = best_lower_depth(history, g, p);
  if (!src) return std::nullopt;
  const AnsatzParams sp = record_params(*src, model);
  AnsatzParams out;
  out.theta = Eigen::MatrixXd::Zero(p, model.n_subs());
  out.theta.topRows(sp.depth()) = sp.theta;
  out.boundary = sp.boundary;
  return out.flatten();
}

std::optional<Eigen::VectorXd> cross_g_candidate(const std::vector<RunRecord>& history,
                                                 const ModelInstance& model,
                                                 const HamiltonianParams& g, int p) {
  const auto coeffs = coefficients(model, g);
  const RunRecord* pick = nullptr;
  double pick_score = 0.0;
  for (const auto& r : history) {
    if (r.p != p || r.sub_expectations.size() != coeffs.size()) continue;
    double score = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) score += coeffs[i] * r.sub_expectations[i];
    if (!pick || score < pick_score || (score == pick_score && record_less(r, *pick))) {
      pick = &r;
      pick_score = score;
    }
  }
  if (!pick) return std::nullopt;
  return Eigen::Map<const Eigen::VectorXd>(pick->theta_final.data(),
                                           pick->theta_final.size());
}

void parallel_run(int workers, int n_tasks, const std::function<void(int)>& fn) {
  if (workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, n_tasks);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::string to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::Random: return "random";
    case InitStrategy::DepthExtrapolated: return "depth_extrapolated";
    case InitStrategy::CrossG: return "cross_g";
  }
  throw std::logic_error("unreachable");
}

InitStrategy init_strategy_from_string(const std::string& name) {
  if (name == "random") return InitStrategy::Random;
  if (name == "depth_extrapolated") return InitStrategy::DepthExtrapolated;
  if (name == "cross_g") return InitStrategy::CrossG;
  throw std::invalid_argument("unknown init strategy: " + name);
}

std::uint64_t task_seed(std::uint64_t base_seed, int g_index, int p, int restart, int stage) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(g_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(p));
  h = splitmix64(h ^ static_cast<std::uint64_t>(restart));
  h = splitmix64(h ^ static_cast<std::uint64_t>(stage));
  return h;
}

Eigen::VectorXd random_init(const ModelInstance& model, int p, std::uint64_t seed,
                            double bound_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_dist(0.0, bound_scale / p);
  std::uniform_real_distribution<double> angle_dist(0.0, M_PI);
  AnsatzParams params;
  params.theta.resize(p, model.n_subs());
  for (int l = 0; l < p; ++l)
    for (int i = 0; i < model.n_subs(); ++i) params.theta(l, i) = theta_dist(rng);
  if (model.kind == ModelKind::Bbc)
    params.boundary = {{angle_dist(rng), angle_dist(rng), angle_dist(rng), angle_dist(rng)}};
  return params.flatten();
}

RunRecord minimize(const ModelInstance& model, const HamiltonianParams& g, int p,
                   const Eigen::VectorXd& theta0, const MinimizeOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const int k = model.n_subs();
  const bool with_boundary = model.kind == ModelKind::Bbc;
  const bool flo = model.kind == ModelKind::Ssh2d;
  const Eigen::Index n_params = static_cast<Eigen::Index>(p) * k + (with_boundary ? 4 : 0);
  if (theta0.size() != n_params)
    throw std::invalid_argument("theta0 length does not match p * k (+ boundary)");

  Objective fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const AnsatzParams params = AnsatzParams::unflatten(x, p, k, with_boundary);
    auto [e, gvec] =
        flo ? flo_energy_and_gradient(model, g, params) : energy_and_gradient(model, g, params);
    grad = gvec;
    return e;
  };
  const LbfgsResult res = lbfgs_minimize(fg, theta0, opts.lbfgs);

  RunRecord rec;
  rec.model_kind = to_string(model.kind);
  rec.lattice_size = model.lattice.lx;
  rec.g = g.value;
  rec.p = p;
  rec.theta_final.assign(res.x.data(), res.x.data() + res.x.size());
  rec.iterations = res.iterations;
  rec.grad_norm_final = res.grad_norm;
  rec.converged = res.converged;

  const AnsatzParams final_params = AnsatzParams::unflatten(res.x, p, k, with_boundary);
  const auto coeffs = coefficients(model, g);
  if (flo) {
    const MajoranaCovariance state = flo_run_circuit(model, g, final_params);
    rec.sub_expectations = flo_sub_expectations(state, quadratic_forms(model));
    for (auto kind : opts.order_params)
      rec.order_params[to_string(kind)] = order_parameter(state, kind, model);
    if (opts.exact) {
      rec.exact_e0 = opts.exact->energy;
      rec.exact_fidelity = ground_space_fidelity(state, *opts.exact);
    }
  } else {
    const StateVector state = run_circuit(model, g, final_params);
    rec.sub_expectations = sub_expectations(state, model);
    for (auto kind : opts.order_params)
      rec.order_params[to_string(kind)] = order_parameter(state, kind, model);
    if (opts.exact) {
      rec.exact_e0 = opts.exact->energy;
      rec.exact_fidelity = ground_space_fidelity(state, *opts.exact);
    }
  }
  rec.energy = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    rec.energy += coeffs[i] * rec.sub_expectations[i];
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<Eigen::VectorXd> warm_start_candidates(const std::vector<RunRecord>& history,
                                                   const ModelInstance& model,
                                                   const HamiltonianParams& g, int p) {
  std::vector<Eigen::VectorXd> out;
  if (auto c = smooth_resample_candidate(history, model, g.value, p)) out.push_back(*c);
  if (auto c = zero_pad_candidate(history, model, g.value, p)) out.push_back(*c);
  if (auto c = cross_g_candidate(history, model, g, p)) out.push_back(*c);
  return out;
}

void mark_best(std::vector<RunRecord>& records) {
  std::map<std::pair<double, int>, RunRecord*> best;
  for (auto& r : records) {
    r.best = false;
    auto key = std::make_pair(r.g, r.p);
    auto it = best.find(key);
    if (it == best.end() || record_less(r, *it->second)) best[key] = &r;
  }
  for (auto& [key, rec] : best) rec->best = true;
}

std::vector<RunRecord> run_sweep(const SweepConfig& config,
                                 const std::vector<RunRecord>& existing,
                                 const RecordSink& sink) {
  const ModelInstance model = build_config_model(config);
  const int n_g = static_cast<int>(config.g_grid.size());

  std::map<int, GroundSpace> exact;
  if (config.compute_exact)
    for (int gi = 0; gi < n_g; ++gi)
      exact.emplace(gi, ground_space(model, {model.kind, config.g_grid[gi]}));

  std::unordered_map<std::uint64_t, const RunRecord*> prior;
  for (const auto& r : existing)
    if (r.model_kind == to_string(model.kind)) prior.emplace(r.seed, &r);

  std::vector<RunRecord> records;
  records.reserve(existing.size() + 16);

  struct Task {
    int gi, p, restart, stage;
    InitStrategy strategy;
    Eigen::VectorXd theta0;
    std::uint64_t seed;
  };

  auto run_batch = [&](std::vector<Task>& tasks) {
    std::vector<std::optional<RunRecord>> fresh(tasks.size());
    std::vector<int> todo;
    for (std::size_t t = 0; t < tasks.size(); ++t)
      if (!prior.count(tasks[t].seed)) todo.push_back(static_cast<int>(t));
    parallel_run(config.workers > 0 ? config.workers : 1, static_cast<int>(todo.size()),
                 [&](int i) {
                   Task& task = tasks[todo[i]];
                   MinimizeOptions opts;
                   opts.lbfgs = config.optimizer;
                   opts.order_params = config.order_params;
                   auto it = exact.find(task.gi);
                   if (it != exact.end()) opts.exact = &it->second;
                   RunRecord rec = minimize(model, {model.kind, config.g_grid[task.gi]},
                                            task.p, task.theta0, opts);
                   rec.seed = task.seed;
                   rec.init_strategy = task.strategy;
                   fresh[todo[i]] = std::move(rec);
                 });
    // Deterministic merge order regardless of scheduling.
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (fresh[t]) {
        if (sink) sink(*fresh[t]);
        records.push_back(std::move(*fresh[t]));
      } else {
        records.push_back(*prior.at(tasks[t].seed));
      }
    }
  };

  // Stage 1: random restarts.
  {
    std::vector<Task> tasks;
    for (int gi = 0; gi < n_g; ++gi)
      for (int p : config.p_grid)
        for (int restart = 0; restart < config.n_restarts; ++restart) {
          const std::uint64_t seed = task_seed(config.base_seed, gi, p, restart, 1);
          tasks.push_back({gi, p, restart, 1, InitStrategy::Random,
                           random_init(model, p, seed, config.init_bound_scale), seed});
        }
    run_batch(tasks);
  }

  // Stage 2: depth extrapolation, ascending p so lower-depth results feed in.
  if (config.warm_start_depth) {
    for (int p : config.p_grid) {
      std::vector<Task> tasks;
      for (int gi = 0; gi < n_g; ++gi) {
        const std::uint64_t seed = task_seed(config.base_seed, gi, p, 0, 2);
        auto cand = smooth_resample_candidate(records, model, config.g_grid[gi], p);
        tasks.push_back({gi, p, 0, 2, InitStrategy::DepthExtrapolated,
                         cand ? *cand : random_init(model, p, seed, config.init_bound_scale),
                         seed});
      }
      run_batch(tasks);
    }
  }

  // Stage 3: cross-g reuse over all prior records (other g points preferred).
  if (config.warm_start_cross_g) {
    std::vector<Task> tasks;
    for (int gi = 0; gi < n_g; ++gi)
      for (int p : config.p_grid) {
        const HamiltonianParams g{model.kind, config.g_grid[gi]};
        std::vector<RunRecord> others;
        for (const auto& r : records)
          if (r.g != g.value) others.push_back(r);
        auto cand = cross_g_candidate(others, model, g, p);
        if (!cand) cand = cross_g_candidate(records, model, g, p);
        const std::uint64_t seed = task_seed(config.base_seed, gi, p, 0, 3);
        tasks.push_back({gi, p, 0, 3, InitStrategy::CrossG,
                         cand ? *cand : random_init(model, p, seed, config.init_bound_scale),
                         seed});
      }
    run_batch(tasks);
  }

  mark_best(records);
  return records;
}

}  // namespace phasesketch
