#include "phasesketch/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace phasesketch {

namespace {

constexpr double kC1 = 1e-4;
constexpr double kC2 = 0.9;

struct LinePoint {
  double t, f, dg;  // step, value, directional derivative
};

// Cubic-interpolation minimiser of a bracketing interval, clamped to its
// interior (Nocedal & Wright section 3.5).
double interpolate(const LinePoint& a, const LinePoint& b) {
  const double d1 = a.dg + b.dg - 3.0 * (a.f - b.f) / (a.t - b.t);
  double disc = d1 * d1 - a.dg * b.dg;
  double t;
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.t - a.t);
    t = b.t - (b.t - a.t) * (b.dg + d2 - d1) / (b.dg - a.dg + 2.0 * d2);
  } else {
    t = 0.5 * (a.t + b.t);
  }
  const double lo = std::min(a.t, b.t), hi = std::max(a.t, b.t);
  const double margin = 0.1 * (hi - lo);
  return std::clamp(t, lo + margin, hi - margin);
}

struct LineSearchState {
  Eigen::VectorXd x, g;
  double f = 0.0;
  int evals = 0;
};

// Strong-Wolfe line search (Nocedal & Wright algorithms 3.5 + 3.6). Returns
// the accepted step, or 0 on failure; `state` always holds the last evaluation.
double wolfe_search(const Objective& fg, const Eigen::VectorXd& x0, double f0,
                    const Eigen::VectorXd& g0, const Eigen::VectorXd& dir,
                    LineSearchState& state) {
  const double dg0 = g0.dot(dir);
  if (dg0 >= 0.0) return 0.0;

  auto eval = [&](double t) {
    state.x = x0 + t * dir;
    state.f = fg(state.x, state.g);
    ++state.evals;
    return LinePoint{t, state.f, state.g.dot(dir)};
  };

  auto zoom = [&](LinePoint lo, LinePoint hi) -> double {
    for (int i = 0; i < 30; ++i) {
      LinePoint c = eval(interpolate(lo, hi));
      if (c.f > f0 + kC1 * c.t * dg0 || c.f >= lo.f) {
        hi = c;
      } else {
        if (std::abs(c.dg) <= -kC2 * dg0) return c.t;
        if (c.dg * (hi.t - lo.t) >= 0.0) hi = lo;
        lo = c;
      }
      if (std::abs(hi.t - lo.t) < 1e-16 * std::max(1.0, std::abs(lo.t))) break;
    }
    // Fall back to the best sufficient-decrease point found.
    if (lo.f < f0 + kC1 * lo.t * dg0 && lo.t > 0.0) {
      eval(lo.t);
      return lo.t;
    }
    return 0.0;
  };

  LinePoint prev{0.0, f0, dg0};
  double t = 1.0;
  for (int i = 0; i < 25; ++i) {
    LinePoint cur = eval(t);
    if (cur.f > f0 + kC1 * t * dg0 || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur);
    if (std::abs(cur.dg) <= -kC2 * dg0) return t;
    if (cur.dg >= 0.0) return zoom(cur, prev);
    prev = cur;
    t = std::min(2.5 * t, 1e10);
  }
  return 0.0;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& fg, Eigen::VectorXd x0, const LbfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  LbfgsResult best;
  Eigen::VectorXd x = std::move(x0), g(n);
  double f = fg(x, g);
  int evals = 1, iters = 0;
  best.x = x;
  best.f = f;
  best.grad_norm = g.norm();

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y)
  bool restarted = false;

  while (iters < opts.max_iters) {
    if (g.norm() < opts.tol_g) {
      best.converged = true;
      break;
    }

    // Two-loop recursion for d = -H g.
    Eigen::VectorXd d = -g;
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      const auto& [s, y] = history[i];
      alpha[i] = s.dot(d) / y.dot(s);
      d -= alpha[i] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      d *= y.dot(s) / y.dot(y);
    } else {
      d /= std::max(1.0, g.norm());
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto& [s, y] = history[i];
      d += (alpha[i] - y.dot(d) / y.dot(s)) * s;
    }

    LineSearchState ls;
    const double step = wolfe_search(fg, x, f, g, d, ls);
    evals += ls.evals;
    if (step == 0.0) {
      if (!restarted && !history.empty()) {
        history.clear();  // restart from steepest descent once
        restarted = true;
        continue;
      }
      break;  // converged stays false unless the gradient test already passed
    }
    restarted = false;

    Eigen::VectorXd s = ls.x - x;
    Eigen::VectorXd y = ls.g - g;
    const double f_prev = f;
    x = ls.x;
    g = ls.g;
    f = ls.f;
    ++iters;
    if (y.dot(s) > 1e-14 * y.norm() * s.norm()) {
      history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }

    if (f < best.f) {
      best.x = x;
      best.f = f;
      best.grad_norm = g.norm();
    }
    if (std::abs(f_prev - f) < opts.tol_f * std::max(1.0, std::abs(f))) {
      best.converged = true;
      break;
    }
  }

  if (f <= best.f) {
    best.x = x;
    best.f = f;
    best.grad_norm = g.norm();
  }
  best.iterations = iters;
  best.evaluations = evals;
  return best;
}

}  // namespace phasesketch
