#pragma once

// Brute-force Jordan-Wigner statevector oracle for small fermionic lattices
// (N <= ~16 sites). Everything here is written against the occupation-number
// basis directly -- no covariance matrices, no shared code with the library's
// Gaussian backend -- so it can serve as an independent reference for
// energies, occupations, corner parities, overlaps and circuit evolution.
//
// Basis convention: bit (i-1) of the index holds n_i (site 1 least
// significant), matching the library's qudit ordering. The Jordan-Wigner
// string runs over lower-numbered sites, so
//   c_i^dag |..n_i=0..> = (-1)^{sum_{j<i} n_j} |..n_i=1..>.

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace jw {

using Complex = std::complex<double>;
using State = Eigen::VectorXcd;

inline State vacuum(int n_sites) {
  State psi = State::Zero(std::size_t{1} << n_sites);
  psi[0] = 1.0;
  return psi;
}

inline int parity_below(std::uint32_t x, int bit) {
  const std::uint32_t mask = (std::uint32_t{1} << bit) - 1;
  return std::popcount(x & mask) & 1;
}

// psi <- (sum_i amp[i] c_i^dag) psi for one orbital given by its site
// amplitudes (0-based site index i corresponds to bit i).
inline State apply_creation_mode(const State& psi, const Eigen::VectorXcd& amp) {
  State out = State::Zero(psi.size());
  const int n = static_cast<int>(amp.size());
  for (std::uint32_t x = 0; x < psi.size(); ++x) {
    if (psi[x] == Complex{0.0, 0.0}) continue;
    for (int i = 0; i < n; ++i) {
      if (amp[i] == Complex{0.0, 0.0}) continue;
      const std::uint32_t bit = std::uint32_t{1} << i;
      if (x & bit) continue;
      const double sign = parity_below(x, i) ? -1.0 : 1.0;
      out[x | bit] += sign * amp[i] * psi[x];
    }
  }
  return out;
}

// Slater determinant filling the given orthonormal columns.
inline State slater(int n_sites, const Eigen::MatrixXd& filled_columns) {
  State psi = vacuum(n_sites);
  for (Eigen::Index m = 0; m < filled_columns.cols(); ++m)
    psi = apply_creation_mode(psi, filled_columns.col(m).cast<Complex>());
  const double nrm = psi.norm();
  if (nrm < 1e-12) throw std::runtime_error("jw::slater: columns are not independent");
  return psi / nrm;
}

// out = (sum_ij A_ij c_i^dag c_j) psi for real symmetric A.
inline State apply_quadratic(const Eigen::MatrixXd& a, const State& psi) {
  const int n = static_cast<int>(a.rows());
  State out = State::Zero(psi.size());
  for (std::uint32_t x = 0; x < psi.size(); ++x) {
    if (psi[x] == Complex{0.0, 0.0}) continue;
    double diag = 0.0;
    for (int i = 0; i < n; ++i)
      if (x & (std::uint32_t{1} << i)) diag += a(i, i);
    out[x] += diag * psi[x];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (a(i, j) == 0.0) continue;
        const std::uint32_t bi = std::uint32_t{1} << i, bj = std::uint32_t{1} << j;
        const bool ni = x & bi, nj = x & bj;
        if (ni == nj) continue;
        // hop between i and j; phase counts occupied sites strictly between
        const std::uint32_t between = ((bj - 1) & ~((bi << 1) - 1));
        const double sign = (std::popcount(x & between) & 1) ? -1.0 : 1.0;
        out[x ^ bi ^ bj] += sign * a(i, j) * psi[x];
      }
  }
  return out;
}

// psi <- exp(+i theta h) psi for a single hopping term
// h = t (c_i^dag c_j + c_j^dag c_i), 0-based sites.
inline void evolve_hop(State& psi, int i, int j, double t, double theta) {
  if (i > j) std::swap(i, j);
  const std::uint32_t bi = std::uint32_t{1} << i, bj = std::uint32_t{1} << j;
  const std::uint32_t between = ((bj - 1) & ~((bi << 1) - 1));
  const double c = std::cos(theta * t);
  const Complex is{0.0, std::sin(theta * t)};
  for (std::uint32_t x = 0; x < psi.size(); ++x) {
    if ((x & bi) || !(x & bj)) continue;  // visit each pair once, from (0,1)
    const std::uint32_t y = x ^ bi ^ bj;
    const double sign = (std::popcount(x & between) & 1) ? -1.0 : 1.0;
    const Complex a = psi[x], b = psi[y];
    psi[x] = c * a + sign * is * b;
    psi[y] = c * b + sign * is * a;
  }
}

// psi <- exp(+i theta eps n_i) psi, 0-based site.
inline void evolve_number(State& psi, int i, double eps, double theta) {
  const std::uint32_t bi = std::uint32_t{1} << i;
  const Complex phase = std::exp(Complex{0.0, theta * eps});
  for (std::uint32_t x = 0; x < psi.size(); ++x)
    if (x & bi) psi[x] *= phase;
}

inline double occupation(const State& psi, int i) {  // 0-based
  const std::uint32_t bi = std::uint32_t{1} << i;
  double n = 0.0;
  for (std::uint32_t x = 0; x < psi.size(); ++x)
    if (x & bi) n += std::norm(psi[x]);
  return n;
}

// <exp(i pi sum_{s in sites} n_s)>, 0-based sites.
inline double occupation_parity(const State& psi, const std::vector<int>& sites) {
  std::uint32_t mask = 0;
  for (int s : sites) mask |= std::uint32_t{1} << s;
  double val = 0.0;
  for (std::uint32_t x = 0; x < psi.size(); ++x)
    val += ((std::popcount(x & mask) & 1) ? -1.0 : 1.0) * std::norm(psi[x]);
  return val;
}

inline double energy(const Eigen::MatrixXd& a, const State& psi) {
  const Complex e = psi.dot(apply_quadratic(a, psi));
  return e.real();
}

inline double overlap_sq(const State& a, const State& b) { return std::norm(a.dot(b)); }

// Lowest eigenvalue of x -> apply(x) by Lanczos with full reorthogonalisation.
// dim must be small enough to hold a handful of dense vectors.
template <typename Apply>
double lowest_eigenvalue(const Apply& apply, Eigen::Index dim, int max_iters = 300) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  State q(dim);
  for (Eigen::Index i = 0; i < dim; ++i) q[i] = Complex{gauss(rng), gauss(rng)};
  q /= q.norm();
  std::vector<State> basis{q};
  std::vector<double> alpha, beta;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    State w = apply(basis.back());
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    for (const auto& v : basis) w -= v.dot(w) * v;
    for (const auto& v : basis) w -= v.dot(w) * v;
    const double b = w.norm();
    const Eigen::Index m = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    const double theta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues()[0];
    if (std::abs(theta - best) < 1e-13 * std::max(1.0, std::abs(theta)) && it > 10)
      return theta;
    best = theta;
    if (b < 1e-13) return best;  // invariant subspace exhausted
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return best;
}

}  // namespace jw
