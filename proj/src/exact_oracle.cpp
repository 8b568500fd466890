#include "phasesketch/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>

namespace phasesketch {

namespace {

using Complex = std::complex<double>;
using Matvec = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

constexpr Eigen::Index kDenseDimCap = 1200;

void project_out(Eigen::VectorXcd& v, const std::vector<Eigen::VectorXcd>& basis) {
  for (const auto& b : basis) v -= b.dot(v) * b;
}

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXcd vec;
};

// Lowest eigenpair of the operator restricted to the complement of `deflate`.
// Lanczos with full reorthogonalisation; restarts on (rare) breakdown.
RitzPair lowest_eigenpair(const Matvec& apply, Eigen::Index dim,
                          const std::vector<Eigen::VectorXcd>& deflate,
                          std::mt19937_64& rng) {
  const int max_steps =
      static_cast<int>(std::min<Eigen::Index>(dim - static_cast<Eigen::Index>(deflate.size()), 450));
  std::normal_distribution<double> gauss;

  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  Eigen::VectorXcd v(dim), w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  project_out(v, deflate);
  project_out(v, deflate);
  v.normalize();

  auto tridiag_lowest = [&](Eigen::VectorXd* coeffs) {
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (coeffs) *coeffs = es.eigenvectors().col(0);
    return es.eigenvalues()[0];
  };

  double last_beta = 0.0;
  for (int j = 0; j < max_steps; ++j) {
    basis.push_back(v);
    apply(v, w);
    project_out(w, deflate);
    alpha.push_back(w.dot(v).real());
    // Full reorthogonalisation, twice for stability.
    project_out(w, basis);
    project_out(w, basis);
    last_beta = w.norm();

    bool check = last_beta < 1e-13 || j + 1 == max_steps || (j >= 10 && j % 5 == 0);
    if (check) {
      Eigen::VectorXd s;
      const double theta = tridiag_lowest(&s);
      const double residual = last_beta * std::abs(s[s.size() - 1]);
      if (residual < 1e-11 * std::max(1.0, std::abs(theta)) || last_beta < 1e-13 ||
          j + 1 == max_steps) {
        RitzPair out;
        out.value = theta;
        out.vec = Eigen::VectorXcd::Zero(dim);
        for (int i = 0; i < static_cast<int>(basis.size()); ++i) out.vec += s[i] * basis[i];
        project_out(out.vec, deflate);
        const double n = out.vec.norm();
        if (n < 1e-8) throw std::runtime_error("Lanczos breakdown: lost the Ritz vector");
        out.vec /= n;
        return out;
      }
    }
    if (last_beta < 1e-13) break;
    beta.push_back(last_beta);
    v = w / last_beta;
  }
  throw std::runtime_error("Lanczos failed to converge");
}

GroundSpace spin_ground_space_dense(const ModelInstance& model, const HamiltonianParams& g,
                                    double tol) {
  const Eigen::MatrixXcd h = assemble_dense(model, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  GroundSpace gs;
  gs.energy = es.eigenvalues()[0];
  Eigen::Index i = 0;
  while (i < h.rows() && es.eigenvalues()[i] <= gs.energy + tol) {
    gs.states.push_back(es.eigenvectors().col(i));
    ++i;
  }
  gs.degeneracy = static_cast<int>(gs.states.size());
  gs.gap = i < h.rows() ? es.eigenvalues()[i] - gs.energy : 0.0;
  return gs;
}

GroundSpace spin_ground_space_lanczos(const ModelInstance& model, const HamiltonianParams& g,
                                      double tol) {
  const auto coeffs = coefficients(model, g);
  const int d = model.lattice.local_dim;
  const Eigen::Index dim = static_cast<Eigen::Index>(model.dim());
  Matvec apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    out.setZero(dim);
    for (int i = 0; i < model.n_subs(); ++i)
      accumulate_sub_hamiltonian(in, d, model.subs[i], coeffs[i], out);
  };

  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  GroundSpace gs;
  auto first = lowest_eigenpair(apply, dim, {}, rng);
  gs.energy = first.value;
  gs.states.push_back(std::move(first.vec));
  while (static_cast<Eigen::Index>(gs.states.size()) < dim) {
    auto next = lowest_eigenpair(apply, dim, gs.states, rng);
    if (next.value <= gs.energy + tol) {
      gs.states.push_back(std::move(next.vec));
      continue;
    }
    gs.gap = next.value - gs.energy;
    break;
  }
  gs.degeneracy = static_cast<int>(gs.states.size());
  return gs;
}

GroundSpace ssh_ground_space(const ModelInstance& model, const HamiltonianParams& g,
                             double tol) {
  const auto forms = quadratic_forms(model);
  const auto coeffs = coefficients(model, g);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(model.lattice.n_sites, model.lattice.n_sites);
  for (int i = 0; i < model.n_subs(); ++i) a += coeffs[i] * forms[i].single_particle;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const int ne = model.n_electrons;

  GroundSpace gs;
  gs.energy = es.eigenvalues().head(ne).sum();
  int fermi_degeneracy = 1;
  gs.slater_states.push_back(fill_lowest_modes(a, ne, tol, &fermi_degeneracy));
  gs.degeneracy = fermi_degeneracy;
  gs.gap = std::max(0.0, es.eigenvalues()[ne] - es.eigenvalues()[ne - 1]);
  return gs;
}

}  // namespace

GroundSpace ground_space(const ModelInstance& model, const HamiltonianParams& g,
                         double degeneracy_tol) {
  if (model.kind == ModelKind::Ssh2d) return ssh_ground_space(model, g, degeneracy_tol);
  if (static_cast<Eigen::Index>(model.dim()) <= kDenseDimCap)
    return spin_ground_space_dense(model, g, degeneracy_tol);
  return spin_ground_space_lanczos(model, g, degeneracy_tol);
}

double ground_space_fidelity(const StateVector& state, const GroundSpace& gs) {
  if (gs.states.empty()) throw std::invalid_argument("ground space holds no statevectors");
  if (gs.states.front().size() != state.amps.size())
    throw std::invalid_argument("dimension mismatch");
  double f = 0.0;
  for (const auto& psi0 : gs.states) f += std::norm(psi0.dot(state.amps));
  return f;
}

double ground_space_fidelity(const MajoranaCovariance& state, const GroundSpace& gs) {
  if (gs.slater_states.empty())
    throw std::invalid_argument("ground space holds no Gaussian states");
  double f = 0.0;
  for (const auto& psi0 : gs.slater_states) f += gaussian_fidelity(state, psi0);
  return f;
}

}  // namespace phasesketch
