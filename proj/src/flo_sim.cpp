#include "phasesketch/flo_sim.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "phasesketch/pfaffian.hpp"

namespace phasesketch {

namespace {

constexpr double kPurityTol = 1e-6;

void check_pure(const MajoranaCovariance& s, const char* what) {
  if (s.antisymmetry_defect() > kPurityTol || s.purity_defect() > kPurityTol)
    throw std::invalid_argument(std::string(what) + ": covariance is not a pure Gaussian state");
}

// Connected components of the single-particle hopping graph; a component of
// more than two sites disables the blockwise fast path.
std::vector<std::vector<int>> site_components(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a(i, j) != 0.0) parent[find(i)] = find(j);
  std::vector<std::vector<int>> comps(n);
  for (int i = 0; i < n; ++i)
    if (a.row(i).cwiseAbs().sum() > 0.0) comps[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& c : comps)
    if (!c.empty()) out.push_back(std::move(c));
  return out;
}

Eigen::MatrixXd majorana_form(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) {
        h(2 * i, 2 * j + 1) += a(i, j);
        h(2 * i + 1, 2 * j) -= a(i, j);
      }
  return h;
}

Eigen::MatrixXd block_exponential(const Eigen::MatrixXd& h_local, double theta) {
  if (h_local.rows() == 2) {
    // exp of [[0, a], [-a, 0]] is a rotation.
    const double ang = -theta * h_local(0, 1);
    Eigen::MatrixXd r(2, 2);
    r << std::cos(ang), std::sin(ang), -std::sin(ang), std::cos(ang);
    return r;
  }
  return (-theta * h_local).exp();
}

// M <- R M R^T for a block-diagonal orthogonal R given per block.
void conjugate_blockwise(Eigen::MatrixXd& m, const std::vector<QuadraticForm::Block>& blocks,
                         const std::vector<Eigen::MatrixXd>& rot_by_type) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd rows(4, n);
  for (const auto& b : blocks) {
    const auto& r = rot_by_type[b.type];
    const int bs = static_cast<int>(b.indices.size());
    for (int i = 0; i < bs; ++i) rows.row(i) = m.row(b.indices[i]);
    for (int i = 0; i < bs; ++i) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
      for (int j = 0; j < bs; ++j) acc += r(i, j) * rows.row(j);
      m.row(b.indices[i]) = acc;
    }
  }
  Eigen::MatrixXd cols(n, 4);
  for (const auto& b : blocks) {
    const auto& r = rot_by_type[b.type];
    const int bs = static_cast<int>(b.indices.size());
    for (int i = 0; i < bs; ++i) cols.col(i) = m.col(b.indices[i]);
    for (int i = 0; i < bs; ++i) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < bs; ++j) acc += r(i, j) * cols.col(j);
      m.col(b.indices[i]) = acc;
    }
  }
}

std::vector<Eigen::MatrixXd> block_rotations(const QuadraticForm& form, double theta) {
  int n_types = 0;
  for (const auto& b : form.blocks) n_types = std::max(n_types, b.type + 1);
  std::vector<Eigen::MatrixXd> rots(n_types);
  for (const auto& b : form.blocks)
    if (rots[b.type].size() == 0) rots[b.type] = block_exponential(b.h_local, theta);
  return rots;
}

// X = M h - h M with h applied blockwise.
Eigen::MatrixXd commutator_with_form(const Eigen::MatrixXd& m, const QuadraticForm& form) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  if (!form.blocks.empty()) {
    for (const auto& b : form.blocks) {
      const int bs = static_cast<int>(b.indices.size());
      // x -= h M : rows
      for (int i = 0; i < bs; ++i)
        for (int j = 0; j < bs; ++j)
          if (b.h_local(i, j) != 0.0)
            x.row(b.indices[i]) -= b.h_local(i, j) * m.row(b.indices[j]);
      // x += M h : columns
      for (int j = 0; j < bs; ++j)
        for (int i = 0; i < bs; ++i)
          if (b.h_local(i, j) != 0.0)
            x.col(b.indices[j]) += b.h_local(i, j) * m.col(b.indices[i]);
    }
    return x;
  }
  x.noalias() = m * form.h;
  x.noalias() -= form.h * m;
  return x;
}

}  // namespace

QuadraticForm quadratic_form_from_single_particle(const Eigen::MatrixXd& a) {
  if ((a - a.transpose()).norm() > 1e-12)
    throw std::invalid_argument("single-particle matrix must be symmetric");
  QuadraticForm form;
  form.single_particle = a;
  form.h = majorana_form(a);
  auto comps = site_components(a);
  bool small = true;
  for (const auto& c : comps)
    if (c.size() > 2) {
      small = false;
      break;
    }
  if (small) {
    std::vector<Eigen::MatrixXd> reps;
    for (const auto& c : comps) {
      QuadraticForm::Block b;
      for (int site : c) {
        b.indices.push_back(2 * site);
        b.indices.push_back(2 * site + 1);
      }
      const int bs = static_cast<int>(b.indices.size());
      b.h_local.resize(bs, bs);
      for (int i = 0; i < bs; ++i)
        for (int j = 0; j < bs; ++j) b.h_local(i, j) = form.h(b.indices[i], b.indices[j]);
      b.type = -1;
      for (std::size_t t = 0; t < reps.size(); ++t)
        if (reps[t].rows() == bs && (reps[t] - b.h_local).norm() < 1e-14) {
          b.type = static_cast<int>(t);
          break;
        }
      if (b.type < 0) {
        b.type = static_cast<int>(reps.size());
        reps.push_back(b.h_local);
      }
      form.blocks.push_back(std::move(b));
    }
  }
  return form;
}

std::vector<QuadraticForm> quadratic_forms(const ModelInstance& model) {
  if (model.kind != ModelKind::Ssh2d)
    throw std::invalid_argument("quadratic forms are defined for the SSH model");
  const int n = model.lattice.n_sites;
  std::vector<QuadraticForm> forms;
  forms.reserve(model.n_subs());
  for (const auto& sub : model.subs) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& term : sub.terms) {
      if (term.kind == OperatorKind::Hopping) {
        const int i = term.support[0] - 1, j = term.support[1] - 1;
        a(i, j) += 1.0;
        a(j, i) += 1.0;
      } else if (term.kind == OperatorKind::Number) {
        const int i = term.support[0] - 1;
        a(i, i) += term.matrix(1, 1).real();
      } else {
        throw std::invalid_argument("non-quadratic term in an SSH sub-Hamiltonian");
      }
    }
    forms.push_back(quadratic_form_from_single_particle(a));
  }
  return forms;
}

QuadraticForm combined_form(const std::vector<QuadraticForm>& forms,
                            const std::vector<double>& coeffs) {
  if (forms.size() != coeffs.size())
    throw std::invalid_argument("coefficient count does not match form count");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(forms[0].single_particle.rows(),
                                            forms[0].single_particle.cols());
  for (std::size_t i = 0; i < forms.size(); ++i) a += coeffs[i] * forms[i].single_particle;
  return quadratic_form_from_single_particle(a);
}

MajoranaCovariance fill_lowest_modes(const Eigen::MatrixXd& a, int n_filled,
                                     double degeneracy_tol, int* fermi_degeneracy) {
  const int n = static_cast<int>(a.rows());
  if (n_filled < 0 || n_filled > n) throw std::invalid_argument("invalid filling");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (fermi_degeneracy) {
    *fermi_degeneracy = 1;
    if (n_filled > 0 && n_filled < n &&
        es.eigenvalues()[n_filled] - es.eigenvalues()[n_filled - 1] < degeneracy_tol) {
      // Degenerate shell around the Fermi level: count modes clustered with
      // the Fermi pair and how many of them end up filled.
      int lo = n_filled - 1, hi = n_filled;
      while (lo > 0 && es.eigenvalues()[lo] - es.eigenvalues()[lo - 1] < degeneracy_tol) --lo;
      while (hi + 1 < n && es.eigenvalues()[hi + 1] - es.eigenvalues()[hi] < degeneracy_tol)
        ++hi;
      const int shell = hi - lo + 1;
      const int filled = n_filled - lo;
      double choices = 1.0;
      for (int i = 1; i <= filled; ++i)
        choices *= static_cast<double>(shell - filled + i) / static_cast<double>(i);
      *fermi_degeneracy = choices < static_cast<double>(INT_MAX)
                              ? static_cast<int>(std::lround(choices))
                              : INT_MAX;
    }
  }
  const Eigen::MatrixXd u = es.eigenvectors().leftCols(n_filled);
  const Eigen::MatrixXd c = u * u.transpose();  // <c_i^dag c_j>, real symmetric
  MajoranaCovariance state;
  state.n_modes = n;
  state.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = (i == j ? 1.0 : 0.0) - 2.0 * c(i, j);
      state.m(2 * i, 2 * j + 1) = v;
      state.m(2 * j + 1, 2 * i) = -v;
    }
  return state;
}

MajoranaCovariance prepare_trivial_gs(const ModelInstance& model, const HamiltonianParams& g) {
  auto forms = quadratic_forms(model);
  auto c = coefficients(model, g);
  // Intra-cell hoppings plus the corner potentials.
  Eigen::MatrixXd a = c[0] * forms[0].single_particle + c[1] * forms[1].single_particle +
                      c[4] * forms[4].single_particle;
  return fill_lowest_modes(a, model.n_electrons);
}

void evolve_layer(MajoranaCovariance& state, const QuadraticForm& form, double theta) {
  if (!form.blocks.empty()) {
    conjugate_blockwise(state.m, form.blocks, block_rotations(form, theta));
    return;
  }
  const Eigen::MatrixXd r = (-theta * form.h).exp();
  state.m = r * state.m * r.transpose();
}

double gaussian_energy(const MajoranaCovariance& state, const QuadraticForm& form) {
  double tr_hm = 0.0;
  if (!form.blocks.empty()) {
    for (const auto& b : form.blocks) {
      const int bs = static_cast<int>(b.indices.size());
      for (int i = 0; i < bs; ++i)
        for (int j = 0; j < bs; ++j)
          if (b.h_local(i, j) != 0.0)
            tr_hm += b.h_local(i, j) * state.m(b.indices[j], b.indices[i]);
    }
  } else {
    tr_hm = (form.h.transpose().cwiseProduct(state.m)).sum();
  }
  return 0.25 * tr_hm + 0.5 * form.single_particle.trace();
}

double occupation(const MajoranaCovariance& state, int site) {
  if (site < 1 || site > state.n_modes) throw std::invalid_argument("invalid site index");
  return 0.5 * (1.0 - state.m(2 * (site - 1), 2 * (site - 1) + 1));
}

double occupation_parity(const MajoranaCovariance& state, const std::vector<int>& sites) {
  std::vector<int> idx;
  for (int s : sites) {
    if (s < 1 || s > state.n_modes) throw std::invalid_argument("invalid site index");
    idx.push_back(2 * (s - 1));
    idx.push_back(2 * (s - 1) + 1);
  }
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = state.m(idx[i], idx[j]);
  return pfaffian(std::move(sub));
}

double corner_occupation_parity(const MajoranaCovariance& state, int grid_side) {
  const int l = grid_side;
  return occupation_parity(state, {1, l, l * l - l + 1, l * l});
}

double gaussian_fidelity(const MajoranaCovariance& a, const MajoranaCovariance& b) {
  check_pure(a, "gaussian_fidelity");
  check_pure(b, "gaussian_fidelity");
  const int n = a.n_modes;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.m + b.m);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < lu.matrixLU().rows(); ++i) {
    const double piv = std::abs(lu.matrixLU()(i, i));
    if (piv < 1e-280) return 0.0;
    log_det += std::log(piv);
  }
  const double fid = std::exp(0.5 * log_det - n * std::log(2.0));
  return std::min(1.0, fid);
}

namespace {

void validate_ssh_params(const ModelInstance& model, const AnsatzParams& params) {
  if (model.kind != ModelKind::Ssh2d)
    throw std::invalid_argument("the FLO backend handles only the SSH model");
  if (params.boundary)
    throw std::invalid_argument("SSH circuits take no boundary angles");
  if (params.depth() > 0 && params.n_subs() != model.n_subs())
    throw std::invalid_argument("theta column count does not match the model splitting");
}

}  // namespace

MajoranaCovariance flo_run_circuit(const ModelInstance& model, const HamiltonianParams& g,
                                   const AnsatzParams& params) {
  validate_ssh_params(model, params);
  auto forms = quadratic_forms(model);
  MajoranaCovariance state = prepare_trivial_gs(model, g);
  for (int l = 0; l < params.depth(); ++l)
    for (int i = 0; i < model.n_subs(); ++i)
      evolve_layer(state, forms[i], params.theta(l, i));
  return state;
}

std::pair<double, Eigen::VectorXd> flo_energy_and_gradient(const ModelInstance& model,
                                                           const HamiltonianParams& g,
                                                           const AnsatzParams& params) {
  validate_ssh_params(model, params);
  const auto c = coefficients(model, g);
  const auto forms = quadratic_forms(model);
  const QuadraticForm hc = combined_form(forms, c);
  const int p = params.depth();
  const int k = model.n_subs();

  MajoranaCovariance state = prepare_trivial_gs(model, g);
  std::vector<Eigen::MatrixXd> trail;  // covariance after every gate
  trail.reserve(p * k);
  for (int l = 0; l < p; ++l)
    for (int i = 0; i < k; ++i) {
      evolve_layer(state, forms[i], params.theta(l, i));
      trail.push_back(state.m);
    }

  const double energy = gaussian_energy(state, hc);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p * k);

  // dE = (1/4) tr(h_c dM); propagate the cost adjoint G through M -> R M R^T.
  Eigen::MatrixXd adj = 0.25 * hc.h.transpose();
  for (int t = p * k - 1; t >= 0; --t) {
    const int l = t / k, i = t % k;
    const Eigen::MatrixXd x = commutator_with_form(trail[t], forms[i]);
    grad[t] = adj.cwiseProduct(x).sum();
    if (t > 0) {
      // G <- R^T G R
      if (!forms[i].blocks.empty()) {
        auto rots = block_rotations(forms[i], params.theta(l, i));
        for (auto& r : rots) r.transposeInPlace();
        conjugate_blockwise(adj, forms[i].blocks, rots);
      } else {
        const Eigen::MatrixXd r = (-params.theta(l, i) * forms[i].h).exp();
        adj = r.transpose() * adj * r;
      }
    }
  }
  return {energy, grad};
}

std::vector<double> flo_sub_expectations(const MajoranaCovariance& state,
                                         const std::vector<QuadraticForm>& forms) {
  std::vector<double> vals;
  vals.reserve(forms.size());
  for (const auto& f : forms) vals.push_back(gaussian_energy(state, f));
  return vals;
}

}  // namespace phasesketch
