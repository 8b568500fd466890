#include "phasesketch/model.hpp"

#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace phasesketch {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd hopping_matrix() {
  // c_i^dag c_j + c_j^dag c_i restricted to the two-site occupation basis
  // |n_i n_j>, combined index n_i * 2 + n_j. Used for commutation checks and
  // group bookkeeping; the FLO backend works from the single-particle form.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  return m;
}

Eigen::MatrixXcd number_matrix(double sign) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(1, 1) = sign;
  return m;
}

int site_id(int row, int col, int l) { return (row - 1) * l + col; }  // 1-based, row-major

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Tfim1d: return "tfim-1d";
    case ModelKind::Tfim2d: return "tfim-2d";
    case ModelKind::Bbc: return "bbc";
    case ModelKind::Ssh2d: return "ssh-2d";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "tfim-1d") return ModelKind::Tfim1d;
  if (name == "tfim-2d") return ModelKind::Tfim2d;
  if (name == "bbc") return ModelKind::Bbc;
  if (name == "ssh-2d") return ModelKind::Ssh2d;
  throw std::invalid_argument("unknown model kind: " + name);
}

SiteOperator::SiteOperator(OperatorKind k, std::vector<int> sup, Eigen::MatrixXcd mat)
    : kind(k), support(std::move(sup)), matrix(std::move(mat)) {
  if (support.empty() || support.size() > 2)
    throw std::invalid_argument("SiteOperator support must have 1 or 2 sites");
  if (support.size() == 2 && support[0] == support[1])
    throw std::invalid_argument("SiteOperator support sites must be distinct");
  if ((matrix - matrix.adjoint()).norm() > 1e-10)
    throw std::invalid_argument("SiteOperator matrix must be Hermitian");
  is_diagonal = true;
  for (Eigen::Index i = 0; i < matrix.rows() && is_diagonal; ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      if (i != j && std::abs(matrix(i, j)) > 1e-14) {
        is_diagonal = false;
        break;
      }
  if (is_diagonal) {
    evals = matrix.diagonal().real();
    evecs = Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix);
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  }
}

std::size_t ModelInstance::dim() const {
  std::size_t d = 1;
  for (int i = 0; i < lattice.n_sites; ++i) d *= static_cast<std::size_t>(lattice.local_dim);
  return d;
}

Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Eigen::MatrixXcd pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd spin1_sx() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd m(3, 3);
  m << 0, s, 0, s, 0, s, 0, s, 0;
  return m;
}

Eigen::MatrixXcd spin1_sy() {
  const Complex i(0.0, 1.0);
  const Complex s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 1) = -i * s;
  m(1, 0) = i * s;
  m(1, 2) = -i * s;
  m(2, 1) = i * s;
  return m;
}

Eigen::MatrixXcd spin1_sz() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}

Eigen::MatrixXcd spin1_exchange() {
  return kron(spin1_sx(), spin1_sx()) + kron(spin1_sy(), spin1_sy()) +
         kron(spin1_sz(), spin1_sz());
}

Eigen::MatrixXcd spin1_exchange_squared() {
  Eigen::MatrixXcd e = spin1_exchange();
  return e * e;
}

namespace {

ModelInstance build_tfim_1d(int l, std::size_t cap) {
  if (l < 2) throw std::invalid_argument("tfim-1d needs at least 2 sites");
  if (l >= 64 || (std::size_t{1} << l) > cap)
    throw std::invalid_argument("tfim-1d lattice exceeds the statevector cap");
  ModelInstance m;
  m.kind = ModelKind::Tfim1d;
  m.lattice = {l, 2, l, 1, false};
  m.initial_state = InitialStateRecipe::AllDownProduct;
  m.bias_hz = 1.0 / (static_cast<double>(l) * l);

  const Eigen::MatrixXcd zz = kron(pauli_z(), pauli_z());
  SubHamiltonian odd{{}, "odd ZZ edges"}, even{{}, "even ZZ edges"};
  for (int i = 1; i < l; ++i) {
    auto& group = (i % 2 == 1) ? odd : even;
    group.terms.emplace_back(OperatorKind::PauliZZ, std::vector<int>{i, i + 1}, zz);
  }
  SubHamiltonian xf{{}, "transverse field"}, zf{{}, "bias field"};
  for (int i = 1; i <= l; ++i) {
    xf.terms.emplace_back(OperatorKind::PauliX, std::vector<int>{i}, pauli_x());
    zf.terms.emplace_back(OperatorKind::PauliZ, std::vector<int>{i}, pauli_z());
  }
  m.subs = {std::move(odd), std::move(even), std::move(xf), std::move(zf)};
  return m;
}

ModelInstance build_tfim_2d(int l, std::size_t cap) {
  if (l < 2) throw std::invalid_argument("tfim-2d needs at least a 2x2 grid");
  const int n = l * l;
  if (n >= 64 || (std::size_t{1} << n) > cap)
    throw std::invalid_argument("tfim-2d lattice exceeds the statevector cap");
  ModelInstance m;
  m.kind = ModelKind::Tfim2d;
  m.lattice = {n, 2, l, l, true};
  m.initial_state = InitialStateRecipe::AllDownProduct;
  m.bias_hz = 1.0 / (static_cast<double>(n) * n);

  // Open grid, proper 4-colouring: horizontal edges by column parity of the
  // left endpoint, vertical edges by row parity of the top endpoint.
  const Eigen::MatrixXcd zz = kron(pauli_z(), pauli_z());
  SubHamiltonian ho{{}, "horizontal ZZ edges, odd columns"};
  SubHamiltonian he{{}, "horizontal ZZ edges, even columns"};
  SubHamiltonian vo{{}, "vertical ZZ edges, odd rows"};
  SubHamiltonian ve{{}, "vertical ZZ edges, even rows"};
  for (int r = 1; r <= l; ++r)
    for (int c = 1; c < l; ++c) {
      auto& g = (c % 2 == 1) ? ho : he;
      g.terms.emplace_back(OperatorKind::PauliZZ,
                           std::vector<int>{site_id(r, c, l), site_id(r, c + 1, l)}, zz);
    }
  for (int r = 1; r < l; ++r)
    for (int c = 1; c <= l; ++c) {
      auto& g = (r % 2 == 1) ? vo : ve;
      g.terms.emplace_back(OperatorKind::PauliZZ,
                           std::vector<int>{site_id(r, c, l), site_id(r + 1, c, l)}, zz);
    }
  SubHamiltonian xf{{}, "transverse field"}, zf{{}, "bias field"};
  for (int i = 1; i <= n; ++i) {
    xf.terms.emplace_back(OperatorKind::PauliX, std::vector<int>{i}, pauli_x());
    zf.terms.emplace_back(OperatorKind::PauliZ, std::vector<int>{i}, pauli_z());
  }
  m.subs = {std::move(ho), std::move(he), std::move(vo), std::move(ve), std::move(xf),
            std::move(zf)};
  return m;
}

ModelInstance build_bbc(int l, std::size_t cap) {
  if (l < 2) throw std::invalid_argument("bbc needs at least 2 sites");
  std::size_t dim = 1;
  for (int i = 0; i < l; ++i) {
    dim *= 3;
    if (dim > cap) throw std::invalid_argument("bbc lattice exceeds the statevector cap");
  }
  ModelInstance m;
  m.kind = ModelKind::Bbc;
  m.lattice = {l, 3, l, 1, false};
  m.initial_state = InitialStateRecipe::Aklt;

  const Eigen::MatrixXcd lin = spin1_exchange();
  const Eigen::MatrixXcd quad = spin1_exchange_squared();
  SubHamiltonian lo{{}, "linear interaction, odd edges"};
  SubHamiltonian le{{}, "linear interaction, even edges"};
  SubHamiltonian qo{{}, "quadratic interaction, odd edges"};
  SubHamiltonian qe{{}, "quadratic interaction, even edges"};
  for (int i = 1; i < l; ++i) {
    std::vector<int> sup{i, i + 1};
    if (i % 2 == 1) {
      lo.terms.emplace_back(OperatorKind::SpinLinear, sup, lin);
      qo.terms.emplace_back(OperatorKind::SpinQuadratic, sup, quad);
    } else {
      le.terms.emplace_back(OperatorKind::SpinLinear, sup, lin);
      qe.terms.emplace_back(OperatorKind::SpinQuadratic, sup, quad);
    }
  }
  m.subs = {std::move(lo), std::move(le), std::move(qo), std::move(qe)};
  return m;
}

ModelInstance build_ssh_2d(int l) {
  if (l < 2 || l % 2 != 0)
    throw std::invalid_argument("ssh-2d needs an even grid side (whole 2x2 unit cells)");
  ModelInstance m;
  m.kind = ModelKind::Ssh2d;
  m.lattice = {l * l, 2, l, l, true};
  m.initial_state = InitialStateRecipe::TrivialSlater;
  m.onsite_mu = 1.0 / (static_cast<double>(l) * l);
  m.n_electrons = l * l / 2;

  const Eigen::MatrixXcd hop = hopping_matrix();
  SubHamiltonian ih{{}, "intra-cell horizontal hopping"};
  SubHamiltonian iv{{}, "intra-cell vertical hopping"};
  SubHamiltonian eh{{}, "inter-cell horizontal hopping"};
  SubHamiltonian ev{{}, "inter-cell vertical hopping"};
  for (int r = 1; r <= l; ++r)
    for (int c = 1; c < l; ++c) {
      auto& g = (c % 2 == 1) ? ih : eh;
      g.terms.emplace_back(OperatorKind::Hopping,
                           std::vector<int>{site_id(r, c, l), site_id(r, c + 1, l)}, hop);
    }
  for (int r = 1; r < l; ++r)
    for (int c = 1; c <= l; ++c) {
      auto& g = (r % 2 == 1) ? iv : ev;
      g.terms.emplace_back(OperatorKind::Hopping,
                           std::vector<int>{site_id(r, c, l), site_id(r + 1, c, l)}, hop);
    }
  // Corner potentials: -mu on the top-left and bottom-right corner, +mu on the
  // top-right and bottom-left one (row-major numbering, site 1 top-left).
  SubHamiltonian corners{{}, "corner potentials"};
  corners.terms.emplace_back(OperatorKind::Number, std::vector<int>{1}, number_matrix(-1.0));
  corners.terms.emplace_back(OperatorKind::Number, std::vector<int>{l}, number_matrix(1.0));
  corners.terms.emplace_back(OperatorKind::Number, std::vector<int>{l * l - l + 1},
                             number_matrix(1.0));
  corners.terms.emplace_back(OperatorKind::Number, std::vector<int>{l * l},
                             number_matrix(-1.0));
  m.subs = {std::move(ih), std::move(iv), std::move(eh), std::move(ev), std::move(corners)};
  return m;
}

}  // namespace

ModelInstance build_model(ModelKind kind, int size, std::size_t cap) {
  switch (kind) {
    case ModelKind::Tfim1d: return build_tfim_1d(size, cap);
    case ModelKind::Tfim2d: return build_tfim_2d(size, cap);
    case ModelKind::Bbc: return build_bbc(size, cap);
    case ModelKind::Ssh2d: return build_ssh_2d(size);
  }
  throw std::logic_error("unknown model kind");
}

std::vector<double> coefficients(const ModelInstance& model, const HamiltonianParams& g) {
  if (g.kind != model.kind)
    throw std::invalid_argument("Hamiltonian parameter variant does not match the model");
  switch (model.kind) {
    case ModelKind::Tfim1d: {
      if (g.value < 0) throw std::invalid_argument("h_x must be >= 0");
      return {model.coupling_j, model.coupling_j, g.value, model.bias_hz};
    }
    case ModelKind::Tfim2d: {
      if (g.value < 0) throw std::invalid_argument("h_x must be >= 0");
      return {model.coupling_j, model.coupling_j, model.coupling_j, model.coupling_j,
              g.value, model.bias_hz};
    }
    case ModelKind::Bbc: {
      if (g.value < -M_PI || g.value >= M_PI)
        throw std::invalid_argument("phi must lie in [-pi, pi)");
      return {std::cos(g.value), std::cos(g.value), std::sin(g.value), std::sin(g.value)};
    }
    case ModelKind::Ssh2d: {
      if (g.value <= 0) throw std::invalid_argument("v/w must be > 0");
      const double v = 2.0 * g.value / (1.0 + g.value);
      const double w = 2.0 / (1.0 + g.value);
      return {-v, -v, -w, -w, model.onsite_mu};
    }
  }
  throw std::logic_error("unknown model kind");
}

namespace {

// Embeds `op` (acting on `sup` with the joined-support site list `sites`)
// into the product space over `sites`, first listed site most significant.
Eigen::MatrixXcd embed(const SiteOperator& op, const std::vector<int>& sites, int d) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < sites.size(); ++i) dim *= d;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<int> pos(op.support.size());
  for (std::size_t i = 0; i < op.support.size(); ++i) {
    auto it = std::find(sites.begin(), sites.end(), op.support[i]);
    pos[i] = static_cast<int>(it - sites.begin());
  }
  const int ns = static_cast<int>(sites.size());
  auto digits = [&](std::size_t idx) {
    std::vector<int> ds(ns);
    for (int i = ns - 1; i >= 0; --i) {
      ds[i] = static_cast<int>(idx % d);
      idx /= d;
    }
    return ds;  // ds[0] most significant
  };
  for (std::size_t row = 0; row < dim; ++row) {
    auto rd = digits(row);
    for (std::size_t col = 0; col < dim; ++col) {
      auto cd = digits(col);
      bool same_elsewhere = true;
      for (int i = 0; i < ns; ++i) {
        if (std::find(pos.begin(), pos.end(), i) != pos.end()) continue;
        if (rd[i] != cd[i]) {
          same_elsewhere = false;
          break;
        }
      }
      if (!same_elsewhere) continue;
      int r_local = 0, c_local = 0;
      for (std::size_t i = 0; i < pos.size(); ++i) {
        r_local = r_local * d + rd[pos[i]];
        c_local = c_local * d + cd[pos[i]];
      }
      full(row, col) = op.matrix(r_local, c_local);
    }
  }
  return full;
}

}  // namespace

SplittingReport validate_group(const SubHamiltonian& group, int d) {
  for (std::size_t a = 0; a < group.terms.size(); ++a) {
    for (std::size_t b = a + 1; b < group.terms.size(); ++b) {
      const auto& ta = group.terms[a];
      const auto& tb = group.terms[b];
      std::set<int> shared;
      for (int s : ta.support)
        if (std::find(tb.support.begin(), tb.support.end(), s) != tb.support.end())
          shared.insert(s);
      if (shared.empty()) continue;  // disjoint supports commute
      std::vector<int> joined = ta.support;
      for (int s : tb.support)
        if (std::find(joined.begin(), joined.end(), s) == joined.end()) joined.push_back(s);
      Eigen::MatrixXcd ma = embed(ta, joined, d);
      Eigen::MatrixXcd mb = embed(tb, joined, d);
      if ((ma * mb - mb * ma).norm() > 1e-10) {
        std::ostringstream oss;
        oss << "group '" << group.label << "': terms " << a << " and " << b
            << " do not commute";
        return {false, oss.str()};
      }
    }
  }
  return {true, ""};
}

SplittingReport validate_splitting(const ModelInstance& model) {
  for (const auto& group : model.subs) {
    auto rep = validate_group(group, model.lattice.local_dim);
    if (!rep.ok) return rep;
  }
  return {true, ""};
}

Eigen::MatrixXcd assemble_dense_sub(const ModelInstance& model, int sub_index) {
  if (model.kind == ModelKind::Ssh2d)
    throw std::invalid_argument("dense assembly is for spin models; SSH uses the FLO backend");
  const int d = model.lattice.local_dim;
  const int n = model.lattice.n_sites;
  const std::size_t dim = model.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : model.subs.at(sub_index).terms) {
    // Strides: site i has stride d^(i-1), site 1 least significant.
    std::vector<std::size_t> strides(term.support.size());
    for (std::size_t i = 0; i < term.support.size(); ++i) {
      std::size_t s = 1;
      for (int k = 1; k < term.support[i]; ++k) s *= d;
      strides[i] = s;
    }
    const int ldim = static_cast<int>(term.matrix.rows());
    const int nsup = static_cast<int>(term.support.size());
    for (std::size_t base = 0; base < dim; ++base) {
      // Process only indices whose supported digits are all zero.
      bool zero = true;
      for (auto s : strides)
        if ((base / s) % d != 0) {
          zero = false;
          break;
        }
      if (!zero) continue;
      std::vector<std::size_t> idx(ldim);
      for (int v = 0; v < ldim; ++v) {
        // local combined index: first support site most significant
        std::size_t off = 0;
        int rem = v;
        for (int i = nsup - 1; i >= 0; --i) {
          off += static_cast<std::size_t>(rem % d) * strides[i];
          rem /= d;
        }
        idx[v] = base + off;
      }
      for (int r = 0; r < ldim; ++r)
        for (int c = 0; c < ldim; ++c) h(idx[r], idx[c]) += term.matrix(r, c);
    }
  }
  (void)n;
  return h;
}

Eigen::MatrixXcd assemble_dense(const ModelInstance& model, const HamiltonianParams& g) {
  auto c = coefficients(model, g);
  const std::size_t dim = model.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < model.n_subs(); ++i) h += c[i] * assemble_dense_sub(model, i);
  return h;
}

std::vector<std::pair<int, int>> lattice_edges(const ModelInstance& model) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& group : model.subs)
    for (const auto& term : group.terms)
      if (term.support.size() == 2) {
        int a = term.support[0], b = term.support[1];
        edges.emplace_back(std::min(a, b), std::max(a, b));
      }
  return edges;
}

}  // namespace phasesketch
