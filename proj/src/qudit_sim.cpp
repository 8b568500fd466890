#include "phasesketch/qudit_sim.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace phasesketch {

namespace {

using Complex = std::complex<double>;

std::size_t stride_of(int site, int d) {
  std::size_t s = 1;
  for (int i = 1; i < site; ++i) s *= static_cast<std::size_t>(d);
  return s;
}

// Iterates all index groups for one site; op(base, stride) sees the d
// amplitudes at base + k * stride.
template <typename Op>
void for_each_site_group(std::size_t dim, int d, int site, Op&& op) {
  const std::size_t stride = stride_of(site, d);
  const std::size_t block = stride * static_cast<std::size_t>(d);
  for (std::size_t base = 0; base < dim; base += block)
    for (std::size_t lo = 0; lo < stride; ++lo) op(base + lo, stride);
}

template <typename Op>
void for_each_pair_group(std::size_t dim, int d, int site_a, int site_b, Op&& op) {
  const int lo_site = std::min(site_a, site_b);
  const int hi_site = std::max(site_a, site_b);
  const std::size_t s_lo = stride_of(lo_site, d);
  const std::size_t s_hi = stride_of(hi_site, d);
  const std::size_t sa = stride_of(site_a, d);
  const std::size_t sb = stride_of(site_b, d);
  const std::size_t block_lo = s_lo * d;
  const std::size_t block_hi = s_hi * d;
  for (std::size_t top = 0; top < dim; top += block_hi)
    for (std::size_t mid = top; mid < top + s_hi; mid += block_lo)
      for (std::size_t low = mid; low < mid + s_lo; ++low) op(low, sa, sb);
}

}  // namespace

Eigen::VectorXd AnsatzParams::flatten() const {
  Eigen::VectorXd x(n_params());
  int idx = 0;
  for (int l = 0; l < depth(); ++l)
    for (int i = 0; i < n_subs(); ++i) x[idx++] = theta(l, i);
  if (boundary)
    for (double a : *boundary) x[idx++] = a;
  return x;
}

AnsatzParams AnsatzParams::unflatten(const Eigen::VectorXd& x, int p, int k,
                                     bool with_boundary) {
  const int expected = p * k + (with_boundary ? 4 : 0);
  if (x.size() != expected)
    throw std::invalid_argument("parameter vector length does not match p*k layout");
  AnsatzParams params;
  params.theta.resize(p, k);
  int idx = 0;
  for (int l = 0; l < p; ++l)
    for (int i = 0; i < k; ++i) params.theta(l, i) = x[idx++];
  if (with_boundary) {
    std::array<double, 4> b{};
    for (double& a : b) a = x[idx++];
    params.boundary = b;
  }
  return params;
}

void apply_site_matrix(Eigen::VectorXcd& amps, int d, int site, const Eigen::MatrixXcd& u) {
  const std::size_t dim = amps.size();
  std::array<Complex, 9> urm{};  // row-major copy, d <= 3
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) urm[r * d + c] = u(r, c);
  Complex* a = amps.data();
  std::array<Complex, 3> scratch{};
  for_each_site_group(dim, d, site, [&](std::size_t base, std::size_t stride) {
    for (int k = 0; k < d; ++k) scratch[k] = a[base + k * stride];
    for (int r = 0; r < d; ++r) {
      Complex acc = 0.0;
      for (int c = 0; c < d; ++c) acc += urm[r * d + c] * scratch[c];
      a[base + r * stride] = acc;
    }
  });
}

void apply_two_site_matrix(Eigen::VectorXcd& amps, int d, int site_a, int site_b,
                           const Eigen::MatrixXcd& u) {
  const std::size_t dim = amps.size();
  const int ld = d * d;
  std::array<Complex, 81> urm{};
  for (int r = 0; r < ld; ++r)
    for (int c = 0; c < ld; ++c) urm[r * ld + c] = u(r, c);
  Complex* a = amps.data();
  std::array<Complex, 9> scratch{};
  for_each_pair_group(dim, d, site_a, site_b, [&](std::size_t base, std::size_t sa,
                                                  std::size_t sb) {
    for (int va = 0; va < d; ++va)
      for (int vb = 0; vb < d; ++vb) scratch[va * d + vb] = a[base + va * sa + vb * sb];
    for (int r = 0; r < ld; ++r) {
      Complex acc = 0.0;
      const Complex* row = &urm[r * ld];
      for (int c = 0; c < ld; ++c) acc += row[c] * scratch[c];
      a[base + (r / d) * sa + (r % d) * sb] = acc;
    }
  });
}

void apply_term_exponential(Eigen::VectorXcd& amps, int d, const SiteOperator& term,
                            double theta) {
  const std::size_t dim = amps.size();
  const int ld = static_cast<int>(term.matrix.rows());
  if (term.is_diagonal) {
    std::array<Complex, 9> phases{};
    for (int v = 0; v < ld; ++v)
      phases[v] = std::exp(Complex(0.0, theta * term.evals[v]));
    Complex* a = amps.data();
    if (term.support.size() == 1) {
      for_each_site_group(dim, d, term.support[0], [&](std::size_t base, std::size_t stride) {
        for (int k = 0; k < d; ++k) a[base + k * stride] *= phases[k];
      });
    } else {
      for_each_pair_group(dim, d, term.support[0], term.support[1],
                          [&](std::size_t base, std::size_t sa, std::size_t sb) {
                            for (int va = 0; va < d; ++va)
                              for (int vb = 0; vb < d; ++vb)
                                a[base + va * sa + vb * sb] *= phases[va * d + vb];
                          });
    }
    return;
  }
  Eigen::VectorXcd phases(ld);
  for (int v = 0; v < ld; ++v) phases[v] = std::exp(Complex(0.0, theta * term.evals[v]));
  const Eigen::MatrixXcd u = term.evecs * phases.asDiagonal() * term.evecs.adjoint();
  if (term.support.size() == 1)
    apply_site_matrix(amps, d, term.support[0], u);
  else
    apply_two_site_matrix(amps, d, term.support[0], term.support[1], u);
}

void apply_sub_exponential(Eigen::VectorXcd& amps, int d, const SubHamiltonian& sub,
                           double theta) {
  for (const auto& term : sub.terms) apply_term_exponential(amps, d, term, theta);
}

void accumulate_sub_hamiltonian(const Eigen::VectorXcd& in, int d, const SubHamiltonian& sub,
                                double coeff, Eigen::VectorXcd& out) {
  const std::size_t dim = in.size();
  const Complex* src = in.data();
  Complex* dst = out.data();
  for (const auto& term : sub.terms) {
    const int ld = static_cast<int>(term.matrix.rows());
    if (term.is_diagonal) {
      std::array<double, 9> diag{};
      for (int v = 0; v < ld; ++v) diag[v] = coeff * term.evals[v];
      if (term.support.size() == 1) {
        for_each_site_group(dim, d, term.support[0],
                            [&](std::size_t base, std::size_t stride) {
                              for (int k = 0; k < d; ++k)
                                dst[base + k * stride] += diag[k] * src[base + k * stride];
                            });
      } else {
        for_each_pair_group(dim, d, term.support[0], term.support[1],
                            [&](std::size_t base, std::size_t sa, std::size_t sb) {
                              for (int va = 0; va < d; ++va)
                                for (int vb = 0; vb < d; ++vb) {
                                  const std::size_t idx = base + va * sa + vb * sb;
                                  dst[idx] += diag[va * d + vb] * src[idx];
                                }
                            });
      }
      continue;
    }
    std::array<Complex, 81> mrm{};
    for (int r = 0; r < ld; ++r)
      for (int c = 0; c < ld; ++c) mrm[r * ld + c] = coeff * term.matrix(r, c);
    std::array<Complex, 9> scratch{};
    if (term.support.size() == 1) {
      for_each_site_group(dim, d, term.support[0], [&](std::size_t base, std::size_t stride) {
        for (int k = 0; k < d; ++k) scratch[k] = src[base + k * stride];
        for (int r = 0; r < d; ++r) {
          Complex acc = 0.0;
          for (int c = 0; c < d; ++c) acc += mrm[r * d + c] * scratch[c];
          dst[base + r * stride] += acc;
        }
      });
    } else {
      for_each_pair_group(dim, d, term.support[0], term.support[1],
                          [&](std::size_t base, std::size_t sa, std::size_t sb) {
                            for (int va = 0; va < d; ++va)
                              for (int vb = 0; vb < d; ++vb)
                                scratch[va * d + vb] = src[base + va * sa + vb * sb];
                            for (int r = 0; r < ld; ++r) {
                              Complex acc = 0.0;
                              const Complex* row = &mrm[r * ld];
                              for (int c = 0; c < ld; ++c) acc += row[c] * scratch[c];
                              dst[base + (r / d) * sa + (r % d) * sb] += acc;
                            }
                          });
    }
  }
}

Eigen::VectorXcd apply_hamiltonian(const ModelInstance& model, const HamiltonianParams& g,
                                   const Eigen::VectorXcd& in) {
  auto c = coefficients(model, g);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (int i = 0; i < model.n_subs(); ++i)
    accumulate_sub_hamiltonian(in, model.lattice.local_dim, model.subs[i], c[i], out);
  return out;
}

StateVector prepare_initial(const ModelInstance& model,
                            const std::optional<std::array<double, 4>>& boundary) {
  if (model.initial_state == InitialStateRecipe::TrivialSlater)
    throw std::invalid_argument("SSH models are simulated by the FLO backend");
  StateVector sv;
  sv.local_dim = model.lattice.local_dim;
  sv.n_sites = model.lattice.n_sites;
  const std::size_t dim = model.dim();
  if (model.initial_state == InitialStateRecipe::AllDownProduct) {
    sv.amps = Eigen::VectorXcd::Zero(dim);
    sv.amps[dim - 1] = 1.0;  // |1...1>
    return sv;
  }
  // AKLT
  if (!boundary)
    throw std::invalid_argument("the BBC initial state needs four boundary angles");
  const auto& b = *boundary;
  Eigen::VectorXcd amps =
      aklt_unnormalized(model.lattice.n_sites, bloch_vector(b[0], b[1]),
                        bloch_vector(b[2], b[3]));
  const double nrm = amps.norm();
  if (nrm < 1e-14) throw std::invalid_argument("degenerate AKLT boundary vectors");
  sv.amps = amps / nrm;
  return sv;
}

StateVector run_circuit(const ModelInstance& model, const HamiltonianParams& g,
                        const AnsatzParams& params) {
  auto c = coefficients(model, g);
  (void)c;  // validates the variant
  if (params.depth() > 0 && params.n_subs() != model.n_subs())
    throw std::invalid_argument("theta column count does not match the model splitting");
  const bool needs_boundary = model.initial_state == InitialStateRecipe::Aklt;
  if (needs_boundary != params.boundary.has_value())
    throw std::invalid_argument("boundary angles must be present exactly for the BBC");
  StateVector sv = prepare_initial(model, params.boundary);
  for (int l = 0; l < params.depth(); ++l)
    for (int i = 0; i < model.n_subs(); ++i)
      apply_sub_exponential(sv.amps, sv.local_dim, model.subs[i], params.theta(l, i));
  sv.amps /= sv.amps.norm();
  return sv;
}

double expectation(const StateVector& state, const SiteOperator& term) {
  SubHamiltonian single{{term}, ""};
  return expectation(state, single);
}

double expectation(const StateVector& state, const SubHamiltonian& obs) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.amps.size());
  accumulate_sub_hamiltonian(state.amps, state.local_dim, obs, 1.0, out);
  const Complex val = state.amps.dot(out);
  if (std::abs(val.imag()) > 1e-10)
    throw std::runtime_error("expectation value has a non-negligible imaginary part");
  return val.real();
}

std::vector<double> sub_expectations(const StateVector& state, const ModelInstance& model) {
  std::vector<double> vals(model.n_subs());
  for (int i = 0; i < model.n_subs(); ++i) vals[i] = expectation(state, model.subs[i]);
  return vals;
}

std::pair<double, Eigen::VectorXd> energy_and_gradient(const ModelInstance& model,
                                                       const HamiltonianParams& g,
                                                       const AnsatzParams& params) {
  const auto c = coefficients(model, g);
  const int p = params.depth();
  const int k = model.n_subs();
  const int d = model.lattice.local_dim;
  const bool with_boundary = model.initial_state == InitialStateRecipe::Aklt;
  if (with_boundary != params.boundary.has_value())
    throw std::invalid_argument("boundary angles must be present exactly for the BBC");

  // Unnormalised initial state (needed for boundary-angle derivatives).
  Eigen::VectorXcd raw_init;
  double raw_norm = 1.0;
  StateVector sv;
  if (with_boundary) {
    const auto& b = *params.boundary;
    raw_init = aklt_unnormalized(model.lattice.n_sites, bloch_vector(b[0], b[1]),
                                 bloch_vector(b[2], b[3]));
    raw_norm = raw_init.norm();
    if (raw_norm < 1e-14) throw std::invalid_argument("degenerate AKLT boundary vectors");
    sv.local_dim = d;
    sv.n_sites = model.lattice.n_sites;
    sv.amps = raw_init / raw_norm;
  } else {
    sv = prepare_initial(model, {});
  }

  // Forward pass.
  for (int l = 0; l < p; ++l)
    for (int i = 0; i < k; ++i)
      apply_sub_exponential(sv.amps, d, model.subs[i], params.theta(l, i));

  // phi = H |psi_T>, E = <psi_T | phi>.
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(sv.amps.size());
  for (int i = 0; i < k; ++i)
    accumulate_sub_hamiltonian(sv.amps, d, model.subs[i], c[i], phi);
  const double energy = sv.amps.dot(phi).real();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p * k + (with_boundary ? 4 : 0));

  // Reverse sweep: at step (l, i) psi holds the state just after that gate and
  // phi holds the cost adjoint propagated back to the same point.
  Eigen::VectorXcd hpsi(sv.amps.size());
  for (int l = p - 1; l >= 0; --l) {
    for (int i = k - 1; i >= 0; --i) {
      hpsi.setZero();
      accumulate_sub_hamiltonian(sv.amps, d, model.subs[i], 1.0, hpsi);
      // d/dtheta pulls down i H_i: dE = 2 Re(i <phi|H_i|psi>).
      grad[l * k + i] = -2.0 * phi.dot(hpsi).imag();
      apply_sub_exponential(sv.amps, d, model.subs[i], -params.theta(l, i));
      apply_sub_exponential(phi, d, model.subs[i], -params.theta(l, i));
    }
  }

  if (with_boundary) {
    // psi is back to the (normalised) initial state; phi = U^dag H U psi_0.
    const auto& b = *params.boundary;
    const Eigen::Vector2cd bl = bloch_vector(b[0], b[1]);
    const Eigen::Vector2cd br = bloch_vector(b[2], b[3]);
    const std::array<Eigen::VectorXcd, 4> deriv_states = {
        aklt_unnormalized(model.lattice.n_sites, bloch_vector_dtheta(b[0], b[1]), br),
        aklt_unnormalized(model.lattice.n_sites, bloch_vector_dphi(b[0], b[1]), br),
        aklt_unnormalized(model.lattice.n_sites, bl, bloch_vector_dtheta(b[2], b[3])),
        aklt_unnormalized(model.lattice.n_sites, bl, bloch_vector_dphi(b[2], b[3]))};
    const Eigen::VectorXcd residual = phi - energy * sv.amps;
    for (int a = 0; a < 4; ++a)
      grad[p * k + a] = 2.0 * deriv_states[a].dot(residual).real() / raw_norm;
  }

  return {energy, grad};
}

Eigen::Vector2cd bloch_vector(double theta, double phi) {
  return {Complex(std::cos(theta / 2.0), 0.0),
          std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0)};
}

Eigen::Vector2cd bloch_vector_dtheta(double theta, double phi) {
  return {Complex(-0.5 * std::sin(theta / 2.0), 0.0),
          std::exp(Complex(0.0, phi)) * 0.5 * std::cos(theta / 2.0)};
}

Eigen::Vector2cd bloch_vector_dphi(double theta, double phi) {
  return {Complex(0.0, 0.0),
          Complex(0.0, 1.0) * std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0)};
}

}  // namespace phasesketch
