#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>

#include "phasesketch/model.hpp"

namespace phasesketch {

/// Dense amplitude vector over n_sites qudits, site 1 least significant.
struct StateVector {
  Eigen::VectorXcd amps;
  int local_dim = 2;
  int n_sites = 0;

  double norm() const { return amps.norm(); }
};

/// HV-ansatz parameters: theta(l, i) for layer l and sub-Hamiltonian i, plus
/// two Bloch angles per chain end for the BBC boundary spins
/// (theta_left, phi_left, theta_right, phi_right).
struct AnsatzParams {
  Eigen::MatrixXd theta;  // p x k
  std::optional<std::array<double, 4>> boundary;

  int depth() const { return static_cast<int>(theta.rows()); }
  int n_subs() const { return static_cast<int>(theta.cols()); }
  int n_params() const { return depth() * n_subs() + (boundary ? 4 : 0); }

  // Flattened layout: theta row by row (layer-major), boundary angles last.
  Eigen::VectorXd flatten() const;
  static AnsatzParams unflatten(const Eigen::VectorXd& x, int p, int k, bool with_boundary);
};

/// Model initial state: |1...1> for the TFIM, the boundary-parameterised AKLT
/// state for the BBC. SSH models are routed to the FLO backend and rejected.
StateVector prepare_initial(const ModelInstance& model,
                            const std::optional<std::array<double, 4>>& boundary = {});

/// Applies the depth-p HV circuit, sub-Hamiltonians in construction order
/// within each layer. Output is normalised.
StateVector run_circuit(const ModelInstance& model, const HamiltonianParams& g,
                        const AnsatzParams& params);

/// Re<psi|H_i|psi>; asserts the imaginary part is negligible.
double expectation(const StateVector& state, const SubHamiltonian& obs);
double expectation(const StateVector& state, const SiteOperator& term);

/// <H_i> for every sub-Hamiltonian, in order.
std::vector<double> sub_expectations(const StateVector& state, const ModelInstance& model);

/// VQE cost and its analytic gradient (adjoint reverse sweep), in the
/// flattened parameter layout of AnsatzParams.
std::pair<double, Eigen::VectorXd> energy_and_gradient(const ModelInstance& model,
                                                       const HamiltonianParams& g,
                                                       const AnsatzParams& params);

// Low-level kernels, shared with the oracles and the analysis module.

/// In-place u on one site (u is d x d, or a diagonal passed as a matrix).
void apply_site_matrix(Eigen::VectorXcd& amps, int local_dim, int site,
                       const Eigen::MatrixXcd& u);

/// In-place u on two sites; combined local index is s_a * d + s_b for
/// support (a, b) in the given order.
void apply_two_site_matrix(Eigen::VectorXcd& amps, int local_dim, int site_a, int site_b,
                           const Eigen::MatrixXcd& u);

/// In-place exp(i * theta * term) via the term's cached eigendecomposition.
void apply_term_exponential(Eigen::VectorXcd& amps, int local_dim, const SiteOperator& term,
                            double theta);

/// In-place exp(i * theta * H_i) as the product of local-term exponentials.
void apply_sub_exponential(Eigen::VectorXcd& amps, int local_dim, const SubHamiltonian& sub,
                           double theta);

/// out += coeff * H_i |in>.
void accumulate_sub_hamiltonian(const Eigen::VectorXcd& in, int local_dim,
                                const SubHamiltonian& sub, double coeff,
                                Eigen::VectorXcd& out);

/// H(g) |in>.
Eigen::VectorXcd apply_hamiltonian(const ModelInstance& model, const HamiltonianParams& g,
                                   const Eigen::VectorXcd& in);

/// Unnormalised open-boundary AKLT state with the given 2-spinor boundary
/// vectors (bond dimension 2 MPS contraction).
Eigen::VectorXcd aklt_unnormalized(int n_sites, const Eigen::Vector2cd& left,
                                   const Eigen::Vector2cd& right);

/// Bloch 2-spinor (cos(t/2), e^{i phi} sin(t/2)) and its angle derivatives.
Eigen::Vector2cd bloch_vector(double theta, double phi);
Eigen::Vector2cd bloch_vector_dtheta(double theta, double phi);
Eigen::Vector2cd bloch_vector_dphi(double theta, double phi);

}  // namespace phasesketch
