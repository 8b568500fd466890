#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "phasesketch/model.hpp"
#include "phasesketch/qudit_sim.hpp"

namespace phasesketch {

/// Pure fermionic Gaussian state as a 2N x 2N real antisymmetric Majorana
/// covariance matrix. Majorana convention: gamma_{2i-1} = c_i + c_i^dag,
/// gamma_{2i} = -i (c_i - c_i^dag), stored 0-based so site i (0-based) owns
/// rows/columns 2i and 2i+1. Vacuum block is [[0, 1], [-1, 0]] and
/// <n_i> = (1 - M(2i, 2i+1)) / 2.
struct MajoranaCovariance {
  Eigen::MatrixXd m;
  int n_modes = 0;

  double antisymmetry_defect() const { return (m + m.transpose()).norm(); }
  double purity_defect() const {
    return (m * m.transpose() - Eigen::MatrixXd::Identity(m.rows(), m.rows())).norm();
  }
};

/// Quadratic Majorana form h (H = (i/4) sum h_jk gamma_j gamma_k + tr(A)/2)
/// together with its particle-conserving single-particle matrix A
/// (H = sum A_ij c_i^dag c_j, A real symmetric). The disjoint local terms of a
/// sub-Hamiltonian make h block-diagonal; blocks are kept for fast evolution.
struct QuadraticForm {
  Eigen::MatrixXd h;                // 2N x 2N antisymmetric
  Eigen::MatrixXd single_particle;  // N x N real symmetric

  struct Block {
    std::vector<int> indices;  // Majorana indices, 0-based
    Eigen::MatrixXd h_local;
    int type = 0;  // blocks of equal h_local share a type id
  };
  std::vector<Block> blocks;
};

/// Majorana form from a real symmetric single-particle matrix.
QuadraticForm quadratic_form_from_single_particle(const Eigen::MatrixXd& a);

/// One form per SSH sub-Hamiltonian, in sub order.
std::vector<QuadraticForm> quadratic_forms(const ModelInstance& model);

/// sum_i c_i(g) h_i.
QuadraticForm combined_form(const std::vector<QuadraticForm>& forms,
                            const std::vector<double>& coeffs);

/// Slater determinant filling the N_e lowest modes of the given
/// single-particle matrix. The SSH spectrum carries an exact zero-mode shell
/// straddling the Fermi level at every coupling (open boundaries and the
/// chiral symmetry of the hopping pattern pin these modes to zero energy), so
/// a degenerate Fermi level is the norm rather than a corner case. The shell
/// is filled deterministically in the eigensolver's column order; when
/// fermi_degeneracy is given it receives the number of equivalent filling
/// choices, C(shell size, filled in shell), clamped to INT_MAX (1 when the
/// Fermi level is unique within degeneracy_tol).
MajoranaCovariance fill_lowest_modes(const Eigen::MatrixXd& single_particle, int n_filled,
                                     double degeneracy_tol = 1e-9,
                                     int* fermi_degeneracy = nullptr);

/// Ground state of the intra-cell + corner-potential part (v-dominated limit).
MajoranaCovariance prepare_trivial_gs(const ModelInstance& model,
                                      const HamiltonianParams& g);

/// M <- R M R^T with R = exp(-theta h), applied blockwise when possible.
void evolve_layer(MajoranaCovariance& state, const QuadraticForm& form, double theta);

/// <H> = (1/4) tr(h M) + tr(A)/2.
double gaussian_energy(const MajoranaCovariance& state, const QuadraticForm& form);

/// <n_i>, site 1-based.
double occupation(const MajoranaCovariance& state, int site);

/// <exp(i pi sum n)> over the given 1-based sites: the Pfaffian of the
/// principal submatrix on their Majorana indices.
double occupation_parity(const MajoranaCovariance& state, const std::vector<int>& sites);

/// Corner occupation order parameter of an L x L SSH model.
double corner_occupation_parity(const MajoranaCovariance& state, int grid_side);

/// |<a|b>|^2 = 2^{-N} |det(M_a + M_b)|^{1/2} for pure Gaussian states.
double gaussian_fidelity(const MajoranaCovariance& a, const MajoranaCovariance& b);

/// Final-state covariance of the depth-p HV circuit on the SSH model.
MajoranaCovariance flo_run_circuit(const ModelInstance& model, const HamiltonianParams& g,
                                   const AnsatzParams& params);

/// VQE cost and analytic gradient on the Gaussian backend (adjoint recursion
/// over the orthogonal conjugations).
std::pair<double, Eigen::VectorXd> flo_energy_and_gradient(const ModelInstance& model,
                                                           const HamiltonianParams& g,
                                                           const AnsatzParams& params);

/// <H_i> per sub-Hamiltonian for a covariance state.
std::vector<double> flo_sub_expectations(const MajoranaCovariance& state,
                                         const std::vector<QuadraticForm>& forms);

}  // namespace phasesketch
