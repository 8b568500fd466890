#pragma once

#include <Eigen/Dense>
#include <vector>

#include "phasesketch/flo_sim.hpp"
#include "phasesketch/model.hpp"
#include "phasesketch/qudit_sim.hpp"

namespace phasesketch {

/// Exact ground manifold: orthonormal statevectors for spin models, a Slater
/// determinant (as a covariance matrix) for the SSH model.
struct GroundSpace {
  double energy = 0.0;
  std::vector<Eigen::VectorXcd> states;
  std::vector<MajoranaCovariance> slater_states;
  int degeneracy = 0;
  double gap = 0.0;  // to the first level above the degenerate manifold
};

/// Exact ground space. Spin models: dense diagonalisation at small dimension,
/// otherwise deflated Lanczos with full reorthogonalisation. SSH: full
/// diagonalisation of the single-particle matrix, filling the N_e lowest modes.
/// The open-boundary SSH spectrum has an exact zero-mode shell straddling the
/// Fermi level at every coupling, so a single deterministic representative
/// Slater state is returned and `degeneracy` counts the equivalent filling
/// choices; energy and the corner order parameter do not depend on the choice
/// (the zero modes carry no corner weight).
GroundSpace ground_space(const ModelInstance& model, const HamiltonianParams& g,
                         double degeneracy_tol = 1e-8);

/// F = sum over the orthonormal ground set of |<psi_0|psi>|^2.
double ground_space_fidelity(const StateVector& state, const GroundSpace& gs);
double ground_space_fidelity(const MajoranaCovariance& state, const GroundSpace& gs);

}  // namespace phasesketch
