#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace phasesketch {

enum class ModelKind { Tfim1d, Tfim2d, Bbc, Ssh2d };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

enum class OperatorKind { PauliZ, PauliX, PauliZZ, SpinLinear, SpinQuadratic, Hopping, Number };

/// One Hermitian term acting on one or two sites. Site indices are 1-based.
struct SiteOperator {
  OperatorKind kind;
  std::vector<int> support;
  Eigen::MatrixXcd matrix;  // d^|support| x d^|support|

  // Eigendecomposition cached at construction, used for exact exponentials.
  Eigen::MatrixXcd evecs;
  Eigen::VectorXd evals;
  bool is_diagonal = false;

  SiteOperator(OperatorKind kind, std::vector<int> support, Eigen::MatrixXcd matrix);
};

/// A group of mutually commuting local terms, exponentiated with a single angle.
struct SubHamiltonian {
  std::vector<SiteOperator> terms;
  std::string label;
};

/// The single free parameter of each model: h_x for the TFIM, phi for the
/// bilinear-biquadratic chain, r = v/w for the 2D SSH model.
struct HamiltonianParams {
  ModelKind kind;
  double value = 0.0;
};

enum class InitialStateRecipe { AllDownProduct, Aklt, TrivialSlater };

struct Lattice {
  int n_sites = 0;
  int local_dim = 2;
  int lx = 0;  // chain length, or grid width
  int ly = 1;  // grid height (1 for chains)
  bool is_2d = false;
};

struct ModelInstance {
  ModelKind kind;
  Lattice lattice;
  std::vector<SubHamiltonian> subs;
  InitialStateRecipe initial_state;

  // Fixed conventions baked in at construction.
  double coupling_j = -1.0;  // TFIM only
  double bias_hz = 0.0;      // TFIM: 1/|V|^2
  double onsite_mu = 0.0;    // SSH: 1/L^2
  int n_electrons = 0;       // SSH: L^2/2 (half filling)

  int n_subs() const { return static_cast<int>(subs.size()); }
  std::size_t dim() const;
};

inline constexpr std::size_t kDefaultStatevectorCap = std::size_t{1} << 20;

/// Builds a model with the documented splitting into commuting groups.
/// `size` is the chain length L for 1D models and the grid side L for 2D ones.
ModelInstance build_model(ModelKind kind, int size,
                          std::size_t statevector_cap = kDefaultStatevectorCap);

/// c_i(g) in sub-Hamiltonian order. Throws on a variant mismatch.
std::vector<double> coefficients(const ModelInstance& model, const HamiltonianParams& g);

struct SplittingReport {
  bool ok = true;
  std::string diagnostics;
};

/// Checks that every pair of terms inside each group commutes, by explicit
/// commutators on the joined supports.
SplittingReport validate_splitting(const ModelInstance& model);
SplittingReport validate_group(const SubHamiltonian& group, int local_dim);

/// Dense assembly of sub-Hamiltonian i on the full Hilbert space. Spin models
/// only; desk-scale sizes.
Eigen::MatrixXcd assemble_dense_sub(const ModelInstance& model, int sub_index);

/// Dense assembly of H(g) = sum_i c_i(g) H_i.
Eigen::MatrixXcd assemble_dense(const ModelInstance& model, const HamiltonianParams& g);

/// All lattice edges of a model's interaction groups, used by partition tests.
std::vector<std::pair<int, int>> lattice_edges(const ModelInstance& model);

// Local operator matrices (d = 2 resp. 3).
Eigen::MatrixXcd pauli_x();
Eigen::MatrixXcd pauli_z();
Eigen::MatrixXcd spin1_sx();
Eigen::MatrixXcd spin1_sy();
Eigen::MatrixXcd spin1_sz();
Eigen::MatrixXcd spin1_exchange();            // S_i . S_j on two sites (9x9)
Eigen::MatrixXcd spin1_exchange_squared();    // (S_i . S_j)^2

}  // namespace phasesketch
