#pragma once

// Brute-force joint state of a two-mode cavity and a register of
// V-configuration atoms, on the product basis (atom levels) x (Fock states
// with n0 + n1 <= n_max). Work is in units hbar = 1.

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "symq/rng.hpp"
#include "symq/symstate.hpp"

namespace symq {

enum class AtomLevel : int { g = 0, e0 = 1, e1 = 2 };

enum class MeasurementOutcome { ground, excited };

struct FockLabel {
  int n0 = 0;
  int n1 = 0;

  int total() const { return n0 + n1; }
  friend bool operator==(const FockLabel&, const FockLabel&) = default;
};

struct CouplingParams {
  double gamma = 1.0;

  /// Throws std::invalid_argument unless gamma > 0.
  static CouplingParams make(double gamma);
};

/// Index map for (AtomLevel^atom_count) x {FockLabel : n0 + n1 <= n_max}.
///
/// Flat index = atom_config * fock_dimension() + fock_index, where
/// atom_config reads the levels as base-3 digits with atom 0 most
/// significant, and Fock labels are ordered by total photon number, then n0.
class JointSpace {
 public:
  JointSpace(int atom_count, int n_max);

  int atom_count() const { return atom_count_; }
  int n_max() const { return n_max_; }
  Eigen::Index dimension() const { return atom_configs_ * fock_dimension(); }
  Eigen::Index fock_dimension() const { return static_cast<Eigen::Index>(fock_labels_.size()); }

  Eigen::Index index_of(std::span<const AtomLevel> atoms, FockLabel fock) const;
  /// -1 when the label lies outside the truncation.
  Eigen::Index fock_index(FockLabel fock) const;

  FockLabel fock_of(Eigen::Index index) const;
  AtomLevel atom_level(Eigen::Index index, int atom) const;
  std::vector<AtomLevel> atoms_of(Eigen::Index index) const;

  /// Atoms out of g plus photons in both modes.
  int excitation_number(Eigen::Index index) const;

  /// Index reached by replacing the level of one atom; same Fock label.
  Eigen::Index with_atom_level(Eigen::Index index, int atom, AtomLevel level) const;
  /// -1 when the new label falls outside the truncation.
  Eigen::Index with_fock(Eigen::Index index, FockLabel fock) const;

 private:
  int atom_count_;
  int n_max_;
  Eigen::Index atom_configs_;
  std::vector<FockLabel> fock_labels_;
  std::vector<Eigen::Index> fock_lookup_;  // (n_max+1)^2 table, -1 if truncated
  std::vector<Eigen::Index> pow3_;
};

using SpacePtr = std::shared_ptr<const JointSpace>;

SpacePtr make_space(int atom_count, int n_max);

/// Complex amplitudes over a JointSpace. Not necessarily normalized:
/// ladder operators return unnormalized vectors.
class JointPureState {
 public:
  JointPureState(SpacePtr space, Eigen::VectorXcd amplitudes);

  static JointPureState basis(SpacePtr space, std::span<const AtomLevel> atoms, FockLabel fock);
  /// All atoms in g, cavity in |n0, n1>.
  static JointPureState ground_atoms(SpacePtr space, FockLabel fock);

  const JointSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  Complex amplitude(std::span<const AtomLevel> atoms, FockLabel fock) const;
  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-10) const;
  JointPureState normalized() const;

 private:
  SpacePtr space_;
  Eigen::VectorXcd amplitudes_;
};

/// Inner product <a|b>. Throws on mismatched spaces.
Complex overlap(const JointPureState& a, const JointPureState& b);

/// |<a|b>|^2 / (|a|^2 |b|^2).
double fidelity(const JointPureState& a, const JointPureState& b);

/// Ladder action of a_0 (mode 0) or a_1 (mode 1). Vacuum components vanish.
JointPureState annihilate(const JointPureState& state, int mode);

/// Applies (|e0><g| a_0 + |e1><g| a_1) to one atom: absorption of one photon
/// into the atom's excited doublet. Atoms not in g are annihilated.
JointPureState absorb_photon(const JointPureState& state, int atom_index);

using Hamiltonian = Eigen::SparseMatrix<double>;

/// gamma (a_0 |e0><g| + a_1 |e1><g| + h.c.) for one atom, over the flat index.
/// Real symmetric. Throws std::out_of_range for a bad atom index.
Hamiltonian interaction_hamiltonian(const JointSpace& space, int atom_index,
                                    const CouplingParams& params);

/// Exact exp(-i H t) for a Hermitian H that conserves excitation number.
///
/// H is split into connected blocks of its sparsity graph; each block is
/// diagonalized at construction, so apply() is const and thread-safe.
class Propagator {
 public:
  /// Throws std::invalid_argument if H is not square on the space, not
  /// symmetric, or couples different excitation numbers.
  Propagator(SpacePtr space, Hamiltonian hamiltonian);

  JointPureState apply(const JointPureState& state, double t) const;

 private:
  struct Block {
    std::vector<Eigen::Index> indices;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
  };

  SpacePtr space_;
  std::vector<Block> blocks_;
};

/// One-shot evolution; prefer Propagator when t varies over one H.
JointPureState evolve(const JointPureState& state, const Hamiltonian& hamiltonian, double t);

struct AtomMeasurement {
  MeasurementOutcome outcome = MeasurementOutcome::ground;
  double probability = 0;
  JointPureState post_state;
};

/// Projects one atom onto g (ground) or onto span{e0, e1} (excited; the
/// degenerate doublet is not resolved). The post state is renormalized.
/// Throws std::domain_error if the branch has zero probability.
AtomMeasurement project_atom_energy(const JointPureState& state, int atom_index,
                                    MeasurementOutcome outcome);

/// Samples the energy outcome with its Born probability.
AtomMeasurement measure_atom_energy(const JointPureState& state, int atom_index, Rng& rng);

/// 3x3 reduced density matrix of one atom in the (g, e0, e1) basis.
Eigen::Matrix3cd reduced_atom_state(const JointPureState& state, int atom_index);

/// Probability mass of the state on each excitation number 0..max.
Eigen::VectorXd excitation_distribution(const JointPureState& state);

/// |S(j, n-j)> with n_atoms qubits on atoms 0..n_atoms-1 (levels e0/e1), the
/// other n - n_atoms qubits in the cavity, remaining atoms in g. Built from
/// the subset decomposition of the symmetric state.
JointPureState tilde_state(SpacePtr space, SymLabel label, int n_atoms);

/// Same state built as the normalized product of absorption operators
/// prod_k (|e0>^{A_k} a_0 + |e1>^{A_k} a_1) / sqrt(n - k + 1) on |j, n-j>.
JointPureState tilde_state_by_absorption(SpacePtr space, SymLabel label, int n_atoms);

/// Atom register (first n atoms) in the given symmetric state, cavity in
/// vacuum, other atoms in g.
JointPureState atoms_in_symmetric_state(SpacePtr space, const SymmetricStateVector& state);

}  // namespace symq
