#include "symq/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace symq {
namespace {

void require_atom(const JointSpace& space, int atom_index) {
  if (atom_index < 0 || atom_index >= space.atom_count()) {
    throw std::out_of_range("atom index " + std::to_string(atom_index) + " outside register of " +
                            std::to_string(space.atom_count()));
  }
}

void require_same_space(const JointPureState& a, const JointPureState& b) {
  if (a.space_ptr() != b.space_ptr() &&
      (a.space().atom_count() != b.space().atom_count() ||
       a.space().n_max() != b.space().n_max())) {
    throw std::invalid_argument("states live on different joint spaces");
  }
}

// Union-find over basis indices.
class DisjointSets {
 public:
  explicit DisjointSets(Eigen::Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<Eigen::Index> parent_;
};

// Writes coeff * |register> (x) |fock> into amps, with the register given
// as computational-basis amplitudes over `qubits` atoms (0 -> e0, 1 -> e1).
void add_register_term(Eigen::VectorXcd& amps, const JointSpace& space,
                       const Eigen::VectorXcd& reg, int qubits, FockLabel fock, double coeff) {
  std::vector<AtomLevel> levels(static_cast<std::size_t>(space.atom_count()), AtomLevel::g);
  for (Eigen::Index b = 0; b < reg.size(); ++b) {
    if (reg[b] == Complex{}) continue;
    for (int q = 0; q < qubits; ++q) {
      const bool one = (b >> (qubits - 1 - q)) & 1;
      levels[static_cast<std::size_t>(q)] = one ? AtomLevel::e1 : AtomLevel::e0;
    }
    amps[space.index_of(levels, fock)] += coeff * reg[b];
  }
}

}  // namespace

CouplingParams CouplingParams::make(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("coupling constant gamma must be positive");
  }
  return CouplingParams{gamma};
}

// ---------------------------------------------------------------------------
// JointSpace

JointSpace::JointSpace(int atom_count, int n_max) : atom_count_(atom_count), n_max_(n_max) {
  if (atom_count < 0) throw std::invalid_argument("atom_count must be >= 0");
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  if (atom_count > 12) throw std::length_error("at most 12 atoms in a joint space");
  pow3_.resize(static_cast<std::size_t>(atom_count) + 1);
  pow3_[0] = 1;
  for (int k = 1; k <= atom_count; ++k) pow3_[k] = pow3_[k - 1] * 3;
  atom_configs_ = pow3_[atom_count];

  const auto side = static_cast<std::size_t>(n_max + 1);
  fock_lookup_.assign(side * side, -1);
  for (int s = 0; s <= n_max; ++s) {
    for (int n0 = 0; n0 <= s; ++n0) {
      fock_lookup_[static_cast<std::size_t>(n0) * side + static_cast<std::size_t>(s - n0)] =
          static_cast<Eigen::Index>(fock_labels_.size());
      fock_labels_.push_back(FockLabel{n0, s - n0});
    }
  }
}

Eigen::Index JointSpace::fock_index(FockLabel fock) const {
  if (fock.n0 < 0 || fock.n1 < 0 || fock.total() > n_max_) return -1;
  const auto side = static_cast<std::size_t>(n_max_ + 1);
  return fock_lookup_[static_cast<std::size_t>(fock.n0) * side + static_cast<std::size_t>(fock.n1)];
}

Eigen::Index JointSpace::index_of(std::span<const AtomLevel> atoms, FockLabel fock) const {
  if (static_cast<int>(atoms.size()) != atom_count_) {
    throw std::invalid_argument("atom level tuple has wrong length");
  }
  const Eigen::Index f = fock_index(fock);
  if (f < 0) {
    throw std::out_of_range("Fock label (" + std::to_string(fock.n0) + "," +
                            std::to_string(fock.n1) + ") outside truncation n_max=" +
                            std::to_string(n_max_));
  }
  Eigen::Index config = 0;
  for (AtomLevel level : atoms) config = config * 3 + static_cast<int>(level);
  return config * fock_dimension() + f;
}

FockLabel JointSpace::fock_of(Eigen::Index index) const {
  return fock_labels_[static_cast<std::size_t>(index % fock_dimension())];
}

AtomLevel JointSpace::atom_level(Eigen::Index index, int atom) const {
  const Eigen::Index config = index / fock_dimension();
  return static_cast<AtomLevel>((config / pow3_[atom_count_ - 1 - atom]) % 3);
}

std::vector<AtomLevel> JointSpace::atoms_of(Eigen::Index index) const {
  std::vector<AtomLevel> out(static_cast<std::size_t>(atom_count_));
  for (int a = 0; a < atom_count_; ++a) out[static_cast<std::size_t>(a)] = atom_level(index, a);
  return out;
}

int JointSpace::excitation_number(Eigen::Index index) const {
  int n = fock_of(index).total();
  for (int a = 0; a < atom_count_; ++a) n += atom_level(index, a) != AtomLevel::g ? 1 : 0;
  return n;
}

Eigen::Index JointSpace::with_atom_level(Eigen::Index index, int atom, AtomLevel level) const {
  const Eigen::Index place = pow3_[atom_count_ - 1 - atom] * fock_dimension();
  const auto old = static_cast<Eigen::Index>(atom_level(index, atom));
  return index + (static_cast<Eigen::Index>(level) - old) * place;
}

Eigen::Index JointSpace::with_fock(Eigen::Index index, FockLabel fock) const {
  const Eigen::Index f = fock_index(fock);
  if (f < 0) return -1;
  return (index / fock_dimension()) * fock_dimension() + f;
}

SpacePtr make_space(int atom_count, int n_max) {
  return std::make_shared<const JointSpace>(atom_count, n_max);
}

// ---------------------------------------------------------------------------
// JointPureState

JointPureState::JointPureState(SpacePtr space, Eigen::VectorXcd amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (!space_) throw std::invalid_argument("null joint space");
  if (amplitudes_.size() != space_->dimension()) {
    throw std::invalid_argument("amplitude vector does not match space dimension");
  }
}

JointPureState JointPureState::basis(SpacePtr space, std::span<const AtomLevel> atoms,
                                     FockLabel fock) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space->dimension());
  amps[space->index_of(atoms, fock)] = 1.0;
  return JointPureState(std::move(space), std::move(amps));
}

JointPureState JointPureState::ground_atoms(SpacePtr space, FockLabel fock) {
  const std::vector<AtomLevel> atoms(static_cast<std::size_t>(space->atom_count()), AtomLevel::g);
  return basis(std::move(space), atoms, fock);
}

Complex JointPureState::amplitude(std::span<const AtomLevel> atoms, FockLabel fock) const {
  return amplitudes_[space_->index_of(atoms, fock)];
}

bool JointPureState::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

JointPureState JointPureState::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  return JointPureState(space_, amplitudes_ / n);
}

Complex overlap(const JointPureState& a, const JointPureState& b) {
  require_same_space(a, b);
  return a.amplitudes().dot(b.amplitudes());  // conjugates a
}

double fidelity(const JointPureState& a, const JointPureState& b) {
  const double na = a.amplitudes().squaredNorm();
  const double nb = b.amplitudes().squaredNorm();
  if (na == 0.0 || nb == 0.0) throw std::domain_error("fidelity with a zero vector");
  return std::norm(overlap(a, b)) / (na * nb);
}

// ---------------------------------------------------------------------------
// Operators

JointPureState annihilate(const JointPureState& state, int mode) {
  if (mode != 0 && mode != 1) throw std::invalid_argument("mode must be 0 or 1");
  const JointSpace& space = state.space();
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    if (in[i] == Complex{}) continue;
    FockLabel f = space.fock_of(i);
    int& count = mode == 0 ? f.n0 : f.n1;
    if (count == 0) continue;
    const double factor = std::sqrt(static_cast<double>(count));
    --count;
    out[space.with_fock(i, f)] += factor * in[i];
  }
  return JointPureState(state.space_ptr(), std::move(out));
}

JointPureState absorb_photon(const JointPureState& state, int atom_index) {
  const JointSpace& space = state.space();
  require_atom(space, atom_index);
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    if (in[i] == Complex{} || space.atom_level(i, atom_index) != AtomLevel::g) continue;
    const FockLabel f = space.fock_of(i);
    if (f.n0 > 0) {
      const Eigen::Index t =
          space.with_fock(space.with_atom_level(i, atom_index, AtomLevel::e0), {f.n0 - 1, f.n1});
      out[t] += std::sqrt(static_cast<double>(f.n0)) * in[i];
    }
    if (f.n1 > 0) {
      const Eigen::Index t =
          space.with_fock(space.with_atom_level(i, atom_index, AtomLevel::e1), {f.n0, f.n1 - 1});
      out[t] += std::sqrt(static_cast<double>(f.n1)) * in[i];
    }
  }
  return JointPureState(state.space_ptr(), std::move(out));
}

Hamiltonian interaction_hamiltonian(const JointSpace& space, int atom_index,
                                    const CouplingParams& params) {
  require_atom(space, atom_index);
  const double gamma = CouplingParams::make(params.gamma).gamma;
  std::vector<Eigen::Triplet<double>> entries;
  for (Eigen::Index i = 0; i < space.dimension(); ++i) {
    if (space.atom_level(i, atom_index) != AtomLevel::g) continue;
    const FockLabel f = space.fock_of(i);
    // a_0 |e0><g| and its adjoint.
    if (f.n0 > 0) {
      const Eigen::Index t =
          space.with_fock(space.with_atom_level(i, atom_index, AtomLevel::e0), {f.n0 - 1, f.n1});
      const double v = gamma * std::sqrt(static_cast<double>(f.n0));
      entries.emplace_back(t, i, v);
      entries.emplace_back(i, t, v);
    }
    // a_1 |e1><g| and its adjoint.
    if (f.n1 > 0) {
      const Eigen::Index t =
          space.with_fock(space.with_atom_level(i, atom_index, AtomLevel::e1), {f.n0, f.n1 - 1});
      const double v = gamma * std::sqrt(static_cast<double>(f.n1));
      entries.emplace_back(t, i, v);
      entries.emplace_back(i, t, v);
    }
  }
  Hamiltonian h(space.dimension(), space.dimension());
  h.setFromTriplets(entries.begin(), entries.end());
  h.makeCompressed();
  return h;
}

// ---------------------------------------------------------------------------
// Propagator

Propagator::Propagator(SpacePtr space, Hamiltonian hamiltonian) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("null joint space");
  const Eigen::Index dim = space_->dimension();
  if (hamiltonian.rows() != dim || hamiltonian.cols() != dim) {
    throw std::invalid_argument("Hamiltonian dimension " + std::to_string(hamiltonian.rows()) +
                                "x" + std::to_string(hamiltonian.cols()) +
                                " does not match space dimension " + std::to_string(dim));
  }
  const Hamiltonian transposed = hamiltonian.transpose();
  if ((hamiltonian - transposed).norm() > 1e-12 * (1.0 + hamiltonian.norm())) {
    throw std::invalid_argument("Hamiltonian is not Hermitian");
  }

  DisjointSets sets(dim);
  for (Eigen::Index c = 0; c < hamiltonian.outerSize(); ++c) {
    for (Hamiltonian::InnerIterator it(hamiltonian, c); it; ++it) {
      if (it.value() == 0.0) continue;
      if (space_->excitation_number(it.row()) != space_->excitation_number(it.col())) {
        throw std::invalid_argument("Hamiltonian couples different excitation numbers");
      }
      sets.unite(it.row(), it.col());
    }
  }

  std::vector<int> block_of(static_cast<std::size_t>(dim), -1);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::Index root = sets.find(i);
    if (block_of[root] < 0) {
      block_of[root] = static_cast<int>(blocks_.size());
      blocks_.emplace_back();
    }
    blocks_[static_cast<std::size_t>(block_of[root])].indices.push_back(i);
  }

  for (Block& block : blocks_) {
    const auto size = static_cast<Eigen::Index>(block.indices.size());
    Eigen::MatrixXd dense(size, size);
    for (Eigen::Index r = 0; r < size; ++r) {
      for (Eigen::Index c = 0; c < size; ++c) {
        dense(r, c) = hamiltonian.coeff(block.indices[r], block.indices[c]);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("eigendecomposition of Hamiltonian block failed");
    }
    block.eigenvalues = solver.eigenvalues();
    block.eigenvectors = solver.eigenvectors();
  }
}

JointPureState Propagator::apply(const JointPureState& state, double t) const {
  if (state.space().dimension() != space_->dimension() ||
      state.space().atom_count() != space_->atom_count()) {
    throw std::invalid_argument("state does not live on the propagator's space");
  }
  const auto& in = state.amplitudes();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (const Block& block : blocks_) {
    const auto size = static_cast<Eigen::Index>(block.indices.size());
    Eigen::VectorXcd local(size);
    bool empty = true;
    for (Eigen::Index r = 0; r < size; ++r) {
      local[r] = in[block.indices[r]];
      empty = empty && local[r] == Complex{};
    }
    if (empty) continue;
    Eigen::VectorXcd coeffs = block.eigenvectors.transpose().cast<Complex>() * local;
    for (Eigen::Index k = 0; k < size; ++k) {
      coeffs[k] *= std::polar(1.0, -block.eigenvalues[k] * t);
    }
    local = block.eigenvectors.cast<Complex>() * coeffs;
    for (Eigen::Index r = 0; r < size; ++r) out[block.indices[r]] = local[r];
  }
  return JointPureState(state.space_ptr(), std::move(out));
}

JointPureState evolve(const JointPureState& state, const Hamiltonian& hamiltonian, double t) {
  return Propagator(state.space_ptr(), hamiltonian).apply(state, t);
}

// ---------------------------------------------------------------------------
// Measurement and reduced states

AtomMeasurement project_atom_energy(const JointPureState& state, int atom_index,
                                    MeasurementOutcome outcome) {
  const JointSpace& space = state.space();
  require_atom(space, atom_index);
  const double total = state.amplitudes().squaredNorm();
  if (total == 0.0) throw std::domain_error("cannot measure the zero vector");
  Eigen::VectorXcd projected = state.amplitudes();
  const bool keep_ground = outcome == MeasurementOutcome::ground;
  for (Eigen::Index i = 0; i < projected.size(); ++i) {
    const bool is_ground = space.atom_level(i, atom_index) == AtomLevel::g;
    if (is_ground != keep_ground) projected[i] = 0.0;
  }
  const double weight = projected.squaredNorm();
  if (weight == 0.0) {
    throw std::domain_error(std::string("measurement branch '") +
                            (keep_ground ? "ground" : "excited") + "' has zero probability");
  }
  projected /= std::sqrt(weight);
  return AtomMeasurement{outcome, weight / total,
                         JointPureState(state.space_ptr(), std::move(projected))};
}

AtomMeasurement measure_atom_energy(const JointPureState& state, int atom_index, Rng& rng) {
  const JointSpace& space = state.space();
  require_atom(space, atom_index);
  double ground = 0.0;
  const auto& amps = state.amplitudes();
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (space.atom_level(i, atom_index) == AtomLevel::g) ground += std::norm(amps[i]);
  }
  ground /= amps.squaredNorm();
  const MeasurementOutcome outcome =
      uniform01(rng) < ground ? MeasurementOutcome::ground : MeasurementOutcome::excited;
  return project_atom_energy(state, atom_index, outcome);
}

Eigen::Matrix3cd reduced_atom_state(const JointPureState& state, int atom_index) {
  const JointSpace& space = state.space();
  require_atom(space, atom_index);
  const auto& amps = state.amplitudes();
  Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
  constexpr AtomLevel kLevels[] = {AtomLevel::g, AtomLevel::e0, AtomLevel::e1};
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (amps[i] == Complex{}) continue;
    const int a = static_cast<int>(space.atom_level(i, atom_index));
    for (AtomLevel level : kLevels) {
      const Eigen::Index partner = space.with_atom_level(i, atom_index, level);
      rho(a, static_cast<int>(level)) += amps[i] * std::conj(amps[partner]);
    }
  }
  return rho / amps.squaredNorm();
}

Eigen::VectorXd excitation_distribution(const JointPureState& state) {
  const JointSpace& space = state.space();
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(space.atom_count() + space.n_max() + 1);
  const auto& amps = state.amplitudes();
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    dist[space.excitation_number(i)] += std::norm(amps[i]);
  }
  return dist / amps.squaredNorm();
}

// ---------------------------------------------------------------------------
// Physical representations of symmetric states

JointPureState tilde_state(SpacePtr space, SymLabel label, int n_atoms) {
  label = SymLabel::make(label.j, label.n);
  const int n = label.n;
  const int j = label.j;
  if (n_atoms < 0 || n_atoms > n || n_atoms > space->atom_count()) {
    throw std::invalid_argument("tilde_state: n_atoms must lie in [0, min(n, atom_count)]");
  }
  if (n - n_atoms > space->n_max()) {
    throw std::out_of_range("tilde_state: cavity part exceeds truncation");
  }
  if (n_atoms == 0) return JointPureState::ground_atoms(std::move(space), {j, n - j});
  if (n_atoms == n) return atoms_in_symmetric_state(std::move(space), symmetric_basis_state(label));

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space->dimension());
  for (const DecompositionTerm& term : decompose(label, n_atoms)) {
    const auto reg = symmetric_basis_state(term.left);
    const FockLabel cavity{term.right.j, term.right.n - term.right.j};
    add_register_term(amps, *space, reg.amplitudes(), n_atoms, cavity, term.coefficient);
  }
  return JointPureState(std::move(space), std::move(amps));
}

JointPureState tilde_state_by_absorption(SpacePtr space, SymLabel label, int n_atoms) {
  label = SymLabel::make(label.j, label.n);
  if (n_atoms < 0 || n_atoms > label.n || n_atoms > space->atom_count()) {
    throw std::invalid_argument("tilde_state_by_absorption: bad n_atoms");
  }
  JointPureState state = JointPureState::ground_atoms(std::move(space), {label.j, label.n - label.j});
  for (int k = 0; k < n_atoms; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(label.n - k));
    const JointPureState next = absorb_photon(state, k);
    state = JointPureState(next.space_ptr(), next.amplitudes() * scale);
  }
  return state;
}

JointPureState atoms_in_symmetric_state(SpacePtr space, const SymmetricStateVector& state) {
  const SymmetricStateVector full = state.to_exhaustive();
  if (full.qubits() > space->atom_count()) {
    throw std::invalid_argument("register larger than the atom count");
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space->dimension());
  add_register_term(amps, *space, full.amplitudes(), full.qubits(), {0, 0}, 1.0);
  return JointPureState(std::move(space), std::move(amps));
}

}  // namespace symq
