#pragma once

// Test-only oracle: simulates each photon-number branch of a mixture as a
// pure joint state in the brute-force Fock space (evolve, then project the
// atom's energy) and accumulates branch likelihoods. It never calls the
// closed-form protocol functions it is used to check.

#include <cstddef>
#include <random>
#include <vector>

#include "symq/fockspace.hpp"

namespace symq::oracle {

struct OracleStep {
  double outcome_probability = 0;     // mixture probability of the outcome
  double excite_probability = 0;      // mixture probability of "excited"
  std::vector<double> posterior;      // indexed by n
};

class BranchOracle {
 public:
  /// prior[n] is the weight of n photons; each branch starts as a random
  /// superposition of |j, n-j> with the atoms in g. `atoms` bounds the
  /// number of steps.
  BranchOracle(std::vector<double> prior, int atoms, double gamma, std::mt19937_64& rng)
      : weights_(std::move(prior)), gamma_(gamma) {
    const int n_max = static_cast<int>(weights_.size()) - 1;
    space_ = make_space(atoms, n_max);
    std::normal_distribution<double> g;
    for (int n = 0; n <= n_max; ++n) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space_->dimension());
      for (int j = 0; j <= n; ++j) {
        v[space_->index_of(std::vector<AtomLevel>(static_cast<std::size_t>(atoms), AtomLevel::g),
                           {j, n - j})] = Complex(g(rng), g(rng));
      }
      branches_.emplace_back(space_, v / v.norm());
    }
    for (int a = 0; a < atoms; ++a) {
      propagators_.emplace_back(space_, interaction_hamiltonian(*space_, a, {gamma_}));
    }
  }

  OracleStep step(double tau, MeasurementOutcome outcome) {
    OracleStep out;
    std::vector<double> likelihood(weights_.size(), 0.0);
    for (std::size_t n = 0; n < weights_.size(); ++n) {
      if (weights_[n] == 0.0) continue;
      branches_[n] = propagators_[static_cast<std::size_t>(next_atom_)].apply(branches_[n], tau);
      const auto excited = excited_probability(branches_[n], next_atom_);
      out.excite_probability += weights_[n] * excited;
      likelihood[n] = outcome == MeasurementOutcome::excited ? excited : 1.0 - excited;
      if (likelihood[n] > 1e-14) {
        branches_[n] = project_atom_energy(branches_[n], next_atom_, outcome).post_state;
      } else {
        likelihood[n] = 0.0;
      }
    }
    double total = 0.0;
    for (std::size_t n = 0; n < weights_.size(); ++n) total += weights_[n] * likelihood[n];
    out.outcome_probability = total;
    for (std::size_t n = 0; n < weights_.size(); ++n) weights_[n] = weights_[n] * likelihood[n] / total;
    out.posterior = weights_;
    ++next_atom_;
    return out;
  }

 private:
  static double excited_probability(const JointPureState& psi, int atom) {
    const auto& s = psi.space();
    double p = 0.0;
    for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
      if (s.atom_level(i, atom) != AtomLevel::g) p += std::norm(psi.amplitudes()[i]);
    }
    return p / psi.amplitudes().squaredNorm();
  }

  std::vector<double> weights_;
  double gamma_;
  SpacePtr space_;
  std::vector<JointPureState> branches_;
  std::vector<Propagator> propagators_;
  int next_atom_ = 0;
};

}  // namespace symq::oracle
