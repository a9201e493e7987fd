#pragma once

// Ensemble-level execution of the deterministic and measurement-driven
// transfer schemes. A branch with n initial photons and m atoms already
// excited Rabi-oscillates at sqrt(n - m) gamma, so the excitation
// probability for interaction time tau is sin^2(sqrt(n - m) gamma tau).

#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "symq/cloning.hpp"
#include "symq/fockspace.hpp"
#include "symq/rng.hpp"
#include "symq/symstate.hpp"

namespace symq {

/// Classical mixture over the initial total photon number n, plus the count
/// of atoms that have absorbed a photon so far.
class WeightedEnsemble {
 public:
  /// Validates non-negative weights summing to 1 within 1e-9 and no weight
  /// below `transferred`; stores them renormalized.
  static WeightedEnsemble make(PhotonDistribution weights, int transferred = 0);

  std::span<const double> weights() const { return weights_; }
  double weight(int n) const;
  int transferred() const { return transferred_; }
  int max_photons() const { return static_cast<int>(weights_.size()) - 1; }

  /// Exactly one branch carries weight and it has no photons left.
  bool vacuum_certain() const;

  /// Optional Dicke-basis payload of the symmetric state carried by branch
  /// n. Weight dynamics do not depend on it.
  const std::map<int, SymmetricStateVector>& branch_states() const { return branch_states_; }
  WeightedEnsemble with_branch_state(int n, SymmetricStateVector state) const;

 private:
  friend WeightedEnsemble update_weights(const WeightedEnsemble&, double, double,
                                         MeasurementOutcome);

  PhotonDistribution weights_;
  int transferred_ = 0;
  std::map<int, SymmetricStateVector> branch_states_;
};

/// Shannon entropy (nats) of the photon-number weights.
double weight_entropy(const WeightedEnsemble& ens);

/// sum_n p_n sin^2(sqrt(n - m) gamma tau).
double excite_prob(const WeightedEnsemble& ens, double gamma, double tau);

/// Bayesian update after one atom with interaction time tau. Excited bumps
/// `transferred`. Throws std::domain_error on a zero-probability outcome.
WeightedEnsemble update_weights(const WeightedEnsemble& ens, double gamma, double tau,
                                MeasurementOutcome outcome);

struct TauBounds {
  double lower = 0.0;  // exclusive
  double upper = 0.0;  // inclusive
};

/// Grid search over (lower, upper] with `grid_points` samples, then
/// golden-section refinement around each near-maximal grid peak. Peaks equal
/// within 1e-12 are ties and go to the smaller tau. Throws
/// std::invalid_argument for empty bounds.
double optimal_tau(const WeightedEnsemble& ens, double gamma, TauBounds bounds,
                   int grid_points = 2000);

/// Default search interval (0, pi/gamma].
TauBounds default_tau_bounds(double gamma);

/// pi / (gamma sqrt(n_max)): any tau strictly below avoids every trapping
/// point for photon numbers 1..n_max.
double trapping_safe_tau(int n_max, double gamma);

struct FixedTau {
  double tau = 0;
};
struct OptimalEachStep {
  std::optional<TauBounds> bounds;  // default_tau_bounds(gamma) when empty
  int grid_points = 2000;
};
/// Half Rabi period for a known photon number: pi / (2 sqrt(n - m) gamma).
struct HalfRabi {
  int photons = 0;
};
/// tau ~ Normal(tau0, sigma), resampled until positive.
struct JitteredTau {
  double tau0 = 0;
  double sigma = 0;
};

using TauPolicy = std::variant<FixedTau, OptimalEachStep, HalfRabi, JitteredTau>;

/// Throws std::invalid_argument when tau <= 0, sigma < 0, etc.
void validate_policy(const TauPolicy& policy);

/// Interaction time the policy prescribes for the next atom.
double choose_tau(const TauPolicy& policy, const WeightedEnsemble& ens, double gamma, Rng& rng);

struct StepResult {
  MeasurementOutcome outcome = MeasurementOutcome::ground;
  WeightedEnsemble ensemble;
  double tau = 0;
  double excite_probability = 0;
};

/// Sends one atom: picks tau, samples the outcome, updates the weights.
StepResult step(const WeightedEnsemble& ens, const TauPolicy& policy, double gamma, Rng& rng);

enum class TerminalReason { cutoff_reached, vacuum_certain, atom_budget_exhausted };

const char* to_string(TerminalReason reason);
const char* to_string(MeasurementOutcome outcome);

struct ProtocolEvent {
  int atom_index = 0;
  double tau = 0;
  MeasurementOutcome outcome = MeasurementOutcome::ground;
  double excite_prob_before = 0;
  std::vector<double> weights_after;
  int transferred_after = 0;
  double f_atom_after = 0;
  std::optional<double> quality_after;  // empty while nothing is transferred
};

struct ProtocolTrace {
  std::vector<double> initial_weights;
  double initial_f_atom = 0;
  std::vector<ProtocolEvent> events;
  TerminalReason terminal = TerminalReason::cutoff_reached;
  int transferred = 0;
  double f_atom = 0;
  std::optional<double> quality;
};

struct RunConfig {
  PhotonDistribution initial;
  double gamma = 1.0;
  TauPolicy policy = OptimalEachStep{};
  int cutoff = 20;           // consecutive ground outcomes that stop the run
  int atom_budget = 10000;   // maximum atoms sent
  int n_originals = 1;       // for fidelity bookkeeping
};

/// Throws std::invalid_argument naming the first bad field.
void validate(const RunConfig& config);

/// Sends atoms until `cutoff` consecutive ground outcomes, the atom budget
/// runs out, or the ensemble is certainly empty.
ProtocolTrace run(const RunConfig& config, Rng& rng);

}  // namespace symq
