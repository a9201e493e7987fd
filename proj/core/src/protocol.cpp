#include "symq/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symq {
namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kCandidateWindow = 1e-3;

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

double rabi_phase(int remaining, double gamma, double tau) {
  return std::sqrt(static_cast<double>(remaining)) * gamma * tau;
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be positive");
  }
}

// Maximizes f on [a, b]; returns the abscissa.
template <typename F>
double golden_section_maximize(F&& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

std::optional<double> maybe_quality(double f_atom, int n_originals, int transferred) {
  if (transferred < n_originals || transferred < 1) return std::nullopt;
  return quality(f_atom, n_originals, transferred);
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightedEnsemble

WeightedEnsemble WeightedEnsemble::make(PhotonDistribution weights, int transferred) {
  if (weights.empty()) throw std::invalid_argument("ensemble needs at least one weight");
  if (transferred < 0) throw std::invalid_argument("transferred count must be >= 0");
  double total = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const double p = weights[n];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("weight p_" + std::to_string(n) + " is negative or not finite");
    }
    if (p > 0.0 && static_cast<int>(n) < transferred) {
      throw std::invalid_argument("weight on n=" + std::to_string(n) + " below transferred count " +
                                  std::to_string(transferred));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("ensemble weights sum to " + std::to_string(total));
  }
  for (double& p : weights) p /= total;
  WeightedEnsemble ens;
  ens.weights_ = std::move(weights);
  ens.transferred_ = transferred;
  return ens;
}

double WeightedEnsemble::weight(int n) const {
  if (n < 0 || n > max_photons()) return 0.0;
  return weights_[static_cast<std::size_t>(n)];
}

bool WeightedEnsemble::vacuum_certain() const {
  int branches = 0;
  int last = -1;
  for (std::size_t n = 0; n < weights_.size(); ++n) {
    if (weights_[n] > 0.0) {
      ++branches;
      last = static_cast<int>(n);
    }
  }
  return branches == 1 && last == transferred_;
}

WeightedEnsemble WeightedEnsemble::with_branch_state(int n, SymmetricStateVector state) const {
  if (weight(n) <= 0.0) throw std::invalid_argument("payload for a branch with no weight");
  if (state.qubits() != n) throw std::invalid_argument("payload qubit count differs from n");
  WeightedEnsemble out = *this;
  out.branch_states_.insert_or_assign(n, std::move(state));
  return out;
}

double weight_entropy(const WeightedEnsemble& ens) {
  double h = 0.0;
  for (double p : ens.weights()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Closed-form probabilities and updates

double excite_prob(const WeightedEnsemble& ens, double gamma, double tau) {
  double pe = 0.0;
  const auto w = ens.weights();
  for (int n = ens.transferred() + 1; n <= ens.max_photons(); ++n) {
    const double p = w[static_cast<std::size_t>(n)];
    if (p > 0.0) pe += p * sin2(rabi_phase(n - ens.transferred(), gamma, tau));
  }
  return pe;
}

WeightedEnsemble update_weights(const WeightedEnsemble& ens, double gamma, double tau,
                                MeasurementOutcome outcome) {
  const bool excited = outcome == MeasurementOutcome::excited;
  const int m = ens.transferred();
  PhotonDistribution next(ens.weights_.size(), 0.0);
  double total = 0.0;
  for (int n = m; n <= ens.max_photons(); ++n) {
    const double p = ens.weights_[static_cast<std::size_t>(n)];
    if (p == 0.0) continue;
    const double s = sin2(rabi_phase(n - m, gamma, tau));
    const double likelihood = excited ? s : 1.0 - s;
    next[static_cast<std::size_t>(n)] = p * likelihood;
    total += p * likelihood;
  }
  if (!(total > 0.0)) {
    throw std::domain_error(std::string("conditioning on '") + to_string(outcome) +
                            "', an outcome of zero probability");
  }
  for (double& p : next) p /= total;

  WeightedEnsemble out;
  out.weights_ = std::move(next);
  out.transferred_ = excited ? m + 1 : m;
  if (excited) {
    // A branch with no photons left cannot have produced the excitation.
    out.weights_[static_cast<std::size_t>(m)] = 0.0;
  }
  for (const auto& [n, state] : ens.branch_states_) {
    if (out.weight(n) > 0.0) out.branch_states_.insert_or_assign(n, state);
  }
  return out;
}

TauBounds default_tau_bounds(double gamma) {
  require_gamma(gamma);
  return TauBounds{0.0, std::numbers::pi / gamma};
}

double optimal_tau(const WeightedEnsemble& ens, double gamma, TauBounds bounds, int grid_points) {
  require_gamma(gamma);
  if (!(bounds.lower >= 0.0) || !(bounds.upper > bounds.lower) || !std::isfinite(bounds.upper)) {
    throw std::invalid_argument("optimal_tau: empty or invalid bounds");
  }
  if (grid_points < 2) throw std::invalid_argument("optimal_tau: need at least 2 grid points");

  const double width = bounds.upper - bounds.lower;
  auto tau_at = [&](int i) { return bounds.lower + width * i / grid_points; };
  auto objective = [&](double tau) { return excite_prob(ens, gamma, tau); };

  std::vector<double> values(static_cast<std::size_t>(grid_points) + 2, -1.0);
  double top = -1.0;
  for (int i = 1; i <= grid_points; ++i) {
    values[static_cast<std::size_t>(i)] = objective(tau_at(i));
    top = std::max(top, values[static_cast<std::size_t>(i)]);
  }

  // Refine every local grid maximum near the top; peaks that agree after
  // refinement up to rounding are ties and the earliest wins.
  std::vector<std::pair<double, double>> peaks;  // (tau, value), ascending tau
  for (int i = 1; i <= grid_points; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    if (v < top - kCandidateWindow) continue;
    if (v < values[static_cast<std::size_t>(i) - 1] || v < values[static_cast<std::size_t>(i) + 1]) continue;
    std::pair<double, double> peak{tau_at(i), v};
    const double refined =
        golden_section_maximize(objective, tau_at(i - 1), tau_at(std::min(i + 1, grid_points)));
    const double refined_value = objective(refined);
    if (refined > bounds.lower && refined <= bounds.upper && refined_value > v) {
      peak = {refined, refined_value};
    }
    peaks.push_back(peak);
  }
  double best_value = -1.0;
  for (const auto& p : peaks) best_value = std::max(best_value, p.second);
  for (const auto& p : peaks) {
    if (p.second >= best_value - kTieTolerance) return p.first;
  }
  return tau_at(grid_points);  // unreachable: the global grid maximum is a peak
}

double trapping_safe_tau(int n_max, double gamma) {
  require_gamma(gamma);
  if (n_max < 1) throw std::invalid_argument("trapping_safe_tau: n_max must be >= 1");
  return std::numbers::pi / (gamma * std::sqrt(static_cast<double>(n_max)));
}

// ---------------------------------------------------------------------------
// Policies and stepping

void validate_policy(const TauPolicy& policy) {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FixedTau>) {
          if (!(p.tau > 0.0) || !std::isfinite(p.tau)) {
            throw std::invalid_argument("fixed tau must be positive");
          }
        } else if constexpr (std::is_same_v<P, OptimalEachStep>) {
          if (p.grid_points < 2) throw std::invalid_argument("grid needs >= 2 points");
          if (p.bounds && !(p.bounds->upper > p.bounds->lower && p.bounds->lower >= 0.0)) {
            throw std::invalid_argument("optimal tau bounds are empty");
          }
        } else if constexpr (std::is_same_v<P, HalfRabi>) {
          if (p.photons < 1) throw std::invalid_argument("half-Rabi photon number must be >= 1");
        } else {
          if (!(p.tau0 > 0.0)) throw std::invalid_argument("jittered tau0 must be positive");
          if (!(p.sigma >= 0.0)) throw std::invalid_argument("jitter sigma must be >= 0");
        }
      },
      policy);
}

double choose_tau(const TauPolicy& policy, const WeightedEnsemble& ens, double gamma, Rng& rng) {
  require_gamma(gamma);
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FixedTau>) {
          return p.tau;
        } else if constexpr (std::is_same_v<P, OptimalEachStep>) {
          return optimal_tau(ens, gamma, p.bounds.value_or(default_tau_bounds(gamma)),
                             p.grid_points);
        } else if constexpr (std::is_same_v<P, HalfRabi>) {
          const int remaining = p.photons - ens.transferred();
          if (remaining < 1) {
            throw std::domain_error("half-Rabi policy: no photons left for n=" +
                                    std::to_string(p.photons));
          }
          return std::numbers::pi / (2.0 * std::sqrt(static_cast<double>(remaining)) * gamma);
        } else {
          return positive_normal(rng, p.tau0, p.sigma);
        }
      },
      policy);
}

StepResult step(const WeightedEnsemble& ens, const TauPolicy& policy, double gamma, Rng& rng) {
  const double tau = choose_tau(policy, ens, gamma, rng);
  const double pe = excite_prob(ens, gamma, tau);
  const MeasurementOutcome outcome =
      uniform01(rng) < pe ? MeasurementOutcome::excited : MeasurementOutcome::ground;
  return StepResult{outcome, update_weights(ens, gamma, tau, outcome), tau, pe};
}

const char* to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::cutoff_reached: return "cutoff_reached";
    case TerminalReason::vacuum_certain: return "vacuum_certain";
    case TerminalReason::atom_budget_exhausted: return "atom_budget_exhausted";
  }
  return "unknown";
}

const char* to_string(MeasurementOutcome outcome) {
  return outcome == MeasurementOutcome::excited ? "excited" : "ground";
}

// ---------------------------------------------------------------------------
// Runs

void validate(const RunConfig& config) {
  require_gamma(config.gamma);
  if (config.cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  if (config.atom_budget < 0) throw std::invalid_argument("atom_budget must be >= 0");
  if (config.n_originals < 1) throw std::invalid_argument("n_originals must be >= 1");
  validate_policy(config.policy);
  const auto ens = WeightedEnsemble::make(config.initial);
  for (int n = 0; n < config.n_originals && n <= ens.max_photons(); ++n) {
    if (ens.weight(n) > 0.0) {
      throw std::invalid_argument("initial distribution has weight on n=" + std::to_string(n) +
                                  ", fewer photons than originals");
    }
  }
}

ProtocolTrace run(const RunConfig& config, Rng& rng) {
  validate(config);
  WeightedEnsemble ens = WeightedEnsemble::make(config.initial);

  ProtocolTrace trace;
  trace.initial_weights.assign(ens.weights().begin(), ens.weights().end());
  trace.initial_f_atom = atom_fidelity(ens.weights(), config.n_originals);
  trace.f_atom = trace.initial_f_atom;

  int consecutive_ground = 0;
  int atoms = 0;
  for (;;) {
    if (ens.vacuum_certain()) {
      trace.terminal = TerminalReason::vacuum_certain;
      break;
    }
    if (atoms >= config.atom_budget) {
      trace.terminal = TerminalReason::atom_budget_exhausted;
      break;
    }
    StepResult s = step(ens, config.policy, config.gamma, rng);
    ens = std::move(s.ensemble);

    ProtocolEvent ev;
    ev.atom_index = atoms++;
    ev.tau = s.tau;
    ev.outcome = s.outcome;
    ev.excite_prob_before = s.excite_probability;
    ev.weights_after.assign(ens.weights().begin(), ens.weights().end());
    ev.transferred_after = ens.transferred();
    ev.f_atom_after = atom_fidelity(ens.weights(), config.n_originals);
    ev.quality_after = maybe_quality(ev.f_atom_after, config.n_originals, ens.transferred());
    trace.events.push_back(std::move(ev));

    if (s.outcome == MeasurementOutcome::ground) {
      if (++consecutive_ground >= config.cutoff) {
        trace.terminal = TerminalReason::cutoff_reached;
        break;
      }
    } else {
      consecutive_ground = 0;
    }
  }

  trace.transferred = ens.transferred();
  trace.f_atom = atom_fidelity(ens.weights(), config.n_originals);
  trace.quality = maybe_quality(trace.f_atom, config.n_originals, trace.transferred);
  return trace;
}

}  // namespace symq
