#pragma once

// Escape from trapping states under Gaussian interaction-time jitter.
//
// A trapping time satisfies sqrt(n) gamma tau = pi k for a natural k: the
// excitation probability sin^2(sqrt(n) gamma tau) vanishes although photons
// remain. A trap of m_rabi full Rabi cycles sits at k = 2 m_rabi, i.e.
// tau0 = 2 pi m_rabi / (gamma sqrt(n)); the relative jitter sigma_rel is
// sigma / tau0. With this centre the mean number of atoms needed to escape
// is 2 / (1 - exp(-8 pi^2 m_rabi^2 sigma_rel^2)), independent of n.

#include <cstddef>
#include <cstdint>

namespace symq {

/// tau with sqrt(n) gamma tau = pi * index.
double trapping_time(int n, int index, double gamma);

struct TrapSpec {
  int n = 1;            // photons in the cavity
  int m_rabi = 1;       // full Rabi cycles at the trap centre
  double gamma = 1.0;
  double sigma_rel = 0.0;

  /// Throws std::invalid_argument on n < 1, m_rabi < 1, gamma <= 0, sigma_rel < 0.
  static TrapSpec make(int n, int m_rabi, double gamma, double sigma_rel);

  /// tau0 = 2 pi m_rabi / (gamma sqrt(n)).
  double center() const;
  /// sigma_rel * tau0.
  double sigma() const;
};

/// Mean of sin^2(sqrt(n) gamma tau) over tau ~ Normal(trap centre, sigma):
/// (1 - exp(-2 n gamma^2 sigma^2)) / 2.
double mean_success_prob(int n, double sigma, double gamma);

/// 1 / mean_success_prob; +infinity at sigma == 0.
double mean_atoms_abs(int n, double sigma, double gamma);

/// 2 / (1 - exp(-8 pi^2 m_rabi^2 sigma_rel^2)); +infinity at sigma_rel == 0.
double mean_atoms_rel(int m_rabi, double sigma_rel);

struct EscapeEstimate {
  double mean = 0;
  double standard_error = 0;
  std::size_t trials = 0;
};

/// Trials per independent RNG stream in monte_carlo_escape.
inline constexpr std::size_t kEscapeTrialsPerStream = 4096;

/// Each trial sends atoms with a fresh tau ~ Normal(tau0, sigma) (resampled
/// until positive) until one is excited with probability
/// sin^2(sqrt(n) gamma tau); the statistic is the atom count. Trials are
/// grouped into streams of kEscapeTrialsPerStream, stream s seeded by
/// split_seed(seed, s), and run in parallel; the result depends only on
/// (spec, trials, seed). Requires sigma_rel > 0 and trials >= 1.
EscapeEstimate monte_carlo_escape(const TrapSpec& spec, std::size_t trials, std::uint64_t seed,
                                  unsigned threads = 0);

}  // namespace symq
