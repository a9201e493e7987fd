#include "symq/cloning.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "symq/symstate.hpp"

namespace symq {

double clone_fidelity(int n_originals, int m_clones) {
  if (n_originals < 1) throw std::invalid_argument("clone_fidelity: need at least one original");
  if (m_clones < n_originals) {
    throw std::invalid_argument("clone_fidelity: cannot produce " + std::to_string(m_clones) +
                                " clones from " + std::to_string(n_originals) + " originals");
  }
  const double n = n_originals;
  const double m = m_clones;
  return (n * m + n + m) / (m * (n + 2.0));
}

double atom_fidelity(std::span<const double> weights_by_clones, int n_originals) {
  const double total = std::accumulate(weights_by_clones.begin(), weights_by_clones.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("atom_fidelity: weights sum to " + std::to_string(total));
  }
  double f = 0.0;
  for (std::size_t m = 0; m < weights_by_clones.size(); ++m) {
    const double p = weights_by_clones[m];
    if (p < 0.0) throw std::invalid_argument("atom_fidelity: negative weight");
    if (p == 0.0) continue;
    if (static_cast<int>(m) < n_originals) {
      throw std::invalid_argument("atom_fidelity: weight on fewer clones than originals");
    }
    f += p * clone_fidelity(n_originals, static_cast<int>(m));
  }
  return f;
}

double quality(double f_atom, int n_originals, int m_transferred) {
  if (m_transferred < 1) {
    throw std::domain_error("quality is undefined before any qubit is transferred");
  }
  return f_atom / clone_fidelity(n_originals, m_transferred);
}

PhotonDistribution binomial_distribution(int n_max) {
  if (n_max < 1) throw std::invalid_argument("binomial_distribution: n_max must be >= 1");
  if (n_max > 63) throw std::invalid_argument("binomial_distribution: n_max must be <= 63");
  PhotonDistribution p(static_cast<std::size_t>(n_max) + 1, 0.0);
  const double denom = std::ldexp(1.0, n_max - 1);
  for (int n = 1; n <= n_max; ++n) {
    p[static_cast<std::size_t>(n)] = static_cast<double>(binom(n_max - 1, n - 1)) / denom;
  }
  return p;
}

PhotonDistribution uniform_distribution(int n_min, int n_max) {
  if (n_min < 0 || n_max < n_min) {
    throw std::invalid_argument("uniform_distribution: need 0 <= n_min <= n_max");
  }
  PhotonDistribution p(static_cast<std::size_t>(n_max) + 1, 0.0);
  const double w = 1.0 / static_cast<double>(n_max - n_min + 1);
  for (int n = n_min; n <= n_max; ++n) p[static_cast<std::size_t>(n)] = w;
  return p;
}

FidelityReport fidelity_report(std::span<const double> weights, int m_transferred,
                               int n_originals) {
  FidelityReport r;
  r.f_atom = atom_fidelity(weights, n_originals);
  r.m_transferred = m_transferred;
  r.quality = quality(r.f_atom, n_originals, m_transferred);
  r.weights.assign(weights.begin(), weights.end());
  return r;
}

}  // namespace symq
