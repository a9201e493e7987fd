#pragma once

#include <span>
#include <vector>

namespace symq {

/// Weights indexed by total photon number n (index 0 is the vacuum).
using PhotonDistribution = std::vector<double>;

/// Optimal single-copy fidelity of an n -> m universal cloner,
/// (nm + n + m) / (m (n + 2)). Requires 1 <= n_originals <= m_clones.
double clone_fidelity(int n_originals, int m_clones);

/// Fidelity of one atomic qubit drawn from a mixture of cloner outputs:
/// sum_m p_m F_{n->m}, with weights indexed by clone count m. Weights must
/// sum to 1 (1e-9) and vanish below n_originals.
double atom_fidelity(std::span<const double> weights_by_clones, int n_originals = 1);

/// F_atom / F_{n -> m_transferred}. Throws std::domain_error when nothing
/// has been transferred.
double quality(double f_atom, int n_originals, int m_transferred);

/// p_n = C(n_max - 1, n - 1) / 2^(n_max - 1) for n = 1..n_max.
PhotonDistribution binomial_distribution(int n_max);

/// Equal weight on n_min..n_max.
PhotonDistribution uniform_distribution(int n_min, int n_max);

struct FidelityReport {
  double f_atom = 0;
  double quality = 0;
  int m_transferred = 0;
  std::vector<double> weights;
};

/// Snapshot of clone fidelity and quality for a weight vector over photon
/// number, after m_transferred atoms absorbed a photon.
FidelityReport fidelity_report(std::span<const double> weights, int m_transferred,
                               int n_originals = 1);

}  // namespace symq
