#include "symq/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "symq/parallel.hpp"
#include "symq/rng.hpp"

namespace symq {
namespace {

struct Moments {
  double sum = 0;
  double sum_sq = 0;
  std::size_t count = 0;
};

}  // namespace

double trapping_time(int n, int index, double gamma) {
  if (n < 1) throw std::invalid_argument("trapping_time: n must be >= 1");
  if (index < 1) throw std::invalid_argument("trapping_time: index must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("trapping_time: gamma must be positive");
  return std::numbers::pi * index / (gamma * std::sqrt(static_cast<double>(n)));
}

TrapSpec TrapSpec::make(int n, int m_rabi, double gamma, double sigma_rel) {
  if (n < 1) throw std::invalid_argument("TrapSpec: n must be >= 1");
  if (m_rabi < 1) throw std::invalid_argument("TrapSpec: m_rabi must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("TrapSpec: gamma must be positive");
  if (!(sigma_rel >= 0.0)) throw std::invalid_argument("TrapSpec: sigma_rel must be >= 0");
  return TrapSpec{n, m_rabi, gamma, sigma_rel};
}

double TrapSpec::center() const { return trapping_time(n, 2 * m_rabi, gamma); }

double TrapSpec::sigma() const { return sigma_rel * center(); }

double mean_success_prob(int n, double sigma, double gamma) {
  if (n < 1) throw std::invalid_argument("mean_success_prob: n must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("mean_success_prob: sigma must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("mean_success_prob: gamma must be positive");
  if (std::isinf(sigma)) return 0.5;
  return -0.5 * std::expm1(-2.0 * n * gamma * gamma * sigma * sigma);
}

double mean_atoms_abs(int n, double sigma, double gamma) {
  const double p = mean_success_prob(n, sigma, gamma);
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / p;
}

double mean_atoms_rel(int m_rabi, double sigma_rel) {
  if (m_rabi < 1) throw std::invalid_argument("mean_atoms_rel: m_rabi must be >= 1");
  if (!(sigma_rel >= 0.0)) throw std::invalid_argument("mean_atoms_rel: sigma_rel must be >= 0");
  const double x = 8.0 * std::numbers::pi * std::numbers::pi * m_rabi * m_rabi * sigma_rel * sigma_rel;
  const double denom = -std::expm1(-x);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / denom;
}

EscapeEstimate monte_carlo_escape(const TrapSpec& spec, std::size_t trials, std::uint64_t seed,
                                  unsigned threads) {
  const TrapSpec s = TrapSpec::make(spec.n, spec.m_rabi, spec.gamma, spec.sigma_rel);
  if (trials < 1) throw std::invalid_argument("monte_carlo_escape: trials must be >= 1");
  if (!(s.sigma_rel > 0.0)) {
    throw std::invalid_argument("monte_carlo_escape: sigma_rel = 0 never escapes");
  }
  const double tau0 = s.center();
  const double sigma = s.sigma();
  const double freq = std::sqrt(static_cast<double>(s.n)) * s.gamma;

  const std::size_t streams = (trials + kEscapeTrialsPerStream - 1) / kEscapeTrialsPerStream;
  const auto parts = parallel_map<Moments>(
      streams,
      [&](std::size_t stream) {
        Rng rng = make_stream(seed, stream);
        const std::size_t begin = stream * kEscapeTrialsPerStream;
        const std::size_t end = std::min(trials, begin + kEscapeTrialsPerStream);
        Moments m;
        for (std::size_t t = begin; t < end; ++t) {
          double atoms = 0.0;
          for (;;) {
            atoms += 1.0;
            const double tau = positive_normal(rng, tau0, sigma);
            const double sn = std::sin(freq * tau);
            if (uniform01(rng) < sn * sn) break;
          }
          m.sum += atoms;
          m.sum_sq += atoms * atoms;
          ++m.count;
        }
        return m;
      },
      threads);

  Moments total;
  for (const Moments& m : parts) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
    total.count += m.count;
  }
  const double n = static_cast<double>(total.count);
  const double mean = total.sum / n;
  const double var = total.count > 1 ? (total.sum_sq - n * mean * mean) / (n - 1.0) : 0.0;
  return EscapeEstimate{mean, std::sqrt(std::max(var, 0.0) / n), total.count};
}

}  // namespace symq
