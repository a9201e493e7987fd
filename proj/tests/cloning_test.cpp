#include "symq/cloning.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "symq/protocol.hpp"

using namespace symq;

TEST(CloneFidelity, Examples) {
  EXPECT_DOUBLE_EQ(clone_fidelity(1, 2), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(clone_fidelity(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(clone_fidelity(1, 3), 7.0 / 9.0);
  EXPECT_NEAR(clone_fidelity(1, 1000000), 2.0 / 3.0, 1e-5);
  EXPECT_DOUBLE_EQ(clone_fidelity(4, 4), 1.0);
}

TEST(CloneFidelity, Errors) {
  EXPECT_THROW(clone_fidelity(2, 1), std::invalid_argument);
  EXPECT_THROW(clone_fidelity(0, 3), std::invalid_argument);
}

TEST(CloneFidelity, MonotonicityGrid) {
  for (int n = 1; n <= 50; ++n) {
    for (int m = n; m <= 50; ++m) {
      if (m > n) ASSERT_LT(clone_fidelity(n, m), clone_fidelity(n, m - 1)) << n << "->" << m;
      if (n > 1) ASSERT_GT(clone_fidelity(n, m), clone_fidelity(n - 1, m)) << n << "->" << m;
    }
  }
}

TEST(CloneFidelity, SingleOriginalBounds) {
  for (int m = 1; m <= 100000; m += (m < 100 ? 1 : 997)) {
    const double f = clone_fidelity(1, m);
    ASSERT_GE(f, 2.0 / 3.0);
    ASSERT_LE(f, 1.0);
  }
}

TEST(AtomFidelity, Examples) {
  EXPECT_DOUBLE_EQ(atom_fidelity(std::vector<double>{0, 0, 1}), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(atom_fidelity(std::vector<double>{0, 0.5, 0.5}), 11.0 / 12.0);
  const auto b6 = binomial_distribution(6);
  const double f = atom_fidelity(b6);
  // Exact rational sum of C(5, n-1)/32 * (2n + 1)/(3n).
  EXPECT_NEAR(f, 0.7760416666666667, 1e-15);
  EXPECT_GT(f, clone_fidelity(1, 6));
}

TEST(AtomFidelity, Errors) {
  EXPECT_THROW(atom_fidelity(std::vector<double>{0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(atom_fidelity(std::vector<double>{0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(atom_fidelity(std::vector<double>{0, 0.5, 0.5}, 2), std::invalid_argument);
}

TEST(AtomFidelity, LinearInWeights) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_weights = [&] {
    std::vector<double> w(9, 0.0);
    double total = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) total += (w[i] = u(rng));
    for (double& p : w) p /= total;
    return w;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_weights();
    const auto b = random_weights();
    const double lambda = u(rng);
    std::vector<double> mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = lambda * a[i] + (1 - lambda) * b[i];
    ASSERT_NEAR(atom_fidelity(mix), lambda * atom_fidelity(a) + (1 - lambda) * atom_fidelity(b), 1e-14);
  }
}

TEST(Distributions, Binomial) {
  const auto b6 = binomial_distribution(6);
  ASSERT_EQ(b6.size(), 7u);
  EXPECT_EQ(b6[0], 0.0);
  EXPECT_DOUBLE_EQ(b6[1], 1.0 / 32);
  EXPECT_DOUBLE_EQ(b6[4], 10.0 / 32);
  EXPECT_EQ(binomial_distribution(1), (PhotonDistribution{0.0, 1.0}));
  for (int n_max = 1; n_max <= 40; ++n_max) {
    double total = 0.0;
    for (double p : binomial_distribution(n_max)) total += p;
    ASSERT_NEAR(total, 1.0, 1e-14);
  }
  EXPECT_THROW(binomial_distribution(0), std::invalid_argument);
}

TEST(Distributions, Uniform) {
  const auto u = uniform_distribution(2, 5);
  ASSERT_EQ(u.size(), 6u);
  EXPECT_EQ(u[1], 0.0);
  EXPECT_DOUBLE_EQ(u[3], 0.25);
  EXPECT_THROW(uniform_distribution(3, 2), std::invalid_argument);
}

TEST(Quality, Examples) {
  EXPECT_DOUBLE_EQ(quality(clone_fidelity(1, 3), 1, 3), 1.0);
  EXPECT_NEAR(quality(5.0 / 6.0, 1, 3), 15.0 / 14.0, 1e-15);
  EXPECT_THROW(quality(0.9, 1, 0), std::domain_error);
}

TEST(Quality, Report) {
  const auto r = fidelity_report(std::vector<double>{0, 0.5, 0.5}, 2);
  EXPECT_DOUBLE_EQ(r.f_atom, 11.0 / 12.0);
  EXPECT_DOUBLE_EQ(r.quality, (11.0 / 12.0) / (5.0 / 6.0));
  EXPECT_EQ(r.weights.size(), 3u);
}

TEST(AtomFidelity, MartingaleOverOutcomes) {
  // One step, exact: the outcome-averaged F_atom equals the current one.
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  auto ens = WeightedEnsemble::make(binomial_distribution(6));
  for (int trial = 0; trial < 200; ++trial) {
    const double tau = u(gen);
    const double pe = excite_prob(ens, 1.0, tau);
    const double f_up = atom_fidelity(update_weights(ens, 1.0, tau, MeasurementOutcome::excited).weights());
    const double f_down = atom_fidelity(update_weights(ens, 1.0, tau, MeasurementOutcome::ground).weights());
    ASSERT_NEAR(pe * f_up + (1 - pe) * f_down, atom_fidelity(ens.weights()), 1e-14);
  }

  // Whole runs, Monte Carlo: mean terminal F_atom matches the initial value.
  RunConfig cfg;
  cfg.initial = binomial_distribution(6);
  cfg.policy = FixedTau{0.825};
  cfg.cutoff = 20;
  const int runs = 4000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    Rng rng = make_stream(2024, static_cast<std::uint64_t>(r));
    const double f = run(cfg, rng).f_atom;
    sum += f;
    sum_sq += f * f;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum_sq / runs - mean * mean) / runs);
  EXPECT_NEAR(mean, 0.7760416666666667, 3 * se);
}

TEST(Quality, MeanOverSeededRunsApproachesOne) {
  const PhotonDistribution initial = binomial_distribution(10);
  RunConfig cfg;
  cfg.initial = initial;
  cfg.policy = FixedTau{optimal_tau(WeightedEnsemble::make(initial), 1.0, default_tau_bounds(1.0))};
  cfg.cutoff = 20;
  const int runs = 1000;
  double sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    Rng rng = make_stream(1, static_cast<std::uint64_t>(r));
    sum += run(cfg, rng).quality.value_or(0.0);
  }
  const double mean = sum / runs;
  EXPECT_GT(mean, 0.97);
  EXPECT_LT(mean, 1.03);
}
