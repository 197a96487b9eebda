#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rbq/error.hpp"
#include "rbq/oracles.hpp"

using rbq::DistributionSpec;
using rbq::RateSchedule;
namespace oracles = rbq::oracles;

TEST(Oracles, DCdfOfExponentialIsExponential) {
  const auto e = DistributionSpec::exponential(2.0);
  EXPECT_NEAR(oracles::numeric_d_cdf(e, 3.0, 50.0), 1.0, 1e-8);
  EXPECT_NEAR(oracles::numeric_d_cdf(e, 3.0, std::log(2.0) / 2.0), 0.5, 1e-8);
}

TEST(Oracles, DCdfOfDeterministicMatchesMonteCarlo) {
  const double analytic = oracles::numeric_d_cdf(DistributionSpec::deterministic(1.0), 1.0, 0.5);
  std::mt19937_64 eng(5);
  std::exponential_distribution<double> y(1.0);
  long kept = 0, below = 0;
  for (long i = 0; i < 10'000'000; ++i) {
    const double v = y(eng);
    if (v > 1.0) continue;
    ++kept;
    if (1.0 - v <= 0.5) ++below;
  }
  const double p = static_cast<double>(below) / kept;
  EXPECT_NEAR(analytic, p, 4.0 * std::sqrt(p * (1 - p) / kept));
  // Closed form: P(1 - Y <= w | Y <= 1) = (e^{-(1-w)} - e^{-1}) / (1 - e^{-1}).
  EXPECT_NEAR(analytic, (std::exp(-0.5) - std::exp(-1.0)) / (1 - std::exp(-1.0)), 1e-9);
}

TEST(Oracles, DCdfIsMonotone) {
  for (const auto& f : {DistributionSpec::uniform(0.5, 1.5), DistributionSpec::erlang(3, 2.0),
                        DistributionSpec::hyperexponential({0.3, 0.7}, {0.5, 3.0})}) {
    double prev = 0.0;
    for (double w = 0.0; w <= 12.0; w += 0.25) {
      const double v = oracles::numeric_d_cdf(f, 1.0, w);
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
    EXPECT_NEAR(oracles::numeric_d_cdf(f, 1.0, 60.0), 1.0, 1e-8);
  }
}

TEST(Oracles, SigmaBisect) {
  EXPECT_NEAR(oracles::sigma_bisect(DistributionSpec::exponential(1.0), 2.0), 0.5, 1e-12);
  EXPECT_NEAR(oracles::sigma_bisect(DistributionSpec::deterministic(1.0), 1.5), 0.417188356134188614, 1e-12);
  EXPECT_THROW(oracles::sigma_bisect(DistributionSpec::exponential(2.0), 1.0), rbq::NumericError);
}

TEST(Oracles, EmbeddedChainSingleServerMm1) {
  const auto sol = oracles::embedded_chain_gmc(DistributionSpec::exponential(1.0), 1, 2.0, 200);
  for (std::size_t n = 0; n < 30; ++n) EXPECT_NEAR(sol.arrival_epoch.probs[n], std::pow(0.5, n + 1), 1e-12);
}

TEST(Oracles, EmbeddedChainSingleServerDm1) {
  const auto sol = oracles::embedded_chain_gmc(DistributionSpec::deterministic(1.0), 1, 1.5, 200);
  const double sigma = 0.417188356134188614;
  for (std::size_t n = 0; n < 30; ++n) {
    EXPECT_NEAR(sol.arrival_epoch.probs[n], (1 - sigma) * std::pow(sigma, n), 1e-8);
  }
  EXPECT_NEAR(sol.time_average.probs[0], 1.0 / 3.0, 1e-8);
}

TEST(Oracles, EmbeddedChainTwoServersPoisson) {
  const auto sol = oracles::embedded_chain_gmc(DistributionSpec::exponential(1.0), 2, 0.75, 200);
  const auto bd = oracles::birth_death_solve(RateSchedule(1.0), RateSchedule({0.75}, 1.5), 200);
  for (std::size_t n = 0; n < 40; ++n) EXPECT_NEAR(sol.time_average.probs[n], bd.probs[n], 1e-8) << n;
}

TEST(Oracles, EmbeddedChainTwoServersErlangArrivalsPasta) {
  // Only arrival-epoch and time-average differ for non-Poisson arrivals; the
  // sum of each must be one.
  const auto sol = oracles::embedded_chain_gmc(DistributionSpec::erlang(2, 2.0), 3, 0.5, 200);
  double sa = 0.0, sp = 0.0;
  for (double p : sol.arrival_epoch.probs) sa += p;
  for (double p : sol.time_average.probs) sp += p;
  EXPECT_NEAR(sa, 1.0, 1e-10);
  EXPECT_NEAR(sp, 1.0, 1e-10);
}

TEST(Oracles, EmbeddedChainMg1Mm1) {
  const auto d = oracles::embedded_chain_mg1(1.0, DistributionSpec::exponential(2.0), 200);
  for (std::size_t n = 0; n < 30; ++n) EXPECT_NEAR(d.probs[n], std::pow(0.5, n + 1), 1e-12);
}

TEST(Oracles, EmbeddedChainMg1Deterministic) {
  const auto d = oracles::embedded_chain_mg1(1.0, DistributionSpec::deterministic(0.5), 200);
  EXPECT_NEAR(d.probs[0], 0.5, 1e-12);
  // pi_1 = pi_0 (e^{rho} - 1) for M/D/1.
  EXPECT_NEAR(d.probs[1], 0.5 * (std::exp(0.5) - 1.0), 1e-12);
}

TEST(Oracles, BirthDeath) {
  const auto a = oracles::birth_death_solve(RateSchedule(1.0), RateSchedule(2.0), 200);
  for (std::size_t n = 0; n < 30; ++n) EXPECT_NEAR(a.probs[n], std::pow(0.5, n + 1), 1e-14);
  const auto b = oracles::birth_death_solve(RateSchedule(1.0), RateSchedule({2.0, 4.0}, 4.0), 200);
  // u = 1, 1/2, 1/8, 1/32, ...; total 1 + 1/2 + (1/8) / (1 - 1/4) = 5/3.
  EXPECT_NEAR(b.probs[0], 0.6, 1e-14);
  EXPECT_NEAR(b.probs[2], 0.6 / 8.0, 1e-14);
  EXPECT_THROW(oracles::birth_death_solve(RateSchedule(2.0), RateSchedule(2.0), 200), rbq::InstabilityError);
}

TEST(Oracles, Truncation) {
  EXPECT_EQ(oracles::default_truncation(0.5), 200u);
  EXPECT_EQ(oracles::default_truncation(0.99), 1000u);
}
