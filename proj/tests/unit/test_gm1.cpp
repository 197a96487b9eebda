#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "rbq/error.hpp"
#include "rbq/gm1.hpp"
#include "rbq/oracles.hpp"

using rbq::DistributionSpec;
using rbq::gm1::Gm1Model;

namespace {
const Gm1Model kDm1{DistributionSpec::deterministic(1.0), 1.5};
// Independent high-precision root of sigma = exp(-1.5 (1 - sigma)).
constexpr double kDm1Sigma = 0.417188356134188614;
}  // namespace

TEST(Gm1, SigmaForMm1IsRho) {
  EXPECT_NEAR(rbq::gm1::solve_sigma({DistributionSpec::exponential(1.0), 2.0}), 0.5, 1e-12);
}

TEST(Gm1, SigmaForDm1) {
  const double sigma = rbq::gm1::solve_sigma(kDm1);
  EXPECT_NEAR(sigma, kDm1Sigma, 1e-12);
  EXPECT_NEAR(sigma, rbq::oracles::sigma_bisect(kDm1.inter_arrival, kDm1.mu), 1e-11);
  EXPECT_LE(std::abs(sigma - std::exp(-1.5 * (1.0 - sigma))), 1e-12);
}

TEST(Gm1, SigmaForErlang) {
  const Gm1Model m{DistributionSpec::erlang(2, 2.0), 2.0};
  const double sigma = rbq::gm1::solve_sigma(m);
  EXPECT_NEAR(sigma, (3.0 - std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_NEAR(sigma, rbq::oracles::sigma_bisect(m.inter_arrival, m.mu), 1e-11);
}

TEST(Gm1, InstabilityRejected) {
  EXPECT_THROW(rbq::gm1::solve_sigma({DistributionSpec::exponential(2.0), 2.0}), rbq::InstabilityError);
  EXPECT_THROW(rbq::gm1::steady_state({DistributionSpec::deterministic(0.5), 1.5}), rbq::InstabilityError);
}

TEST(Gm1, Mm1SteadyState) {
  const auto sol = rbq::gm1::steady_state({DistributionSpec::exponential(1.0), 2.0});
  for (std::size_t n = 0; n < 20; ++n) EXPECT_NEAR(sol.a[n], std::pow(0.5, n + 1), 1e-14);
  EXPECT_NEAR(sol.pi[0], 0.5, 1e-14);
  EXPECT_NEAR(sol.pi[1], 0.25, 1e-14);
  EXPECT_NEAR(sol.sojourn_rate, 1.0, 1e-12);
  for (double s : rbq::testgen::s_grid()) EXPECT_NEAR(sol.residual.eval(s), 1.0 / (1.0 + s), 1e-12);
}

TEST(Gm1, Dm1SteadyState) {
  const auto sol = rbq::gm1::steady_state(kDm1);
  EXPECT_NEAR(sol.pi[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(sol.a[0], 1.0 - kDm1Sigma, 1e-12);
  EXPECT_NEAR(sol.rho, 2.0 / 3.0, 1e-15);
}

TEST(Gm1, ResidualClosedFormAgreesWithOperatorTree) {
  const auto sol = rbq::gm1::steady_state(kDm1);
  const double mu = kDm1.mu;
  const double sigma = sol.sigma;
  auto closed = [&](double s) { return mu * (std::exp(-s) - sigma) / (mu * (1.0 - sigma) - s); };
  EXPECT_NEAR(sol.residual.eval(1.0), closed(1.0), 1e-12);
  for (double s : rbq::testgen::s_grid()) EXPECT_NEAR(sol.residual.eval(s), closed(s), 1e-10) << s;
}

TEST(Gm1Properties, RandomStableModels) {
  rbq::testgen::Gen gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = gen.distribution();
    const double lambda = 1.0 / g.mean();
    const Gm1Model m{g, lambda / gen.uniform(0.1, 0.9)};
    const auto sol = rbq::gm1::steady_state(m);
    const double sigma = sol.sigma;
    ASSERT_GT(sigma, 0.0);
    ASSERT_LT(sigma, 1.0);
    EXPECT_NEAR(sigma, rbq::oracles::sigma_bisect(g, m.mu), 1e-11);
    // Identities at s = mu.
    EXPECT_NEAR(sol.residual.eval(m.mu), 1.0 - g.lst(m.mu) / sigma, 1e-9);
    EXPECT_NEAR(g.lst(m.mu) / (1.0 - sol.residual.eval(m.mu)), sigma, 1e-9);
    // Ratio law on the emitted arrays.
    for (std::size_t n = 1; n < sol.a.size(); ++n) EXPECT_NEAR(sol.a[n] / sol.a[n - 1], sigma, 1e-12);
    for (std::size_t n = 2; n < sol.pi.size(); ++n) EXPECT_NEAR(sol.pi[n] / sol.pi[n - 1], sigma, 1e-12);
    EXPECT_NEAR(sol.pi[0], 1.0 - sol.rho, 1e-15);
    // The 200-term partial sums miss sigma^201 of the mass.
    if (std::pow(sigma, 201) < 1e-10) {
      double sa = 0.0, sp = 0.0;
      for (std::size_t n = 0; n <= 200; ++n) {
        sa += sol.a_at(n);
        sp += sol.pi_at(n);
      }
      EXPECT_NEAR(sa, 1.0, 1e-10);
      EXPECT_NEAR(sp, 1.0, 1e-10);
    }
    double soj = 0.0;
    for (std::size_t n = 0; n <= 5000; ++n) soj += sol.a_at(n) * static_cast<double>(n + 1) / m.mu;
    EXPECT_NEAR(soj, 1.0 / sol.sojourn_rate, 1e-9);
  }
}
