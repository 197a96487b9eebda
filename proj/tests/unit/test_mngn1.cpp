#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "rbq/error.hpp"
#include "rbq/mngn1.hpp"
#include "rbq/oracles.hpp"

using rbq::DistributionSpec;
using rbq::RateSchedule;
using rbq::mngn1::MnGn1Model;

namespace {

MnGn1Model mg1(double lambda, const DistributionSpec& g) { return {RateSchedule(lambda), {}, g}; }

MnGn1Model random_model(rbq::testgen::Gen& gen) {
  const auto tail = gen.distribution();
  const double lambda = gen.uniform(0.2, 0.85) / tail.mean();
  std::vector<double> lam;
  for (int i = gen.integer(0, 3); i > 0; --i) lam.push_back(lambda * gen.uniform(0.3, 2.5));
  std::vector<DistributionSpec> services;
  for (int i = gen.integer(0, 3); i > 0; --i) services.push_back(gen.distribution());
  return {RateSchedule(lam, lambda), services, tail};
}

}  // namespace

TEST(MnGn1, Mm1Collapse) {
  const auto sol = rbq::mngn1::steady_state_mngn1(mg1(1.0, DistributionSpec::exponential(2.0)));
  for (std::size_t n = 0; n < 30; ++n) EXPECT_NEAR(sol.pi[n], std::pow(0.5, n + 1), 1e-10);
}

TEST(MnGn1, ExponentialServicesGiveBirthDeath) {
  const MnGn1Model m{RateSchedule({0.7, 1.4, 0.9}, 1.2), {}, DistributionSpec::exponential(2.0)};
  const auto sol = rbq::mngn1::steady_state_mngn1(m);
  for (std::size_t n = 1; n <= sol.ratios.size(); ++n) EXPECT_NEAR(sol.ratios[n - 1], m.lambda_at(n - 1) / 2.0, 1e-10);
  const auto bd = rbq::oracles::birth_death_solve(m.lambda, RateSchedule(2.0), 200);
  for (std::size_t n = 0; n < 30; ++n) EXPECT_NEAR(sol.pi[n], bd.probs[n], 1e-10);
}

TEST(MnGn1, ExponentialServicesKeepExponentialResiduals) {
  const MnGn1Model m{RateSchedule({0.7, 1.4}, 1.2), {}, DistributionSpec::exponential(2.0)};
  for (const auto& r : rbq::mngn1::residuals_mngn1(m, 8)) {
    for (double s : rbq::testgen::s_grid()) EXPECT_NEAR(r.eval(s), 2.0 / (2.0 + s), 1e-12);
  }
}

TEST(MnGn1, FirstResidualIsDOperator) {
  const auto r = rbq::mngn1::residuals_mngn1(mg1(1.0, DistributionSpec::deterministic(1.0)), 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].eval(2.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(r[0].eval(2.0), rbq::oracles::numeric_d_lst(DistributionSpec::deterministic(1.0), 1.0, 2.0), 1e-9);
}

TEST(MnGn1, Mg1DeterministicIdleProbability) {
  const auto sol = rbq::mngn1::steady_state_mngn1(mg1(1.0, DistributionSpec::deterministic(0.5)));
  EXPECT_NEAR(sol.pi[0], 0.5, 1e-10);
}

TEST(MnGn1, Mg1ErlangMatchesEmbeddedChain) {
  const auto g = DistributionSpec::erlang(2, 4.0);
  const auto sol = rbq::mngn1::steady_state_mngn1(mg1(1.0, g));
  const auto chain = rbq::oracles::embedded_chain_mg1(1.0, g, 200);
  for (std::size_t n = 0; n < 40; ++n) EXPECT_NEAR(sol.pi[n], chain.probs[n], 1e-6) << n;
}

TEST(MnGn1, Mg1ResidualsConverge) {
  const auto r = rbq::mngn1::residuals_mngn1(mg1(1.0, DistributionSpec::uniform(0.2, 1.2)), 30);
  for (double s : rbq::testgen::s_grid()) {
    const double early = std::abs(r[6].eval(s) - r[5].eval(s));
    const double late = std::abs(r[29].eval(s) - r[28].eval(s));
    EXPECT_LT(late, 1e-8) << "s=" << s;
    EXPECT_LT(late, 1e-3 * early + 1e-15) << "s=" << s;
  }
}

TEST(MnGn1, FirstArrivalProbability) {
  EXPECT_NEAR(rbq::mngn1::first_arrival_prob(mg1(1.0, DistributionSpec::exponential(1.0)), 2), 0.5, 1e-15);
  EXPECT_NEAR(rbq::mngn1::first_arrival_prob(mg1(1.0, DistributionSpec::deterministic(2.0)), 3),
              1.0 - std::exp(-2.0), 1e-15);
  EXPECT_THROW(rbq::mngn1::first_arrival_prob(mg1(1.0, DistributionSpec::exponential(1.0)), 1), rbq::DomainError);
}

TEST(MnGn1, UnstableRejected) {
  EXPECT_THROW(rbq::mngn1::steady_state_mngn1(mg1(1.0, DistributionSpec::deterministic(1.0))), rbq::InstabilityError);
}

TEST(MnGn1Properties, BalanceResidualsAndNormalization) {
  rbq::testgen::Gen gen(41);
  int solved = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = random_model(gen);
    rbq::mngn1::MnGn1Solution sol;
    try {
      sol = rbq::mngn1::steady_state_mngn1(m);
    } catch (const rbq::NormalizationError&) {
      // Slow head phases can keep the ratios moving past n_max; that is reported, not hidden.
      continue;
    }
    ++solved;
    double total = 0.0;
    for (double p : sol.pi) total += p;
    EXPECT_NEAR(total, 1.0, 1e-8);
    for (std::size_t n = 1; n <= sol.residuals.size(); ++n) {
      const double rate = m.lambda_at(n);
      const double prev = n == 1 ? m.service_at(1).lst(rate) : sol.residuals[n - 2].eval(rate);
      const double up = sol.pi[n - 1] * m.lambda_at(n - 1) * (1.0 - prev);
      const double down = sol.pi[n] * rate * m.service_at(n).lst(rate);
      EXPECT_LE(std::abs(up - down), 1e-9 * std::max(up, down)) << "trial " << trial << " n=" << n;
    }
    // Every seventh level plus the last; deep levels are slow to expand off their rates.
    std::vector<std::size_t> levels;
    for (std::size_t i = 0; i < sol.residuals.size(); i += 7) levels.push_back(i);
    if (levels.back() + 1 != sol.residuals.size()) levels.push_back(sol.residuals.size() - 1);
    for (std::size_t i : levels) {
      const auto& r = sol.residuals[i];
      EXPECT_NEAR(r.eval(0.0), 1.0, 1e-10);
      double prev = 1.0 + 1e-12;
      for (double s = 0.0; s <= 10.0; s += 0.5) {
        const double v = r.eval(s);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, prev + 1e-12);
        prev = v;
      }
    }
  }
  EXPECT_GE(solved, 20);
}

// Reference values from tests/reference/mngn1_reference.py (1500-digit arithmetic).
TEST(MnGn1, MixedChainMatchesHighPrecisionReference) {
  const MnGn1Model m{RateSchedule({1.2234074936009942}, 2.468581912546686),
                     {DistributionSpec::exponential(0.9449460059669903),
                      DistributionSpec::uniform(0.04712758229941978, 1.6467789770244412),
                      DistributionSpec::uniform(0.30672902683779774, 1.1307202927118731)},
                     DistributionSpec::erlang(2, 7.973315423687806)};
  const auto r = rbq::mngn1::residuals_mngn1(m, 12);
  const double ref8[] = {0.48937420808917984, 0.44274436553550244, 0.40387089996838396, 0.37100915734859754};
  const double ref12[] = {0.47664483080476064, 0.4314976553208936, 0.39387935566651498, 0.36207577666226985};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(r[7].eval(5.0 + i), ref8[i], 1e-13) << i;
    EXPECT_NEAR(r[11].eval(5.0 + i), ref12[i], 1e-13) << i;
  }
}

TEST(MnGn1, VaryingRatesMatchHighPrecisionReference) {
  std::vector<double> head{1.0, 0.7};
  for (int n = 2; n <= 40; ++n) head.push_back(1.2 + 0.3 / n);
  const MnGn1Model m{RateSchedule(head, 1.2),
                     {DistributionSpec::uniform(0.2, 1.0), DistributionSpec::deterministic(0.5)},
                     DistributionSpec::erlang(2, 4.0)};
  const auto r = rbq::mngn1::residuals_mngn1(m, 40);
  const double s[] = {0.0, 0.25, 1.0, 2.5, 4.0, 10.0};
  const double ref10[] = {1.0, 0.91780863617435804, 0.73246762959148304, 0.51548629448570309, 0.39448375592380073,
                          0.19958131100720087};
  const double ref40[] = {1.0, 0.91798686417086307, 0.73298203745379427, 0.51624561753519862, 0.39528443352155355,
                          0.20023219062983963};
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(r[9].eval(s[i]), ref10[i], 1e-13) << s[i];
    EXPECT_NEAR(r[39].eval(s[i]), ref40[i], 1e-13) << s[i];
  }
}
