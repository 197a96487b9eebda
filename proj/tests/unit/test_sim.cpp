#include <gtest/gtest.h>

#include <cmath>

#include "rbq/error.hpp"
#include "rbq/gmn1.hpp"
#include "rbq/mngn1.hpp"
#include "rbq/sim/empirical.hpp"
#include "rbq/sim/rng.hpp"
#include "rbq/sim/segment_tracker.hpp"
#include "rbq/sim/simulator.hpp"

using rbq::DistributionSpec;
using rbq::RateSchedule;
namespace sim = rbq::sim;

namespace {

sim::SimConfig mm1_config(std::uint64_t events, std::size_t reps) {
  sim::SimConfig cfg{rbq::gmn1::Gmn1Model{DistributionSpec::exponential(1.0), RateSchedule(2.0)}};
  cfg.seed = 42;
  cfg.events = events;
  cfg.replications = reps;
  return cfg;
}

}  // namespace

TEST(SegmentTracker, LevelCrossingCountsCrossings) {
  sim::SegmentTracker tr(sim::Partition::level_crossing(2));
  const std::vector<std::uint64_t> path{0, 1, 2, 3, 4, 3, 2, 3, 2, 1, 2, 3, 2};
  tr.start(0.0, path[0]);
  std::uint64_t ups = 0, downs = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    tr.update(static_cast<double>(i), path[i]);
    if (path[i - 1] == 2 && path[i] == 3) ++ups;
    if (path[i - 1] == 3 && path[i] == 2) ++downs;
  }
  // The first up-crossing starts from the initial state, which is no entry.
  EXPECT_EQ(tr.count_up(), ups - 1);
  EXPECT_EQ(tr.count_down(), downs);
  EXPECT_EQ(tr.violations(), 0u);
  EXPECT_LE(tr.max_imbalance(), 1u);
}

TEST(SegmentTracker, TwoStepCountsTransitionPairs) {
  sim::SegmentTracker tr(sim::Partition::two_step(2), true);
  // 1 -> 2 -> 3 is an up pair; 3 -> 2 -> 1 a down pair; 1 -> 2 -> 1 neither.
  // The starting state is not an entry, so the pair ending at t = 2 is skipped.
  const std::vector<std::uint64_t> path{1, 2, 3, 2, 3, 2, 1, 2, 1, 2, 3, 4, 3, 2, 1};
  tr.start(0.0, path[0]);
  for (std::size_t i = 1; i < path.size(); ++i) tr.update(static_cast<double>(i), path[i]);
  EXPECT_EQ(tr.count_up(), 1u);
  EXPECT_EQ(tr.count_down(), 2u);
  EXPECT_EQ(tr.up_segment_ends(), (std::vector<double>{10.0}));
  EXPECT_EQ(tr.down_segment_ends(), (std::vector<double>{6.0, 14.0}));
}

TEST(SegmentTracker, RejectsBadPartitions) {
  EXPECT_THROW(sim::SegmentTracker(sim::Partition{{{{0, 3}}}, {{{3, 5}}}, "overlap"}), rbq::PartitionError);
  EXPECT_THROW(sim::SegmentTracker(sim::Partition{{}, {{{3, 5}}}, "empty"}), rbq::PartitionError);
  EXPECT_THROW(sim::Partition::two_step(0), rbq::PartitionError);
}

TEST(Empirical, LstExamples) {
  const std::vector<double> grid{1.0};
  const auto a = sim::empirical_lst(std::vector<double>{0.0, 0.0, 0.0}, grid);
  EXPECT_DOUBLE_EQ(a[0].value, 1.0);
  EXPECT_DOUBLE_EQ(a[0].std_error, 0.0);
  const auto b = sim::empirical_lst(std::vector<double>{std::log(2.0)}, grid);
  EXPECT_DOUBLE_EQ(b[0].value, 0.5);
  EXPECT_DOUBLE_EQ(b[0].std_error, 0.0);
  EXPECT_THROW(sim::empirical_lst(std::vector<double>{}, grid), rbq::EstimationError);
}

TEST(Empirical, ExponentialDrawsMatchLst) {
  sim::RandomStream rng(1, 0, sim::RandomStream::Purpose::Service);
  const auto e = DistributionSpec::exponential(2.0);
  std::vector<double> xs(1'000'000);
  for (double& x : xs) x = e.sample(rng);
  const std::vector<double> grid{2.0};
  const auto est = sim::empirical_lst(xs, grid);
  EXPECT_NEAR(est[0].value, 0.5, 3.0 * est[0].std_error);
}

TEST(Simulator, DeterministicForSeed) {
  auto cfg = mm1_config(50'000, 3);
  const auto a = sim::simulate(cfg);
  cfg.threads = 1;
  const auto b = sim::simulate(cfg);
  ASSERT_EQ(a.replications.size(), b.replications.size());
  EXPECT_EQ(a.time_in_state, b.time_in_state);
  EXPECT_EQ(a.arrivals_finding, b.arrivals_finding);
  for (std::size_t r = 0; r < a.replications.size(); ++r) {
    const auto& x = a.replications[r].residuals;
    const auto& y = b.replications[r].residuals;
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].value, y[i].value);
  }
  cfg.seed = 43;
  EXPECT_NE(sim::simulate(cfg).time_in_state, a.time_in_state);
}

TEST(Simulator, Mm1IdleFraction) {
  const auto stats = sim::simulate(mm1_config(1'000'000, 10));
  const auto est = sim::across_replications(stats, [](const sim::ReplicationStats& r) { return r.time_avg(0); });
  EXPECT_NEAR(est.value, 0.5, 3.0 * est.std_error);
  EXPECT_LT(est.std_error, 0.01);
}

TEST(Simulator, ConservationAndTimeWeights) {
  for (const auto& model : {sim::QueueModel{rbq::gmn1::Gmn1Model{DistributionSpec::deterministic(1.0),
                                                                   RateSchedule({1.0}, 1.5)}},
                            sim::QueueModel{rbq::mngn1::MnGn1Model{RateSchedule({0.5}, 0.8),
                                                                   {DistributionSpec::uniform(0.2, 1.0)},
                                                                   DistributionSpec::erlang(2, 3.0)}}}) {
    sim::SimConfig cfg{model};
    cfg.events = 100'000;
    cfg.replications = 2;
    const auto stats = sim::simulate(cfg);
    for (const auto& r : stats.replications) {
      EXPECT_EQ(r.arrivals + r.initial_queue, r.departures + r.final_queue);
      double t = 0.0;
      for (double x : r.time_in_state) t += x;
      EXPECT_NEAR(t, r.elapsed, 1e-9 * r.elapsed);
      EXPECT_EQ(r.events, 90'000u);
      for (const auto& tr : r.trackers) {
        EXPECT_LE(tr.max_imbalance, 1u);
        EXPECT_EQ(tr.violations, 0u);
      }
    }
    double a = 0.0;
    for (std::size_t n = 0; n < stats.arrivals_finding.size(); ++n) a += stats.arrival_epoch(n);
    EXPECT_NEAR(a, 1.0, 1e-12);
  }
}

TEST(Simulator, TstReport) {
  const auto stats = sim::simulate(mm1_config(200'000, 2));
  const auto rows = sim::tst_rate_report(stats);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& row : rows) {
    EXPECT_LE(row.count_gap, 1u);
    if (row.n == 3) EXPECT_NEAR(row.up_rate, row.down_rate, 2.0 / stats.replications[row.replication].elapsed);
  }
}

TEST(Simulator, ZeroTrafficHasNoTransitions) {
  sim::SimConfig cfg{rbq::gmn1::Gmn1Model{DistributionSpec::exponential(1e-9), RateSchedule(1.0)}};
  cfg.horizon = 1.0;
  cfg.warmup = 0;
  cfg.replications = 1;
  const auto stats = sim::simulate(cfg);
  for (const auto& row : sim::tst_rate_report(stats)) {
    EXPECT_EQ(row.up_rate, 0.0);
    EXPECT_EQ(row.down_rate, 0.0);
  }
  EXPECT_DOUBLE_EQ(stats.elapsed, 1.0);
}

TEST(Simulator, FirstDepartureFractions) {
  const rbq::gmn1::Gmn1Model m{DistributionSpec::deterministic(1.0), RateSchedule({1.0}, 1.5)};
  sim::SimConfig cfg{m};
  cfg.events = 400'000;
  const auto stats = sim::simulate(cfg);
  for (std::uint32_t n = 0; n < 4; ++n) {
    const auto est = sim::first_fraction(stats, n);
    EXPECT_NEAR(est.value, rbq::gmn1::first_departure_prob(m, n), 3.5 * est.std_error) << n;
  }
}

TEST(Simulator, ConfigValidation) {
  auto cfg = mm1_config(100, 1);
  cfg.warmup = 100;
  EXPECT_THROW(sim::simulate(cfg), rbq::ConfigError);
  cfg = mm1_config(100, 0);
  EXPECT_THROW(sim::simulate(cfg), rbq::ConfigError);
}
