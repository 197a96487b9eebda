#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rbq/gmn1.hpp"
#include "rbq/mngn1.hpp"
#include "rbq/sim/partition.hpp"

namespace rbq::sim {

using QueueModel = std::variant<gmn1::Gmn1Model, mngn1::MnGn1Model>;

struct SimConfig {
  QueueModel model;
  std::uint64_t seed = 1;
  std::uint64_t events = 1'000'000;       // events per replication (arrivals + departures)
  std::optional<double> horizon;          // if set, measure for this much time after warmup instead
  std::optional<std::uint64_t> warmup;    // warmup events; default 10% of `events`
  std::vector<Partition> trackers;        // extra RBP partitions
  std::size_t tst_levels = 5;             // two-step trackers for n = 1..tst_levels
  std::size_t residual_levels = 16;       // residual samples kept for n < residual_levels
  std::size_t replications = 10;
  std::size_t threads = 0;                // 0: hardware concurrency
  std::uint64_t max_events = 500'000'000; // hard cap in horizon mode

  std::uint64_t warmup_events() const noexcept { return warmup.value_or(events / 10); }
  // Throws ConfigError for inconsistent settings.
  void validate() const;
};

struct ResidualSample {
  std::uint32_t n;  // customers left behind (G/Mn/1) or found (Mn/Gn/1)
  bool first;       // first departure of the inter-arrival / first arrival of the service
  double value;
};

struct TrackerReport {
  Partition partition;
  std::uint64_t count_up = 0;
  std::uint64_t count_down = 0;
  std::uint64_t max_imbalance = 0;
  std::uint64_t violations = 0;
};

struct ReplicationStats {
  std::uint64_t replication = 0;
  double elapsed = 0.0;                        // measured time
  std::vector<double> time_in_state;           // time spent with n present
  std::vector<std::uint64_t> arrivals_finding;
  std::vector<std::uint64_t> departures_leaving;
  std::vector<ResidualSample> residuals;
  std::vector<double> idle_periods;
  std::vector<TrackerReport> trackers;         // user partitions first, then tst_1..tst_L
  std::uint64_t events = 0;                    // measured events
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t initial_queue = 0;             // at the start of measurement
  std::uint64_t final_queue = 0;
  bool capped = false;

  double time_avg(std::size_t n) const noexcept;
  double arrival_epoch(std::size_t n) const noexcept;
  double departure_epoch(std::size_t n) const noexcept;
  // Tracker for the two-step partition at n, if any.
  const TrackerReport* tst(std::size_t n) const noexcept;
};

// Pooled over replications; the per-replication records are kept for
// replication-based standard errors.
struct SimStats {
  std::vector<ReplicationStats> replications;
  double elapsed = 0.0;
  std::vector<double> time_in_state;
  std::vector<std::uint64_t> arrivals_finding;
  std::vector<std::uint64_t> departures_leaving;
  std::uint64_t events = 0;

  double time_avg(std::size_t n) const noexcept;
  double arrival_epoch(std::size_t n) const noexcept;
  double departure_epoch(std::size_t n) const noexcept;
  std::uint64_t max_imbalance() const noexcept;
  std::uint64_t violations() const noexcept;
};

// Runs config.replications independent replications (in parallel, capped
// at config.threads) and pools them. Deterministic in config.seed.
SimStats simulate(const SimConfig& config);

// A single replication; exposed for tests.
ReplicationStats simulate_replication(const SimConfig& config, std::uint64_t replication);

}  // namespace rbq::sim
