#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rbq/sim/simulator.hpp"

namespace rbq::sim {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Mean of exp(-s x) over the samples at each s, with sample std / sqrt(m).
// Throws EstimationError for an empty sample.
std::vector<Estimate> empirical_lst(std::span<const double> samples, std::span<const double> s_grid);

// Mean and standard error across replications of a per-replication
// statistic; replications where `stat` yields nothing are skipped.
Estimate across_replications(const SimStats& stats,
                             const std::function<std::optional<double>(const ReplicationStats&)>& stat);

// Residual values recorded at level n, optionally only those with the given
// first flag.
std::vector<double> residuals_at(const ReplicationStats& rep, std::uint32_t n, std::optional<bool> first = std::nullopt);
std::vector<double> residuals_at(const SimStats& stats, std::uint32_t n, std::optional<bool> first = std::nullopt);

// Replication-based estimate of E[exp(-s R)] for the residuals at level n.
std::vector<Estimate> replicated_lst(const SimStats& stats, std::uint32_t n, std::span<const double> s_grid);

// Same for the idle periods.
std::vector<Estimate> replicated_idle_lst(const SimStats& stats, std::span<const double> s_grid);

// Fraction of level-n residual samples that carry the first flag.
Estimate first_fraction(const SimStats& stats, std::uint32_t n);

struct TstRow {
  std::uint64_t replication;
  std::size_t n;
  std::uint64_t up_count;
  std::uint64_t down_count;
  double up_rate;
  double down_rate;
  std::uint64_t count_gap;  // |up - down|, at most 1
};

// Two-step up/down rates per level and replication. Throws EstimationError
// if a replication has no measured time.
std::vector<TstRow> tst_rate_report(const SimStats& stats);

}  // namespace rbq::sim
