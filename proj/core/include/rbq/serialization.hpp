#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>

#include "rbq/distribution.hpp"
#include "rbq/rate_schedule.hpp"
#include "rbq/sim/partition.hpp"
#include "rbq/sim/simulator.hpp"

namespace rbq {

inline constexpr const char* kSimStatsSchema = "rbq.simstats/1";

// Rounds to `digits` significant decimal digits, so that dumping the JSON
// double prints at most that many.
double round_sig(double x, int digits = 12);

// Tagged records, e.g. {"family": "erlang", "shape": 2, "rate": 3.0}.
// Parsing rejects unknown keys and throws ConfigError on malformed input.
nlohmann::json to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const nlohmann::json& j);

// {"head": [...], "tail": x}; a bare number is a constant schedule.
nlohmann::json to_json(const RateSchedule& r);
RateSchedule schedule_from_json(const nlohmann::json& j);

// {"label": ..., "down": [[lo, hi], ...], "up": [[lo, null], ...]}; null
// marks an interval unbounded above.
nlohmann::json to_json(const sim::Partition& p);
sim::Partition partition_from_json(const nlohmann::json& j);

// Versioned summary of a simulation: pooled estimates with
// replication-based standard errors for n = 0..n_max, tracker verdicts,
// two-step tables and per-replication bookkeeping.
nlohmann::json to_json(const sim::SimStats& stats, std::size_t n_max);

}  // namespace rbq
