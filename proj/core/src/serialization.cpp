#include "rbq/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "rbq/error.hpp"
#include "rbq/sim/empirical.hpp"

namespace rbq {
namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(where + ": field '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(where + ": field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(where + ": field '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json intervals_to_json(const sim::IntervalSet& s) {
  json out = json::array();
  for (const auto& [lo, hi] : s.intervals) {
    out.push_back(json::array({lo, hi == sim::kUnbounded ? json(nullptr) : json(hi)}));
  }
  return out;
}

sim::IntervalSet intervals_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of [lo, hi] pairs");
  sim::IntervalSet out;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_unsigned() ||
        !(iv[1].is_null() || iv[1].is_number_unsigned())) {
      throw ConfigError(where + ": each interval must be [lo, hi] with nonnegative integers (hi may be null)");
    }
    out.intervals.emplace_back(iv[0].get<std::uint64_t>(), iv[1].is_null() ? sim::kUnbounded : iv[1].get<std::uint64_t>());
  }
  return out;
}

template <class Fn>
json per_level(std::size_t n_max, Fn fn) {
  json out = json::object();
  for (std::size_t n = 0; n <= n_max; ++n) out[std::to_string(n)] = round_sig(fn(n));
  return out;
}

}  // namespace

double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

json to_json(const DistributionSpec& d) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, DistributionSpec::Exponential>) {
          return {{"family", "exponential"}, {"rate", f.rate}};
        } else if constexpr (std::is_same_v<T, DistributionSpec::Deterministic>) {
          return {{"family", "deterministic"}, {"value", f.value}};
        } else if constexpr (std::is_same_v<T, DistributionSpec::Erlang>) {
          return {{"family", "erlang"}, {"shape", f.shape}, {"rate", f.rate}};
        } else if constexpr (std::is_same_v<T, DistributionSpec::HyperExponential>) {
          return {{"family", "hyperexponential"}, {"probs", f.probs}, {"rates", f.rates}};
        } else {
          return {{"family", "uniform"}, {"lo", f.lo}, {"hi", f.hi}};
        }
      },
      d.family());
}

DistributionSpec distribution_from_json(const json& j) {
  const std::string where = "distribution";
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError(where + ": expected an object with a string 'family'");
  }
  const auto family = j.at("family").get<std::string>();
  try {
    if (family == "exponential") {
      only_keys(j, {"family", "rate"}, where);
      return DistributionSpec::exponential(number(j, "rate", where));
    }
    if (family == "deterministic") {
      only_keys(j, {"family", "value"}, where);
      return DistributionSpec::deterministic(number(j, "value", where));
    }
    if (family == "erlang") {
      only_keys(j, {"family", "shape", "rate"}, where);
      if (!j.contains("shape") || !j.at("shape").is_number_integer()) {
        throw ConfigError(where + ": erlang 'shape' must be an integer");
      }
      return DistributionSpec::erlang(j.at("shape").get<int>(), number(j, "rate", where));
    }
    if (family == "hyperexponential") {
      only_keys(j, {"family", "probs", "rates"}, where);
      return DistributionSpec::hyperexponential(numbers(j, "probs", where), numbers(j, "rates", where));
    }
    if (family == "uniform") {
      only_keys(j, {"family", "lo", "hi"}, where);
      return DistributionSpec::uniform(number(j, "lo", where), number(j, "hi", where));
    }
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown family '" + family + "'");
}

json to_json(const RateSchedule& r) { return {{"head", r.head()}, {"tail", r.tail()}}; }

RateSchedule schedule_from_json(const json& j) {
  const std::string where = "rate schedule";
  try {
    if (j.is_number()) return RateSchedule(j.get<double>());
    only_keys(j, {"head", "tail"}, where);
    std::vector<double> head;
    if (j.contains("head")) head = numbers(j, "head", where);
    return RateSchedule(std::move(head), number(j, "tail", where));
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

json to_json(const sim::Partition& p) {
  return {{"label", p.label}, {"down", intervals_to_json(p.down)}, {"up", intervals_to_json(p.up)}};
}

sim::Partition partition_from_json(const json& j) {
  const std::string where = "partition";
  only_keys(j, {"label", "down", "up"}, where);
  sim::Partition p;
  if (j.contains("label")) {
    if (!j.at("label").is_string()) throw ConfigError(where + ": 'label' must be a string");
    p.label = j.at("label").get<std::string>();
  }
  if (!j.contains("down") || !j.contains("up")) throw ConfigError(where + ": 'down' and 'up' are required");
  p.down = intervals_from_json(j.at("down"), where);
  p.up = intervals_from_json(j.at("up"), where);
  try {
    p.validate();
  } catch (const PartitionError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

json to_json(const sim::SimStats& stats, std::size_t n_max) {
  using sim::ReplicationStats;
  auto se_of = [&](auto fn) {
    return [&stats, fn](std::size_t n) {
      return sim::across_replications(stats, [&](const ReplicationStats& r) -> std::optional<double> { return fn(r, n); })
          .std_error;
    };
  };
  json out;
  out["schema"] = kSimStatsSchema;
  out["replications"] = stats.replications.size();
  out["events"] = stats.events;
  out["elapsed"] = round_sig(stats.elapsed);
  out["pi_hat"] = per_level(n_max, [&](std::size_t n) { return stats.time_avg(n); });
  out["pi_hat_se"] = per_level(n_max, se_of([](const ReplicationStats& r, std::size_t n) { return r.time_avg(n); }));
  out["a_hat"] = per_level(n_max, [&](std::size_t n) { return stats.arrival_epoch(n); });
  out["a_hat_se"] =
      per_level(n_max, se_of([](const ReplicationStats& r, std::size_t n) { return r.arrival_epoch(n); }));
  out["d_hat"] = per_level(n_max, [&](std::size_t n) { return stats.departure_epoch(n); });
  out["d_hat_se"] =
      per_level(n_max, se_of([](const ReplicationStats& r, std::size_t n) { return r.departure_epoch(n); }));

  json trackers = json::array();
  if (!stats.replications.empty()) {
    const auto& first = stats.replications.front().trackers;
    for (std::size_t i = 0; i < first.size(); ++i) {
      std::uint64_t up = 0, down = 0, imbalance = 0, violations = 0;
      for (const auto& r : stats.replications) {
        const auto& t = r.trackers[i];
        up += t.count_up;
        down += t.count_down;
        imbalance = std::max(imbalance, t.max_imbalance);
        violations += t.violations;
      }
      json t = to_json(first[i].partition);
      t["count_up"] = up;
      t["count_down"] = down;
      t["max_imbalance"] = imbalance;
      t["violations"] = violations;
      trackers.push_back(std::move(t));
    }
  }
  out["rbp_trackers"] = std::move(trackers);
  out["rbp_max_imbalance"] = stats.max_imbalance();
  out["rbp_violations"] = stats.violations();

  json tst = json::array();
  if (stats.elapsed > 0.0) {
    std::map<std::size_t, std::array<std::uint64_t, 3>> levels;  // up, down, max gap
    for (const auto& row : sim::tst_rate_report(stats)) {
      auto& l = levels[row.n];
      l[0] += row.up_count;
      l[1] += row.down_count;
      l[2] = std::max(l[2], row.count_gap);
    }
    for (const auto& [n, l] : levels) {
      tst.push_back({{"n", n},
                     {"up_count", l[0]},
                     {"down_count", l[1]},
                     {"up_rate", round_sig(static_cast<double>(l[0]) / stats.elapsed)},
                     {"down_rate", round_sig(static_cast<double>(l[1]) / stats.elapsed)},
                     {"max_count_gap", l[2]}});
    }
  }
  out["tst"] = std::move(tst);

  std::size_t idle_count = 0;
  double idle_sum = 0.0;
  for (const auto& r : stats.replications) {
    idle_count += r.idle_periods.size();
    for (double x : r.idle_periods) idle_sum += x;
  }
  out["idle"] = {{"count", idle_count}, {"mean", round_sig(idle_count ? idle_sum / idle_count : 0.0)}};

  json residuals = json::object();
  for (std::uint32_t n = 0; n <= n_max; ++n) {
    const auto xs = sim::residuals_at(stats, n);
    if (xs.empty()) continue;
    double sum = 0.0;
    for (double x : xs) sum += x;
    residuals[std::to_string(n)] = {{"count", xs.size()},
                                    {"mean", round_sig(sum / static_cast<double>(xs.size()))},
                                    {"first_fraction", round_sig(sim::first_fraction(stats, n).value)}};
  }
  out["residuals"] = std::move(residuals);

  json reps = json::array();
  for (const auto& r : stats.replications) {
    std::uint64_t imbalance = 0;
    for (const auto& t : r.trackers) imbalance = std::max(imbalance, t.max_imbalance);
    reps.push_back({{"replication", r.replication},
                    {"events", r.events},
                    {"elapsed", round_sig(r.elapsed)},
                    {"arrivals", r.arrivals},
                    {"departures", r.departures},
                    {"initial_queue", r.initial_queue},
                    {"final_queue", r.final_queue},
                    {"capped", r.capped},
                    {"max_imbalance", imbalance}});
  }
  out["per_replication"] = std::move(reps);
  return out;
}

}  // namespace rbq
