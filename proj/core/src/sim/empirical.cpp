#include "rbq/sim/empirical.hpp"

#include <cmath>

#include "rbq/error.hpp"

namespace rbq::sim {
namespace {

Estimate mean_and_se(const std::vector<double>& xs) {
  const double m = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= m;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (m - 1.0) / m)};
}

std::vector<Estimate> replicated(const SimStats& stats, std::span<const double> s_grid,
                                 const std::function<std::vector<double>(const ReplicationStats&)>& pick) {
  std::vector<std::vector<double>> per_s(s_grid.size());
  for (const auto& rep : stats.replications) {
    const auto xs = pick(rep);
    if (xs.empty()) continue;
    const auto est = empirical_lst(xs, s_grid);
    for (std::size_t i = 0; i < s_grid.size(); ++i) per_s[i].push_back(est[i].value);
  }
  std::vector<Estimate> out;
  for (const auto& v : per_s) {
    if (v.empty()) throw EstimationError("no samples in any replication");
    out.push_back(mean_and_se(v));
  }
  return out;
}

}  // namespace

std::vector<Estimate> empirical_lst(std::span<const double> samples, std::span<const double> s_grid) {
  if (samples.empty()) throw EstimationError("empirical LST of an empty sample");
  std::vector<Estimate> out;
  out.reserve(s_grid.size());
  std::vector<double> values(samples.size());
  for (double s : s_grid) {
    for (std::size_t i = 0; i < samples.size(); ++i) values[i] = std::exp(-s * samples[i]);
    out.push_back(mean_and_se(values));
  }
  return out;
}

Estimate across_replications(const SimStats& stats,
                             const std::function<std::optional<double>(const ReplicationStats&)>& stat) {
  std::vector<double> xs;
  for (const auto& rep : stats.replications) {
    if (auto v = stat(rep)) xs.push_back(*v);
  }
  if (xs.empty()) throw EstimationError("statistic undefined in every replication");
  return mean_and_se(xs);
}

std::vector<double> residuals_at(const ReplicationStats& rep, std::uint32_t n, std::optional<bool> first) {
  std::vector<double> out;
  for (const auto& r : rep.residuals) {
    if (r.n == n && (!first || r.first == *first)) out.push_back(r.value);
  }
  return out;
}

std::vector<double> residuals_at(const SimStats& stats, std::uint32_t n, std::optional<bool> first) {
  std::vector<double> out;
  for (const auto& rep : stats.replications) {
    const auto part = residuals_at(rep, n, first);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<Estimate> replicated_lst(const SimStats& stats, std::uint32_t n, std::span<const double> s_grid) {
  return replicated(stats, s_grid, [n](const ReplicationStats& rep) { return residuals_at(rep, n); });
}

std::vector<Estimate> replicated_idle_lst(const SimStats& stats, std::span<const double> s_grid) {
  return replicated(stats, s_grid, [](const ReplicationStats& rep) { return rep.idle_periods; });
}

Estimate first_fraction(const SimStats& stats, std::uint32_t n) {
  return across_replications(stats, [n](const ReplicationStats& rep) -> std::optional<double> {
    std::size_t total = 0;
    std::size_t first = 0;
    for (const auto& r : rep.residuals) {
      if (r.n != n) continue;
      ++total;
      if (r.first) ++first;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(first) / static_cast<double>(total);
  });
}

std::vector<TstRow> tst_rate_report(const SimStats& stats) {
  std::vector<TstRow> out;
  for (const auto& rep : stats.replications) {
    if (!(rep.elapsed > 0.0)) throw EstimationError("TST report needs positive measured time");
    for (const auto& tr : rep.trackers) {
      const auto& d = tr.partition.down.intervals;
      const auto& u = tr.partition.up.intervals;
      // Only the two-step shape D = [0, n-1], U = [n+1, inf).
      if (d.size() != 1 || u.size() != 1 || d[0].first != 0 || u[0].second != kUnbounded ||
          u[0].first != d[0].second + 2) {
        continue;
      }
      const std::size_t n = static_cast<std::size_t>(d[0].second + 1);
      const std::uint64_t gap = tr.count_up > tr.count_down ? tr.count_up - tr.count_down : tr.count_down - tr.count_up;
      out.push_back(TstRow{rep.replication, n, tr.count_up, tr.count_down,
                           static_cast<double>(tr.count_up) / rep.elapsed,
                           static_cast<double>(tr.count_down) / rep.elapsed, gap});
    }
  }
  return out;
}

}  // namespace rbq::sim
