#include "rbq/sim/simulator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "rbq/error.hpp"
#include "rbq/sim/rng.hpp"
#include "rbq/sim/segment_tracker.hpp"

namespace rbq::sim {
namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

template <class T>
T& grow(std::vector<T>& v, std::size_t i) {
  if (v.size() <= i) v.resize(i + 1, T{});
  return v[i];
}

template <class T>
double fraction(const std::vector<T>& v, std::size_t n) {
  double total = 0.0;
  for (const auto& x : v) total += static_cast<double>(x);
  if (total <= 0.0 || n >= v.size()) return 0.0;
  return static_cast<double>(v[n]) / total;
}

bool unstable(const QueueModel& model) {
  if (const auto* g = std::get_if<gmn1::Gmn1Model>(&model)) return !(g->arrival_rate() < g->mu.tail());
  const auto& m = std::get<mngn1::MnGn1Model>(model);
  return !(m.lambda.tail() * m.service_tail.mean() < 1.0);
}

// Shared bookkeeping of one replication: clock, warmup switch, occupation
// times, trackers and stopping rule.
class Run {
 public:
  Run(const SimConfig& cfg, std::uint64_t replication) : cfg_(cfg) {
    stats.replication = replication;
    for (const auto& p : cfg.trackers) trackers_.emplace_back(p);
    for (std::size_t n = 1; n <= cfg.tst_levels; ++n) trackers_.emplace_back(Partition::two_step(n));
    for (auto& tr : trackers_) tr.start(0.0, 0);
    if (cfg.warmup_events() == 0) begin_measurement();
  }

  bool measuring() const noexcept { return measuring_; }
  double now() const noexcept { return now_; }
  std::uint64_t queue() const noexcept { return n_; }

  // Advances the clock to t. Returns false if the horizon is reached first;
  // the run then ends without processing the event.
  bool advance(double t) {
    if (measuring_ && cfg_.horizon) {
      const double end = start_ + *cfg_.horizon;
      if (t > end) {
        occupy(end);
        return false;
      }
    }
    occupy(t);
    return true;
  }

  void set_queue(std::uint64_t n) {
    n_ = n;
    for (auto& tr : trackers_) tr.update(now_, n_);
  }

  // Counts the event just processed; returns false when the run is over.
  bool finish_event() {
    ++total_;
    if (measuring_) ++stats.events;
    if (!measuring_ && total_ >= cfg_.warmup_events()) begin_measurement();
    if (!cfg_.horizon && total_ >= cfg_.events) return false;
    if (total_ >= cfg_.max_events) {
      stats.capped = true;
      spdlog::warn("replication {} hit the event cap of {}", stats.replication, cfg_.max_events);
      return false;
    }
    return true;
  }

  ReplicationStats finish() {
    stats.final_queue = n_;
    for (const auto& tr : trackers_) {
      stats.trackers.push_back(
          TrackerReport{tr.partition(), tr.count_up(), tr.count_down(), tr.max_imbalance(), tr.violations()});
    }
    return std::move(stats);
  }

  ReplicationStats stats;

 private:
  void occupy(double t) {
    if (measuring_) {
      grow(stats.time_in_state, n_) += t - now_;
      stats.elapsed += t - now_;
    }
    now_ = t;
  }

  void begin_measurement() {
    measuring_ = true;
    start_ = now_;
    stats.initial_queue = n_;
    for (auto& tr : trackers_) tr.reset_counts();
  }

  const SimConfig& cfg_;
  std::vector<SegmentTracker> trackers_;
  bool measuring_ = false;
  double now_ = 0.0;
  double start_ = 0.0;
  std::uint64_t n_ = 0;
  std::uint64_t total_ = 0;
};

// Renewal arrivals; the exponential service clock is redrawn at every event
// with the current rate, so the scheduled next arrival gives exact residuals.
ReplicationStats run_gmn1(const SimConfig& cfg, const gmn1::Gmn1Model& m, std::uint64_t rep) {
  RandomStream arrivals(cfg.seed, rep, RandomStream::Purpose::Arrival);
  RandomStream service(cfg.seed, rep, RandomStream::Purpose::Service);
  Run run(cfg, rep);
  auto& st = run.stats;
  double next_arrival = m.inter_arrival.sample(arrivals);
  bool departed_since_arrival = false;
  double idle_start = -1.0;
  for (;;) {
    const std::uint64_t n = run.queue();
    const double done = n > 0 ? run.now() - std::log(service()) / m.mu_at(n) : kNever;
    const bool arrival = next_arrival <= done;
    if (!run.advance(arrival ? next_arrival : done)) break;
    const double t = run.now();
    if (arrival) {
      if (run.measuring()) {
        ++grow(st.arrivals_finding, n);
        ++st.arrivals;
        if (n == 0 && idle_start >= 0.0) st.idle_periods.push_back(t - idle_start);
      }
      idle_start = -1.0;
      next_arrival = t + m.inter_arrival.sample(arrivals);
      departed_since_arrival = false;
      run.set_queue(n + 1);
    } else {
      const std::uint64_t left = n - 1;
      const bool first = !departed_since_arrival;
      departed_since_arrival = true;
      if (run.measuring()) {
        ++grow(st.departures_leaving, left);
        ++st.departures;
        if (left < cfg.residual_levels) {
          st.residuals.push_back({static_cast<std::uint32_t>(left), first, next_arrival - t});
        }
      }
      idle_start = (left == 0 && run.measuring()) ? t : -1.0;
      run.set_queue(left);
    }
    if (!run.finish_event()) break;
  }
  return run.finish();
}

// Poisson arrivals redrawn at every event; each service is drawn from G_n
// with n counted when it starts, so its scheduled end gives exact residuals.
ReplicationStats run_mngn1(const SimConfig& cfg, const mngn1::MnGn1Model& m, std::uint64_t rep) {
  RandomStream arrivals(cfg.seed, rep, RandomStream::Purpose::Arrival);
  RandomStream service(cfg.seed, rep, RandomStream::Purpose::Service);
  Run run(cfg, rep);
  auto& st = run.stats;
  double completion = kNever;
  bool arrived_in_service = false;
  double idle_start = -1.0;
  for (;;) {
    const std::uint64_t n = run.queue();
    const double next_arrival = run.now() - std::log(arrivals()) / m.lambda_at(n);
    const bool arrival = next_arrival < completion;
    if (!run.advance(arrival ? next_arrival : completion)) break;
    const double t = run.now();
    if (arrival) {
      if (run.measuring()) {
        ++grow(st.arrivals_finding, n);
        ++st.arrivals;
        if (n == 0 && idle_start >= 0.0) st.idle_periods.push_back(t - idle_start);
        if (n >= 1 && n < cfg.residual_levels) {
          st.residuals.push_back({static_cast<std::uint32_t>(n), !arrived_in_service, completion - t});
        }
      }
      if (n == 0) {
        idle_start = -1.0;
        completion = t + m.service_at(1).sample(service);
        arrived_in_service = false;
      } else {
        arrived_in_service = true;
      }
      run.set_queue(n + 1);
    } else {
      const std::uint64_t left = n - 1;
      if (run.measuring()) {
        ++grow(st.departures_leaving, left);
        ++st.departures;
      }
      if (left > 0) {
        completion = t + m.service_at(left).sample(service);
        arrived_in_service = false;
      } else {
        completion = kNever;
        idle_start = run.measuring() ? t : -1.0;
      }
      run.set_queue(left);
    }
    if (!run.finish_event()) break;
  }
  return run.finish();
}

}  // namespace

void SimConfig::validate() const {
  if (replications == 0) throw ConfigError("replications must be positive");
  if (horizon) {
    if (!(*horizon > 0.0) || !std::isfinite(*horizon)) throw ConfigError("horizon must be a positive time");
  } else {
    if (events == 0) throw ConfigError("events must be positive");
    if (warmup_events() >= events) throw ConfigError("warmup must be smaller than the event count");
  }
  for (const auto& p : trackers) p.validate();
}

double ReplicationStats::time_avg(std::size_t n) const noexcept {
  return (elapsed > 0.0 && n < time_in_state.size()) ? time_in_state[n] / elapsed : 0.0;
}
double ReplicationStats::arrival_epoch(std::size_t n) const noexcept { return fraction(arrivals_finding, n); }
double ReplicationStats::departure_epoch(std::size_t n) const noexcept { return fraction(departures_leaving, n); }

const TrackerReport* ReplicationStats::tst(std::size_t n) const noexcept {
  if (n == 0) return nullptr;
  const Partition target = Partition::two_step(n);
  for (const auto& tr : trackers) {
    if (tr.partition == target) return &tr;
  }
  return nullptr;
}

double SimStats::time_avg(std::size_t n) const noexcept {
  return (elapsed > 0.0 && n < time_in_state.size()) ? time_in_state[n] / elapsed : 0.0;
}
double SimStats::arrival_epoch(std::size_t n) const noexcept { return fraction(arrivals_finding, n); }
double SimStats::departure_epoch(std::size_t n) const noexcept { return fraction(departures_leaving, n); }

std::uint64_t SimStats::max_imbalance() const noexcept {
  std::uint64_t out = 0;
  for (const auto& r : replications) {
    for (const auto& t : r.trackers) out = std::max(out, t.max_imbalance);
  }
  return out;
}

std::uint64_t SimStats::violations() const noexcept {
  std::uint64_t out = 0;
  for (const auto& r : replications) {
    for (const auto& t : r.trackers) out += t.violations;
  }
  return out;
}

ReplicationStats simulate_replication(const SimConfig& config, std::uint64_t replication) {
  if (const auto* g = std::get_if<gmn1::Gmn1Model>(&config.model)) return run_gmn1(config, *g, replication);
  return run_mngn1(config, std::get<mngn1::MnGn1Model>(config.model), replication);
}

SimStats simulate(const SimConfig& config) {
  config.validate();
  SimConfig cfg = config;
  if (unstable(cfg.model)) {
    spdlog::warn("simulating an unstable model; the run is capped at {} events", cfg.max_events);
  }

  SimStats out;
  out.replications.resize(cfg.replications);
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.replications);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.replications; r = next++) {
      try {
        out.replications[r] = simulate_replication(cfg, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : out.replications) {
    out.elapsed += r.elapsed;
    out.events += r.events;
    for (std::size_t n = 0; n < r.time_in_state.size(); ++n) grow(out.time_in_state, n) += r.time_in_state[n];
    for (std::size_t n = 0; n < r.arrivals_finding.size(); ++n) grow(out.arrivals_finding, n) += r.arrivals_finding[n];
    for (std::size_t n = 0; n < r.departures_leaving.size(); ++n) {
      grow(out.departures_leaving, n) += r.departures_leaving[n];
    }
  }
  return out;
}

}  // namespace rbq::sim
