#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "rbq/error.hpp"
#include "rbq/oracles.hpp"
#include "rbq/serialization.hpp"
#include "rbq/sim/empirical.hpp"

namespace rbq::cli {
namespace {

using nlohmann::json;

json levels_json(const std::vector<double>& v, std::size_t n_max) {
  json out = json::object();
  for (std::size_t n = 0; n <= n_max; ++n) out[std::to_string(n)] = round_sig(Analysis::level(v, n));
  return out;
}

// Replications that produced at least one sample at level n.
std::size_t replications_with(const sim::SimStats& stats, std::uint32_t n) {
  std::size_t count = 0;
  for (const auto& rep : stats.replications) {
    if (std::any_of(rep.residuals.begin(), rep.residuals.end(), [n](const auto& r) { return r.n == n; })) ++count;
  }
  return count;
}

Check statistical(std::string name, double analytic, const sim::Estimate& e, double z) {
  const double tol = std::max(z * e.std_error, 1e-12);
  return {std::move(name), analytic, e.value, tol, std::abs(e.value - analytic) <= tol};
}

std::string at(const char* what, std::size_t n) { return std::string(what) + "[" + std::to_string(n) + "]"; }

}  // namespace

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const Transform* Analysis::residual(std::size_t n) const {
  if (n < residual_offset || residuals.empty()) return nullptr;
  return &residuals[std::min(n - residual_offset, residuals.size() - 1)];
}

Analysis analyze_model(const ModelConfig& model) {
  model.check_stable();
  Analysis out;
  out.kind = model.kind;
  auto from_gmn1 = [&out](const gmn1::Gmn1Model& m) {
    const auto sol = gmn1::steady_state_gmn1(m);
    out.rho = m.arrival_rate() / m.mu.tail();
    out.sigma = sol.sigma_tail;
    out.a = sol.a;
    out.pi = sol.pi;
    out.residuals = sol.residuals;
    out.first_prob = [m](std::size_t n) -> std::optional<double> { return gmn1::first_departure_prob(m, n); };
  };
  switch (model.kind) {
    case ModelKind::Gm1: {
      const auto& m = std::get<gm1::Gm1Model>(model.model);
      const auto sol = gm1::steady_state(m);
      out.rho = sol.rho;
      out.sigma = sol.sigma;
      out.a = sol.a;
      out.pi = sol.pi;
      out.residuals = {sol.residual};
      const double first = 1.0 - m.inter_arrival.lst(m.mu);
      out.first_prob = [first](std::size_t) -> std::optional<double> { return first; };
      break;
    }
    case ModelKind::Gmn1:
      from_gmn1(std::get<gmn1::Gmn1Model>(model.model));
      break;
    case ModelKind::Gmc: {
      const auto& m = std::get<GmcModel>(model.model);
      from_gmn1(gmn1::build_gmc(m.inter_arrival, m.servers, m.mu));
      break;
    }
    case ModelKind::Mngn1: {
      const auto& m = std::get<mngn1::MnGn1Model>(model.model);
      const auto sol = mngn1::steady_state_mngn1(m);
      out.rho = m.lambda.tail() * m.service_tail.mean();
      out.tail_ratio = sol.tail_ratio;
      out.pi = sol.pi;
      out.residuals = sol.residuals;
      out.residual_offset = 1;
      out.first_prob = [m](std::size_t n) -> std::optional<double> {
        if (n < 2) return std::nullopt;
        return mngn1::first_arrival_prob(m, n);
      };
      break;
    }
  }
  return out;
}

json analysis_json(const Config& cfg, const Analysis& a) {
  const auto& grid = cfg.output.s_grid;
  const std::size_t n_max = cfg.output.n_max;
  json out;
  out["schema"] = kAnalysisSchema;
  out["model"] = cfg.analytic.source;
  out["rho"] = round_sig(a.rho);
  if (a.sigma) out["sigma"] = round_sig(*a.sigma);
  if (a.tail_ratio) out["tail_ratio"] = round_sig(*a.tail_ratio);
  out["s_grid"] = grid;
  if (!a.a.empty()) out["a"] = levels_json(a.a, n_max);
  out["pi"] = levels_json(a.pi, n_max);
  json lst = json::object();
  json mean = json::object();
  json first = json::object();
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (const Transform* r = a.residual(n)) {
      json row = json::array();
      for (double s : grid) row.push_back(round_sig(r->eval(s)));
      lst[std::to_string(n)] = std::move(row);
      mean[std::to_string(n)] = round_sig(r->mean());
    }
    if (auto p = a.first_prob(n)) first[std::to_string(n)] = round_sig(*p);
  }
  out["residual_lst"] = std::move(lst);
  out["residual_mean"] = std::move(mean);
  out["first_prob"] = std::move(first);
  return out;
}

void analysis_csv(std::ostream& out, const Config& cfg, const Analysis& a) {
  out << "quantity,n,s,value\n";
  out << "rho,,," << fmt(a.rho) << "\n";
  if (a.sigma) out << "sigma,,," << fmt(*a.sigma) << "\n";
  if (a.tail_ratio) out << "tail_ratio,,," << fmt(*a.tail_ratio) << "\n";
  for (std::size_t n = 0; n <= cfg.output.n_max; ++n) {
    if (!a.a.empty()) out << "a," << n << ",," << fmt(Analysis::level(a.a, n)) << "\n";
    out << "pi," << n << ",," << fmt(Analysis::level(a.pi, n)) << "\n";
  }
  for (std::size_t n = 0; n <= cfg.output.n_max; ++n) {
    const Transform* r = a.residual(n);
    if (!r) continue;
    for (double s : cfg.output.s_grid) out << "residual_lst," << n << "," << fmt(s) << "," << fmt(r->eval(s)) << "\n";
    out << "residual_mean," << n << ",," << fmt(r->mean()) << "\n";
  }
  for (std::size_t n = 0; n <= cfg.output.n_max; ++n) {
    if (auto p = a.first_prob(n)) out << "first_prob," << n << ",," << fmt(*p) << "\n";
  }
}

json simulation_json(const Config& cfg, const sim::SimStats& stats) {
  json out = to_json(stats, cfg.output.n_max);
  out["model"] = cfg.simulated_model().source;
  out["seed"] = cfg.sim.seed;
  out["events_per_replication"] = cfg.sim.events;
  out["warmup_events"] = cfg.sim.warmup_events();
  return out;
}

void simulation_csv(std::ostream& out, const Config& cfg, const sim::SimStats& stats) {
  out << "quantity,n,value,std_error\n";
  auto se = [&stats](auto fn) {
    return sim::across_replications(stats, [&](const sim::ReplicationStats& r) -> std::optional<double> { return fn(r); })
        .std_error;
  };
  for (std::size_t n = 0; n <= cfg.output.n_max; ++n) {
    out << "pi_hat," << n << "," << fmt(stats.time_avg(n)) << ","
        << fmt(se([n](const sim::ReplicationStats& r) { return r.time_avg(n); })) << "\n";
    out << "a_hat," << n << "," << fmt(stats.arrival_epoch(n)) << ","
        << fmt(se([n](const sim::ReplicationStats& r) { return r.arrival_epoch(n); })) << "\n";
    out << "d_hat," << n << "," << fmt(stats.departure_epoch(n)) << ","
        << fmt(se([n](const sim::ReplicationStats& r) { return r.departure_epoch(n); })) << "\n";
  }
  for (const auto& row : sim::tst_rate_report(stats)) {
    if (row.replication != 0) continue;
    out << "tst_up_rate_rep0," << row.n << "," << fmt(row.up_rate) << ",\n";
    out << "tst_down_rate_rep0," << row.n << "," << fmt(row.down_rate) << ",\n";
  }
  out << "rbp_max_imbalance,," << stats.max_imbalance() << ",\n";
  out << "rbp_violations,," << stats.violations() << ",\n";
  out << "events,," << stats.events << ",\n";
  out << "elapsed,," << fmt(stats.elapsed) << ",\n";
}

void residuals_csv(std::ostream& out, const sim::SimStats& stats) {
  out << "n,residual,first_flag\n";
  for (const auto& rep : stats.replications) {
    for (const auto& r : rep.residuals) out << r.n << "," << fmt(r.value) << "," << (r.first ? 1 : 0) << "\n";
  }
}

std::vector<Check> verify_checks(const Config& cfg, const Analysis& a, const sim::SimStats& stats) {
  std::vector<Check> out;
  const double z = cfg.verify.z;
  const auto& grid = cfg.output.s_grid;

  out.push_back({"rbp_max_imbalance", 1.0, static_cast<double>(stats.max_imbalance()), 1.0,
                 stats.max_imbalance() <= 1});
  out.push_back({"rbp_violations", 0.0, static_cast<double>(stats.violations()), 0.0, stats.violations() == 0});

  for (std::size_t n = 0; n < cfg.verify.pi_levels; ++n) {
    const auto e = sim::across_replications(
        stats, [n](const sim::ReplicationStats& r) -> std::optional<double> { return r.time_avg(n); });
    out.push_back(statistical(at("pi", n), Analysis::level(a.pi, n), e, z));
  }
  if (!a.a.empty()) {
    for (std::size_t n = 0; n < cfg.verify.pi_levels; ++n) {
      const auto e = sim::across_replications(
          stats, [n](const sim::ReplicationStats& r) -> std::optional<double> { return r.arrival_epoch(n); });
      out.push_back(statistical(at("a", n), Analysis::level(a.a, n), e, z));
    }
  }

  for (std::size_t n = a.residual_offset; n < cfg.verify.levels; ++n) {
    const auto level = static_cast<std::uint32_t>(n);
    if (replications_with(stats, level) < 2) {
      spdlog::warn("level {}: residual samples in fewer than two replications, checks skipped", n);
      continue;
    }
    const auto est = sim::replicated_lst(stats, level, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.push_back(statistical(at("residual_lst", n) + "(s=" + fmt(grid[i]) + ")", a.residual(n)->eval(grid[i]),
                                est[i], z));
    }
    if (auto p = a.first_prob(n)) out.push_back(statistical(at("first_fraction", n), *p, sim::first_fraction(stats, level), z));
  }

  if (a.kind != ModelKind::Mngn1) {
    // Idle periods are residual inter-arrival times at departures leaving 0.
    const auto est = sim::replicated_idle_lst(stats, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.push_back(statistical("idle_lst(s=" + fmt(grid[i]) + ")", a.residual(0)->eval(grid[i]), est[i], z));
    }
  }

  if (a.kind == ModelKind::Gmc) {
    const auto& m = std::get<GmcModel>(cfg.analytic.model);
    const auto chain = oracles::embedded_chain_gmc(m.inter_arrival, m.servers, m.mu, oracles::default_truncation(a.rho));
    for (std::size_t n = 0; n < cfg.verify.pi_levels; ++n) {
      const double ref = Analysis::level(chain.time_average.probs, n);
      const double got = Analysis::level(a.pi, n);
      out.push_back({at("pi_vs_embedded_chain", n), ref, got, 1e-6, std::abs(got - ref) <= 1e-6});
    }
    const auto c = static_cast<std::size_t>(m.servers);
    for (std::size_t n = c + 1; n < c + 6 && n < a.pi.size(); ++n) {
      const double ratio = a.pi[n] / a.pi[n - 1];
      out.push_back({at("pi_tail_ratio", n), *a.sigma, ratio, 1e-9, std::abs(ratio - *a.sigma) <= 1e-9});
    }
  }
  return out;
}

json verify_json(const std::vector<Check>& checks) {
  json rows = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    rows.push_back({{"check", c.name},
                    {"analytic", round_sig(c.analytic)},
                    {"empirical", round_sig(c.empirical)},
                    {"tolerance", round_sig(c.tolerance)},
                    {"verdict", c.pass ? "PASS" : "FAIL"}});
  }
  return {{"schema", kVerifySchema}, {"checks", std::move(rows)}, {"verdict", all ? "PASS" : "FAIL"}};
}

void verify_csv(std::ostream& out, const std::vector<Check>& checks) {
  out << "check,analytic,empirical,tolerance,verdict\n";
  for (const auto& c : checks) {
    out << '"' << c.name << "\"," << fmt(c.analytic) << "," << fmt(c.empirical) << "," << fmt(c.tolerance) << ","
        << (c.pass ? "PASS" : "FAIL") << "\n";
  }
}

}  // namespace rbq::cli
