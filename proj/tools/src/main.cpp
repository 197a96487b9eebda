#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "rbq/error.hpp"
#include "report.hpp"

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kInvalidConfig = 2, kUnstable = 3, kNumeric = 4 };

struct Options {
  std::string config;
  std::string format = "json";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string residuals_csv;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("rbq");
  logger->set_pattern("rbq: %l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("RBQ_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw rbq::ConfigError("cannot write '" + opt.out + "'");
  f << text;
}

rbq::cli::Config load(const Options& opt) {
  auto cfg = rbq::cli::load_config(opt.config);
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (opt.threads) cfg.sim.threads = *opt.threads;
  return cfg;
}

int analyze(const Options& opt) {
  const auto cfg = load(opt);
  const auto analysis = rbq::cli::analyze_model(cfg.analytic);
  std::ostringstream s;
  if (opt.format == "csv") {
    rbq::cli::analysis_csv(s, cfg, analysis);
  } else {
    s << rbq::cli::analysis_json(cfg, analysis).dump(2) << "\n";
  }
  emit(opt, s.str());
  return kOk;
}

rbq::sim::SimStats run_simulation(const rbq::cli::Config& cfg) {
  cfg.simulated_model().check_stable();
  spdlog::info("simulating {} x {} events, seed {}", cfg.sim.replications, cfg.sim.events, cfg.sim.seed);
  return rbq::sim::simulate(cfg.sim);
}

int simulate(const Options& opt) {
  const auto cfg = load(opt);
  const auto stats = run_simulation(cfg);
  std::ostringstream s;
  if (opt.format == "csv") {
    rbq::cli::simulation_csv(s, cfg, stats);
  } else {
    s << rbq::cli::simulation_json(cfg, stats).dump(2) << "\n";
  }
  emit(opt, s.str());
  if (!opt.residuals_csv.empty()) {
    std::ofstream f(opt.residuals_csv, std::ios::binary);
    if (!f) throw rbq::ConfigError("cannot write '" + opt.residuals_csv + "'");
    rbq::cli::residuals_csv(f, stats);
  }
  return kOk;
}

int verify(const Options& opt) {
  const auto cfg = load(opt);
  const auto analysis = rbq::cli::analyze_model(cfg.analytic);
  const auto stats = run_simulation(cfg);
  const auto checks = rbq::cli::verify_checks(cfg, analysis, stats);
  std::ostringstream s;
  if (opt.format == "csv") {
    rbq::cli::verify_csv(s, checks);
  } else {
    s << rbq::cli::verify_json(checks).dump(2) << "\n";
  }
  emit(opt, s.str());
  bool all = true;
  for (const auto& c : checks) {
    if (!c.pass) {
      spdlog::error("FAIL {}: analytic {} empirical {} tolerance {}", c.name, rbq::cli::fmt(c.analytic),
                    rbq::cli::fmt(c.empirical), rbq::cli::fmt(c.tolerance));
      all = false;
    }
  }
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Queue analytics by rate balance, with a verifying simulator"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("config", opt.config, "Model config (JSON)")->required();
    cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", opt.out, "Write the report here instead of stdout");
    cmd->add_option("--seed", opt.seed, "Override simulation.seed");
    cmd->add_option("--threads", opt.threads, "Cap on replication threads (0: all cores)");
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "Analytic probabilities and residual transforms");
  auto* simulate_cmd = app.add_subcommand("simulate", "Discrete-event simulation report");
  auto* verify_cmd = app.add_subcommand("verify", "Compare analytics with simulation; exit 1 on any FAIL");
  for (auto* cmd : {analyze_cmd, simulate_cmd, verify_cmd}) add_common(cmd);
  simulate_cmd->add_option("--residuals-csv", opt.residuals_csv, "Stream residual samples (n,residual,first_flag)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*analyze_cmd) return analyze(opt);
    if (*simulate_cmd) return simulate(opt);
    return verify(opt);
  } catch (const rbq::ConfigError& e) {
    spdlog::error("invalid config: {}", e.what());
    return kInvalidConfig;
  } catch (const rbq::PartitionError& e) {
    spdlog::error("invalid config: {}", e.what());
    return kInvalidConfig;
  } catch (const rbq::DomainError& e) {
    spdlog::error("invalid config: {}", e.what());
    return kInvalidConfig;
  } catch (const rbq::InstabilityError& e) {
    spdlog::error("unstable model: {}", e.what());
    return kUnstable;
  } catch (const rbq::Error& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kNumeric;
  }
}
