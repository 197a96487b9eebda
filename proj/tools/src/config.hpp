#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbq/gm1.hpp"
#include "rbq/gmn1.hpp"
#include "rbq/mngn1.hpp"
#include "rbq/sim/simulator.hpp"

namespace rbq::cli {

enum class ModelKind { Gm1, Gmn1, Gmc, Mngn1 };

struct GmcModel {
  DistributionSpec inter_arrival;
  int servers;
  double mu;
};

struct ModelConfig {
  ModelKind kind;
  std::variant<gm1::Gm1Model, gmn1::Gmn1Model, GmcModel, mngn1::MnGn1Model> model;
  nlohmann::json source;  // the "model" object as written

  // The queue handed to the simulator.
  sim::QueueModel queue() const;
  // Throws InstabilityError with the violated condition.
  void check_stable() const;
};

struct OutputOptions {
  std::size_t n_max = 10;
  std::vector<double> s_grid{0.25, 0.5, 1.0, 2.0, 4.0};
};

struct VerifyOptions {
  double z = 3.0;              // statistical checks pass within z standard errors
  std::size_t levels = 4;      // residual and first-flag checks for n < levels
  std::size_t pi_levels = 6;   // probability checks for n < pi_levels
};

struct Config {
  ModelConfig analytic;
  std::optional<ModelConfig> simulated;  // simulation.model, when it differs
  sim::SimConfig sim;
  OutputOptions output;
  VerifyOptions verify;

  const ModelConfig& simulated_model() const { return simulated ? *simulated : analytic; }
};

std::string kind_name(ModelKind kind);

// Strict: unknown fields, wrong types and nonpositive rates raise ConfigError.
ModelConfig model_from_json(const nlohmann::json& j);
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);

}  // namespace rbq::cli
