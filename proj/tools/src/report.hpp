#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "rbq/sim/simulator.hpp"
#include "rbq/transform.hpp"

namespace rbq::cli {

inline constexpr const char* kAnalysisSchema = "rbq.analysis/1";
inline constexpr const char* kVerifySchema = "rbq.verify/1";

// Analytic solution of any model kind, seen through one interface.
struct Analysis {
  ModelKind kind;
  double rho = 0.0;
  std::optional<double> sigma;       // G/M/1 ratio, or the tail ratio of G/Mn/1 and G/M/c
  std::optional<double> tail_ratio;  // Mn/Gn/1 stabilized pi ratio
  std::vector<double> a;             // arrival-epoch probabilities (not for mngn1)
  std::vector<double> pi;
  std::vector<Transform> residuals;  // residuals[i] is level residual_offset + i
  std::size_t residual_offset = 0;
  std::function<std::optional<double>(std::size_t)> first_prob;

  static double level(const std::vector<double>& v, std::size_t n) { return n < v.size() ? v[n] : 0.0; }
  // Residual transform at level n; levels past the computed range reuse the last one.
  const Transform* residual(std::size_t n) const;
};

Analysis analyze_model(const ModelConfig& model);

nlohmann::json analysis_json(const Config& cfg, const Analysis& analysis);
void analysis_csv(std::ostream& out, const Config& cfg, const Analysis& analysis);

nlohmann::json simulation_json(const Config& cfg, const sim::SimStats& stats);
void simulation_csv(std::ostream& out, const Config& cfg, const sim::SimStats& stats);
// Columns n, residual, first_flag.
void residuals_csv(std::ostream& out, const sim::SimStats& stats);

struct Check {
  std::string name;
  double analytic;
  double empirical;
  double tolerance;
  bool pass;
};

std::vector<Check> verify_checks(const Config& cfg, const Analysis& analysis, const sim::SimStats& stats);
nlohmann::json verify_json(const std::vector<Check>& checks);
void verify_csv(std::ostream& out, const std::vector<Check>& checks);

// %.12g, the precision of every emitted float.
std::string fmt(double x);

}  // namespace rbq::cli
