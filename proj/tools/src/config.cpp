#include "config.hpp"

#include <fstream>
#include <set>

#include "rbq/error.hpp"
#include "rbq/serialization.hpp"

namespace rbq::cli {
namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

const json& required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double positive(const json& j, const char* key, const std::string& where) {
  const auto& v = required(j, key, where);
  if (!v.is_number() || !(v.get<double>() > 0.0)) {
    throw ConfigError(where + ": '" + key + "' must be a positive number");
  }
  return v.get<double>();
}

std::uint64_t count(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(where + ": '" + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

RateSchedule schedule(const json& j, const char* key, const std::string& where) {
  return schedule_from_json(required(j, key, where));
}

}  // namespace

std::string kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gm1:
      return "gm1";
    case ModelKind::Gmn1:
      return "gmn1";
    case ModelKind::Gmc:
      return "gmc";
    case ModelKind::Mngn1:
      return "mngn1";
  }
  return "?";
}

sim::QueueModel ModelConfig::queue() const {
  switch (kind) {
    case ModelKind::Gm1: {
      const auto& m = std::get<gm1::Gm1Model>(model);
      return gmn1::Gmn1Model{m.inter_arrival, RateSchedule(m.mu)};
    }
    case ModelKind::Gmn1:
      return std::get<gmn1::Gmn1Model>(model);
    case ModelKind::Gmc: {
      const auto& m = std::get<GmcModel>(model);
      return gmn1::build_gmc(m.inter_arrival, m.servers, m.mu);
    }
    case ModelKind::Mngn1:
      return std::get<mngn1::MnGn1Model>(model);
  }
  throw ConfigError("unknown model kind");
}

void ModelConfig::check_stable() const {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GmcModel>) {
          gmn1::build_gmc(m.inter_arrival, m.servers, m.mu).check_stable();
        } else {
          m.check_stable();
        }
      },
      model);
}

ModelConfig model_from_json(const json& j) {
  const std::string where = "model";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError(where + ": expected an object with a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  ModelConfig out{ModelKind::Gm1, gm1::Gm1Model{DistributionSpec::exponential(1.0), 1.0}, j};
  if (kind == "gm1") {
    only_keys(j, {"kind", "inter_arrival", "mu"}, where);
    out.kind = ModelKind::Gm1;
    out.model = gm1::Gm1Model{distribution_from_json(required(j, "inter_arrival", where)), positive(j, "mu", where)};
  } else if (kind == "gmn1") {
    only_keys(j, {"kind", "inter_arrival", "mu"}, where);
    out.kind = ModelKind::Gmn1;
    out.model = gmn1::Gmn1Model{distribution_from_json(required(j, "inter_arrival", where)), schedule(j, "mu", where)};
  } else if (kind == "gmc") {
    only_keys(j, {"kind", "inter_arrival", "servers", "mu"}, where);
    const auto& c = required(j, "servers", where);
    if (!c.is_number_unsigned() || c.get<std::uint64_t>() < 1 || c.get<std::uint64_t>() > 1000) {
      throw ConfigError(where + ": 'servers' must be an integer in [1, 1000]");
    }
    out.kind = ModelKind::Gmc;
    out.model = GmcModel{distribution_from_json(required(j, "inter_arrival", where)), c.get<int>(),
                         positive(j, "mu", where)};
  } else if (kind == "mngn1") {
    only_keys(j, {"kind", "lambda", "services", "service_tail"}, where);
    std::vector<DistributionSpec> services;
    if (j.contains("services")) {
      if (!j.at("services").is_array()) throw ConfigError(where + ": 'services' must be a list of distributions");
      for (const auto& d : j.at("services")) services.push_back(distribution_from_json(d));
    }
    out.kind = ModelKind::Mngn1;
    out.model = mngn1::MnGn1Model{schedule(j, "lambda", where), std::move(services),
                                  distribution_from_json(required(j, "service_tail", where))};
  } else {
    throw ConfigError(where + ": unknown kind '" + kind + "' (expected gm1, gmn1, gmc or mngn1)");
  }
  return out;
}

Config config_from_json(const json& j) {
  only_keys(j, {"description", "model", "simulation", "output", "verify"}, "config");
  if (j.contains("description") && !j.at("description").is_string()) {
    throw ConfigError("config: 'description' must be a string");
  }
  auto analytic = model_from_json(required(j, "model", "config"));
  sim::SimConfig sim_cfg{.model = analytic.queue()};
  Config cfg{std::move(analytic), std::nullopt, std::move(sim_cfg), {}, {}};

  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    const std::string where = "simulation";
    only_keys(s, {"seed", "events", "warmup", "horizon", "replications", "threads", "tst_levels", "residual_levels",
                  "max_events", "partitions", "model"},
              where);
    if (s.contains("seed")) cfg.sim.seed = count(s, "seed", where);
    if (s.contains("events")) cfg.sim.events = count(s, "events", where);
    if (s.contains("warmup")) cfg.sim.warmup = count(s, "warmup", where);
    if (s.contains("horizon")) cfg.sim.horizon = positive(s, "horizon", where);
    if (s.contains("replications")) cfg.sim.replications = count(s, "replications", where);
    if (s.contains("threads")) cfg.sim.threads = count(s, "threads", where);
    if (s.contains("tst_levels")) cfg.sim.tst_levels = count(s, "tst_levels", where);
    if (s.contains("residual_levels")) cfg.sim.residual_levels = count(s, "residual_levels", where);
    if (s.contains("max_events")) cfg.sim.max_events = count(s, "max_events", where);
    if (s.contains("partitions")) {
      if (!s.at("partitions").is_array()) throw ConfigError(where + ": 'partitions' must be a list");
      for (const auto& p : s.at("partitions")) cfg.sim.trackers.push_back(partition_from_json(p));
    }
    if (s.contains("model")) cfg.simulated = model_from_json(s.at("model"));
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    only_keys(o, {"n_max", "s_grid"}, "output");
    if (o.contains("n_max")) cfg.output.n_max = count(o, "n_max", "output");
    if (o.contains("s_grid")) {
      if (!o.at("s_grid").is_array() || o.at("s_grid").empty()) {
        throw ConfigError("output: 's_grid' must be a nonempty list of numbers");
      }
      cfg.output.s_grid.clear();
      for (const auto& v : o.at("s_grid")) {
        if (!v.is_number() || !(v.get<double>() >= 0.0)) throw ConfigError("output: 's_grid' values must be >= 0");
        cfg.output.s_grid.push_back(v.get<double>());
      }
    }
  }

  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    only_keys(v, {"z", "levels", "pi_levels"}, "verify");
    if (v.contains("z")) cfg.verify.z = positive(v, "z", "verify");
    if (v.contains("levels")) cfg.verify.levels = count(v, "levels", "verify");
    if (v.contains("pi_levels")) cfg.verify.pi_levels = count(v, "pi_levels", "verify");
  }

  cfg.sim.model = cfg.simulated_model().queue();
  cfg.sim.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace rbq::cli
