#pragma once

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "advgd/attack.hpp"
#include "advgd/engine.hpp"
#include "advgd/objectives.hpp"
#include "advgd/topology.hpp"

// Experiment configuration: strict JSON schema with unknown-key rejection.
// Agent indices are 1-based in config files (and in all emitted artifacts)
// and converted to the library's 0-based indexing here.

namespace advgd {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

struct GraphConfig {
  enum class Kind { complete, random, explicit_edges };
  Kind kind = Kind::complete;
  int n = 0;
  double edge_prob = 0.5;                     // random
  std::uint64_t seed = 0;                     // random
  std::vector<std::pair<int, int>> edges;     // explicit, 0-based
};

struct ObjectiveConfig {
  enum class Kind { paper_quadratic, explicit_locals };
  Kind kind = Kind::paper_quadratic;
  int n = 0;
  int p = 1;
  std::vector<LocalQuadratic> locals;  // explicit
};

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path summary;
  std::optional<std::filesystem::path> plot;
};

struct ExperimentConfig {
  std::string name;
  GraphConfig graph;
  ObjectiveConfig objective;
  AttackSpec attack;  // adversaries already 0-based
  double alpha = 0.6;
  int iterations = 100;
  InitSpec init;
  int replications = 1;
  std::uint64_t base_seed = 0;
  OutputPaths outputs;
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& context,
                       const std::vector<std::string>& required,
                       const std::vector<std::string>& optional) {
  if (!obj.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& item : obj.items()) {
    const std::string& key = item.key();
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ConfigError(context + ": unknown key '" + key + "'");
  }
  for (const auto& key : required)
    if (!obj.contains(key)) throw ConfigError(context + ": missing required key '" + key + "'");
}

inline double as_double(const json& v, const std::string& context) {
  if (!v.is_number()) throw ConfigError(context + ": expected a number");
  return v.get<double>();
}

inline int as_int(const json& v, const std::string& context) {
  if (!v.is_number_integer()) throw ConfigError(context + ": expected an integer");
  return v.get<int>();
}

inline std::uint64_t as_seed(const json& v, const std::string& context) {
  if (!v.is_number_integer()) throw ConfigError(context + ": expected an integer seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) throw ConfigError(context + ": seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

inline std::string as_string(const json& v, const std::string& context) {
  if (!v.is_string()) throw ConfigError(context + ": expected a string");
  return v.get<std::string>();
}

inline Eigen::VectorXd as_vector(const json& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + ": expected an array of numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_double(v[i], context);
  return out;
}

/// Converts a 1-based config agent index to the internal 0-based index.
inline int as_agent_index(const json& v, int n, const std::string& context) {
  const int one_based = as_int(v, context);
  if (one_based < 1 || one_based > n)
    throw ConfigError(context + ": agent index " + std::to_string(one_based) +
                      " out of range 1.." + std::to_string(n));
  return one_based - 1;
}

inline GraphConfig parse_graph(const json& obj) {
  GraphConfig g;
  const std::string kind = obj.contains("kind") ? as_string(obj["kind"], "graph.kind") : "";
  if (kind == "complete") {
    check_keys(obj, "graph", {"kind", "n"}, {});
    g.kind = GraphConfig::Kind::complete;
    g.n = as_int(obj["n"], "graph.n");
    if (g.n < 2) throw ConfigError("graph.n: complete graph needs n >= 2");
  } else if (kind == "random") {
    check_keys(obj, "graph", {"kind", "n", "edge_prob", "seed"}, {});
    g.kind = GraphConfig::Kind::random;
    g.n = as_int(obj["n"], "graph.n");
    g.edge_prob = as_double(obj["edge_prob"], "graph.edge_prob");
    g.seed = as_seed(obj["seed"], "graph.seed");
    if (g.n < 2) throw ConfigError("graph.n: random graph needs n >= 2");
    if (!(g.edge_prob > 0.0 && g.edge_prob <= 1.0))
      throw ConfigError("graph.edge_prob: must lie in (0, 1]");
  } else if (kind == "explicit") {
    check_keys(obj, "graph", {"kind", "n", "edges"}, {});
    g.kind = GraphConfig::Kind::explicit_edges;
    g.n = as_int(obj["n"], "graph.n");
    if (g.n < 1) throw ConfigError("graph.n: must be positive");
    if (!obj["edges"].is_array()) throw ConfigError("graph.edges: expected an array of [i, j] pairs");
    for (const auto& e : obj["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw ConfigError("graph.edges: each edge must be a pair [i, j]");
      const int i = as_agent_index(e[0], g.n, "graph.edges");
      const int j = as_agent_index(e[1], g.n, "graph.edges");
      if (i == j) throw ConfigError("graph.edges: self-loops are not allowed");
      g.edges.emplace_back(i, j);
    }
  } else {
    throw ConfigError("graph.kind: expected 'complete', 'random', or 'explicit'");
  }
  return g;
}

inline ObjectiveConfig parse_objective(const json& obj, int n_graph) {
  ObjectiveConfig o;
  const std::string kind = obj.contains("kind") ? as_string(obj["kind"], "objective.kind") : "";
  if (kind == "paper_quadratic") {
    check_keys(obj, "objective", {"kind", "n", "p"}, {});
    o.kind = ObjectiveConfig::Kind::paper_quadratic;
    o.n = as_int(obj["n"], "objective.n");
    o.p = as_int(obj["p"], "objective.p");
    if (o.n < 1 || o.p < 1) throw ConfigError("objective: n and p must be positive");
  } else if (kind == "explicit") {
    check_keys(obj, "objective", {"kind", "locals"}, {});
    o.kind = ObjectiveConfig::Kind::explicit_locals;
    if (!obj["locals"].is_array() || obj["locals"].empty())
      throw ConfigError("objective.locals: expected a nonempty array");
    for (const auto& lj : obj["locals"]) {
      check_keys(lj, "objective.locals[]", {"A", "b"}, {});
      LocalQuadratic local;
      local.b = as_vector(lj["b"], "objective.locals[].b");
      const auto& aj = lj["A"];
      if (!aj.is_array() || aj.empty())
        throw ConfigError("objective.locals[].A: expected a nonempty matrix");
      local.A.resize(static_cast<Eigen::Index>(aj.size()), static_cast<Eigen::Index>(aj.size()));
      for (std::size_t r = 0; r < aj.size(); ++r) {
        const Eigen::VectorXd row = as_vector(aj[r], "objective.locals[].A");
        if (row.size() != local.A.cols())
          throw ConfigError("objective.locals[].A: matrix must be square");
        local.A.row(static_cast<Eigen::Index>(r)) = row.transpose();
      }
      if (local.b.size() != local.A.rows())
        throw ConfigError("objective.locals[]: A and b dimensions disagree");
      o.locals.push_back(std::move(local));
    }
    o.n = static_cast<int>(o.locals.size());
    o.p = static_cast<int>(o.locals.front().b.size());
    for (const auto& local : o.locals)
      if (local.b.size() != o.p)
        throw ConfigError("objective.locals: all locals must share one dimension");
  } else {
    throw ConfigError("objective.kind: expected 'paper_quadratic' or 'explicit'");
  }
  if (o.n != n_graph)
    throw ConfigError("objective: agent count " + std::to_string(o.n) +
                      " does not match graph n = " + std::to_string(n_graph));
  return o;
}

inline AttackSpec parse_attack(const json& obj, int n, int p) {
  check_keys(obj, "attack", {"mode"}, {"adversaries", "low", "high", "seed", "fixed_epsilon"});
  AttackSpec a;
  const std::string mode = as_string(obj["mode"], "attack.mode");
  if (mode == "none")
    a.mode = AttackMode::none;
  else if (mode == "cooperative_fixed")
    a.mode = AttackMode::cooperative_fixed;
  else if (mode == "independent_per_step")
    a.mode = AttackMode::independent_per_step;
  else
    throw ConfigError("attack.mode: expected 'none', 'cooperative_fixed', or 'independent_per_step'");

  if (obj.contains("adversaries")) {
    if (!obj["adversaries"].is_array())
      throw ConfigError("attack.adversaries: expected an array of agent indices");
    for (const auto& v : obj["adversaries"])
      a.adversaries.push_back(as_agent_index(v, n, "attack.adversaries"));
    std::sort(a.adversaries.begin(), a.adversaries.end());
    if (std::adjacent_find(a.adversaries.begin(), a.adversaries.end()) != a.adversaries.end())
      throw ConfigError("attack.adversaries: duplicate agent index");
  }
  if (obj.contains("low")) a.dist_low = as_double(obj["low"], "attack.low");
  if (obj.contains("high")) a.dist_high = as_double(obj["high"], "attack.high");
  if (obj.contains("seed")) a.seed = as_seed(obj["seed"], "attack.seed");
  if (obj.contains("fixed_epsilon")) {
    a.fixed_epsilon = as_vector(obj["fixed_epsilon"], "attack.fixed_epsilon");
    if (a.fixed_epsilon->size() != p)
      throw ConfigError("attack.fixed_epsilon: expected dimension " + std::to_string(p));
  }
  try {
    validate_attack(a, n);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("attack: ") + err.what());
  }
  return a;
}

inline InitSpec parse_init(const json& obj, int n, int p) {
  const std::string kind = obj.contains("kind") ? as_string(obj["kind"], "init.kind") : "";
  if (kind == "gaussian") {
    check_keys(obj, "init", {"kind", "sigma"}, {});
    const double sigma = as_double(obj["sigma"], "init.sigma");
    if (sigma < 0.0) throw ConfigError("init.sigma: must be nonnegative");
    return InitSpec::gaussian(sigma);
  }
  if (kind == "uniform") {
    check_keys(obj, "init", {"kind", "low", "high"}, {});
    const double low = as_double(obj["low"], "init.low");
    const double high = as_double(obj["high"], "init.high");
    if (!(low < high)) throw ConfigError("init: low must be less than high");
    return InitSpec::uniform(low, high);
  }
  if (kind == "explicit") {
    check_keys(obj, "init", {"kind", "values"}, {});
    if (!obj["values"].is_array())
      throw ConfigError("init.values: expected an array of per-agent vectors");
    std::vector<Eigen::VectorXd> values;
    for (const auto& v : obj["values"]) values.push_back(as_vector(v, "init.values"));
    if (static_cast<int>(values.size()) != n)
      throw ConfigError("init.values: expected one vector per agent (" + std::to_string(n) + ")");
    for (const auto& v : values)
      if (v.size() != p) throw ConfigError("init.values: expected dimension " + std::to_string(p));
    return InitSpec::explicit_values(std::move(values));
  }
  throw ConfigError("init.kind: expected 'gaussian', 'uniform', or 'explicit'");
}

inline OutputPaths parse_outputs(const json& obj) {
  check_keys(obj, "outputs", {"csv", "summary"}, {"plot"});
  OutputPaths out;
  out.csv = as_string(obj["csv"], "outputs.csv");
  out.summary = as_string(obj["summary"], "outputs.summary");
  if (obj.contains("plot")) out.plot = as_string(obj["plot"], "outputs.plot");
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& root) {
  using detail::check_keys;
  check_keys(root, "config",
             {"name", "graph", "objective", "attack", "alpha", "iterations", "init", "outputs"},
             {"replications", "base_seed"});
  ExperimentConfig cfg;
  cfg.name = detail::as_string(root["name"], "name");
  cfg.graph = detail::parse_graph(root["graph"]);
  cfg.objective = detail::parse_objective(root["objective"], cfg.graph.n);
  cfg.attack = detail::parse_attack(root["attack"], cfg.graph.n, cfg.objective.p);
  cfg.alpha = detail::as_double(root["alpha"], "alpha");
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha: must be positive");
  cfg.iterations = detail::as_int(root["iterations"], "iterations");
  if (cfg.iterations < 0) throw ConfigError("iterations: must be nonnegative");
  cfg.init = detail::parse_init(root["init"], cfg.graph.n, cfg.objective.p);
  if (root.contains("replications")) {
    cfg.replications = detail::as_int(root["replications"], "replications");
    if (cfg.replications < 1) throw ConfigError("replications: must be at least 1");
  }
  if (root.contains("base_seed")) cfg.base_seed = detail::as_seed(root["base_seed"], "base_seed");
  cfg.outputs = detail::parse_outputs(root["outputs"]);
  return cfg;
}

/// Loads and validates a config file. Parse errors carry the byte offset
/// reported by the JSON parser; schema errors carry a dotted key path.
inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
  try {
    return parse_experiment_config(root);
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

}  // namespace advgd
