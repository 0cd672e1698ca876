#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "advgd/analysis.hpp"
#include "advgd/config.hpp"
#include "advgd/engine.hpp"
#include "advgd/io.hpp"

// Experiment orchestration: expands an ExperimentConfig into per-replication
// simulations, runs them, and assembles the CSV / summary artifacts.
//
// Seed plan: replication r derives rep_key = base_seed + r. The initial
// state uses rep_key directly, the attack stream uses mix(attack.seed,
// rep_key), and a random graph is resampled per replication from
// mix(graph.seed, rep_key). Sweep points share base seeds, so runs with
// different adversary counts are paired draw-for-draw.

namespace advgd {

inline Graph build_graph(const GraphConfig& cfg, std::uint64_t rep_key) {
  switch (cfg.kind) {
    case GraphConfig::Kind::complete:
      return complete_graph(cfg.n);
    case GraphConfig::Kind::random:
      return random_connected_graph(cfg.n, cfg.edge_prob, rng::mix(cfg.seed, rep_key));
    case GraphConfig::Kind::explicit_edges:
      return Graph(cfg.n, cfg.edges, GraphKind::general);
  }
  throw std::logic_error("build_graph: unreachable");
}

inline ObjectiveSpec build_objective(const ObjectiveConfig& cfg) {
  if (cfg.kind == ObjectiveConfig::Kind::paper_quadratic) return paper_quadratic(cfg.n, cfg.p);
  return ObjectiveSpec::from_locals(cfg.locals);
}

inline SimulationConfig build_simulation(const ExperimentConfig& cfg, int r) {
  const std::uint64_t rep_key = cfg.base_seed + static_cast<std::uint64_t>(r);
  Graph graph = build_graph(cfg.graph, rep_key);
  WeightMatrix weights = metropolis_weights(graph);
  AttackSpec attack = cfg.attack;
  attack.seed = rng::mix(cfg.attack.seed, rep_key);
  SimulationConfig sim{std::move(graph), std::move(weights), build_objective(cfg.objective),
                       std::move(attack), cfg.alpha,          cfg.iterations,
                       cfg.init,          rep_key};
  validate_simulation(sim);
  return sim;
}

struct ReplicationResult {
  int replication = 0;  // 0-based internally; 1-based in artifacts
  Trajectory traj;
  ErrorSeries series;
  std::vector<int> adversaries;  // 0-based
  double r0 = 0.0;
  double eps_norm = 0.0;
  std::optional<bool> initial_condition;  // absent when no attack
  std::optional<BoundCurve> bound_paper;  // absent when the step size is inadmissible
  std::optional<BoundCurve> bound_geometric;
  std::optional<DominationReport> report_paper;
  std::optional<DominationReport> report_geometric;
  double final_avg_error = 0.0;
  double steady_state_error = 0.0;  // mean avg_error over the last up-to-10 rounds
};

struct ExperimentResult {
  StepSizeCheck check;
  std::vector<ReplicationResult> replications;
};

/// The epsilon magnitude the bound curves are evaluated with: the common
/// vector's norm in cooperative mode, the largest per-round draw in
/// per-step mode, zero with no attack.
inline double attack_eps_norm(const SimulationConfig& sim, const Trajectory& traj) {
  switch (sim.attack.mode) {
    case AttackMode::none:
      return 0.0;
    case AttackMode::cooperative_fixed: {
      const auto eps =
          epsilon_for(sim.attack, sim.attack.adversaries.front(), 0, sim.objective.dimension());
      return eps ? eps->norm() : 0.0;
    }
    case AttackMode::independent_per_step: {
      double worst = 0.0;
      for (const auto& round : traj.eps_log)
        for (const auto& [agent, eps] : round) worst = std::max(worst, eps.norm());
      return worst;
    }
  }
  throw std::logic_error("attack_eps_norm: unreachable");
}

inline std::optional<bool> initial_condition_verdict(const SimulationConfig& sim,
                                                     const Eigen::MatrixXd& X0) {
  const Eigen::VectorXd& x_star = sim.objective.x_star();
  const int p = sim.objective.dimension();
  switch (sim.attack.mode) {
    case AttackMode::none:
      return std::nullopt;
    case AttackMode::cooperative_fixed: {
      const auto eps = epsilon_for(sim.attack, sim.attack.adversaries.front(), 0, p);
      Eigen::VectorXd x0_avg = X0.colwise().mean().transpose();
      return initial_condition_ok(x0_avg, x_star, *eps);
    }
    case AttackMode::independent_per_step: {
      // Per-agent analogue of the average-case test, over the adversaries.
      for (int a : sim.attack.adversaries) {
        const auto eps = epsilon_for(sim.attack, a, 0, p);
        if (!((X0.row(a).transpose() - x_star).norm() < eps->norm())) return false;
      }
      return true;
    }
  }
  throw std::logic_error("initial_condition_verdict: unreachable");
}

inline double steady_state_error(const std::vector<double>& avg_error) {
  const std::size_t window = std::min<std::size_t>(10, avg_error.size());
  double sum = 0.0;
  for (std::size_t k = avg_error.size() - window; k < avg_error.size(); ++k) sum += avg_error[k];
  return sum / static_cast<double>(window);
}

inline ReplicationResult run_replication(const ExperimentConfig& cfg, int r) {
  const SimulationConfig sim = build_simulation(cfg, r);
  ReplicationResult res;
  res.replication = r;
  res.traj = run(sim);
  res.adversaries = sim.attack.adversaries;
  res.series = error_series(res.traj, sim.objective.x_star(), res.adversaries);
  res.r0 = res.series.avg_error.front();
  res.eps_norm = attack_eps_norm(sim, res.traj);
  res.initial_condition = initial_condition_verdict(sim, res.traj.states.front().X);

  const StepSizeCheck chk = step_size_check(cfg.alpha, sim.objective.mu(), sim.objective.lip());
  if (chk.admissible) {
    res.bound_paper = bound_curve(BoundKind::average, res.r0, res.eps_norm, cfg.alpha,
                                  sim.objective.mu(), sim.objective.lip(), cfg.iterations);
    res.bound_geometric = bound_curve_geometric(BoundKind::average, res.r0, res.eps_norm,
                                                cfg.alpha, sim.objective.mu(),
                                                sim.objective.lip(), cfg.iterations);
    res.report_paper = bound_domination_report(res.series, *res.bound_paper);
    res.report_geometric = bound_domination_report(res.series, *res.bound_geometric);
  }
  res.final_avg_error = res.series.avg_error.back();
  res.steady_state_error = steady_state_error(res.series.avg_error);
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  const ObjectiveSpec objective = build_objective(cfg.objective);
  result.check = step_size_check(cfg.alpha, objective.mu(), objective.lip());
  result.replications.reserve(static_cast<std::size_t>(cfg.replications));
  for (int r = 0; r < cfg.replications; ++r) result.replications.push_back(run_replication(cfg, r));
  return result;
}

// ---------------------------------------------------------------------------
// Artifact assembly
// ---------------------------------------------------------------------------

/// Per-iteration CSV. Replication blocks are concatenated in order; a row
/// with k = 0 starts a new block. Bound columns are empty when the step
/// size is inadmissible (the bounds do not apply).
inline std::string experiment_csv(const ExperimentResult& result, int n_agents) {
  std::string out = "k,avg_error,regular_avg_error,bound_paper,bound_geometric";
  for (int i = 1; i <= n_agents; ++i) out += ",per_agent_error_" + std::to_string(i);
  out += "\n";
  for (const auto& rep : result.replications) {
    const std::size_t rounds = rep.series.avg_error.size();
    for (std::size_t k = 0; k < rounds; ++k) {
      out += std::to_string(k);
      out += ",";
      out += io::format_double(rep.series.avg_error[k]);
      out += ",";
      out += io::format_double(rep.series.regular_avg_error[k]);
      out += ",";
      if (rep.bound_paper) out += io::format_double(rep.bound_paper->values[k]);
      out += ",";
      if (rep.bound_geometric) out += io::format_double(rep.bound_geometric->values[k]);
      for (const auto& agent_series : rep.series.per_agent_error) {
        out += ",";
        out += io::format_double(agent_series[k]);
      }
      out += "\n";
    }
  }
  return out;
}

namespace detail {

inline nlohmann::json graph_to_json(const GraphConfig& g) {
  nlohmann::json j;
  switch (g.kind) {
    case GraphConfig::Kind::complete:
      j["kind"] = "complete";
      j["n"] = g.n;
      break;
    case GraphConfig::Kind::random:
      j["kind"] = "random";
      j["n"] = g.n;
      j["edge_prob"] = g.edge_prob;
      j["seed"] = g.seed;
      break;
    case GraphConfig::Kind::explicit_edges: {
      j["kind"] = "explicit";
      j["n"] = g.n;
      auto edges = nlohmann::json::array();
      for (const auto& [i, k] : g.edges) edges.push_back({i + 1, k + 1});
      j["edges"] = std::move(edges);
      break;
    }
  }
  return j;
}

inline nlohmann::json objective_to_json(const ObjectiveConfig& o) {
  nlohmann::json j;
  if (o.kind == ObjectiveConfig::Kind::paper_quadratic) {
    j["kind"] = "paper_quadratic";
    j["n"] = o.n;
    j["p"] = o.p;
    return j;
  }
  j["kind"] = "explicit";
  auto locals = nlohmann::json::array();
  for (const auto& local : o.locals) {
    nlohmann::json lj;
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < local.A.rows(); ++r) {
      auto row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < local.A.cols(); ++c) row.push_back(local.A(r, c));
      rows.push_back(std::move(row));
    }
    lj["A"] = std::move(rows);
    auto b = nlohmann::json::array();
    for (Eigen::Index r = 0; r < local.b.size(); ++r) b.push_back(local.b(r));
    lj["b"] = std::move(b);
    locals.push_back(std::move(lj));
  }
  j["locals"] = std::move(locals);
  return j;
}

inline nlohmann::json attack_to_json(const AttackSpec& a) {
  nlohmann::json j;
  switch (a.mode) {
    case AttackMode::none:
      j["mode"] = "none";
      break;
    case AttackMode::cooperative_fixed:
      j["mode"] = "cooperative_fixed";
      break;
    case AttackMode::independent_per_step:
      j["mode"] = "independent_per_step";
      break;
  }
  auto adversaries = nlohmann::json::array();
  for (int i : a.adversaries) adversaries.push_back(i + 1);
  j["adversaries"] = std::move(adversaries);
  j["low"] = a.dist_low;
  j["high"] = a.dist_high;
  j["seed"] = a.seed;
  if (a.fixed_epsilon) {
    auto eps = nlohmann::json::array();
    for (Eigen::Index r = 0; r < a.fixed_epsilon->size(); ++r) eps.push_back((*a.fixed_epsilon)(r));
    j["fixed_epsilon"] = std::move(eps);
  }
  return j;
}

inline nlohmann::json init_to_json(const InitSpec& init) {
  nlohmann::json j;
  switch (init.kind) {
    case InitSpec::Kind::gaussian:
      j["kind"] = "gaussian";
      j["sigma"] = init.sigma;
      break;
    case InitSpec::Kind::uniform:
      j["kind"] = "uniform";
      j["low"] = init.low;
      j["high"] = init.high;
      break;
    case InitSpec::Kind::explicit_values: {
      j["kind"] = "explicit";
      auto values = nlohmann::json::array();
      for (const auto& v : init.values) {
        auto row = nlohmann::json::array();
        for (Eigen::Index r = 0; r < v.size(); ++r) row.push_back(v(r));
        values.push_back(std::move(row));
      }
      j["values"] = std::move(values);
      break;
    }
  }
  return j;
}

inline nlohmann::json report_to_json(const StepSizeCheck& chk, double r0, double eps_norm,
                                     const std::optional<DominationReport>& report) {
  nlohmann::json j;
  j["admissible"] = chk.admissible;
  j["c1"] = chk.c1;
  j["c2"] = chk.c2;
  j["rho"] = contraction_factor(chk.alpha, chk.c2);
  j["r0"] = r0;
  j["eps_norm"] = eps_norm;
  if (report && report->first_violation_k)
    j["first_violation_k"] = *report->first_violation_k;
  else
    j["first_violation_k"] = nullptr;
  j["max_violation"] = report ? report->max_violation : 0.0;
  return j;
}

}  // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["graph"] = detail::graph_to_json(cfg.graph);
  j["objective"] = detail::objective_to_json(cfg.objective);
  j["attack"] = detail::attack_to_json(cfg.attack);
  j["alpha"] = cfg.alpha;
  j["iterations"] = cfg.iterations;
  j["init"] = detail::init_to_json(cfg.init);
  j["replications"] = cfg.replications;
  j["base_seed"] = cfg.base_seed;
  j["outputs"]["csv"] = cfg.outputs.csv.generic_string();
  j["outputs"]["summary"] = cfg.outputs.summary.generic_string();
  if (cfg.outputs.plot) j["outputs"]["plot"] = cfg.outputs.plot->generic_string();
  return j;
}

/// Run summary. Deliberately excludes timing so repeated runs of the same
/// config are byte-identical; wall time goes to the console instead.
inline nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["config"] = config_to_json(cfg);
  nlohmann::json chk;
  chk["alpha"] = result.check.alpha;
  chk["mu"] = result.check.mu;
  chk["lip"] = result.check.lip;
  chk["c1"] = result.check.c1;
  chk["c2"] = result.check.c2;
  chk["rho"] = contraction_factor(result.check.alpha, result.check.c2);
  chk["upper_ok"] = result.check.upper_ok;
  chk["window_ok"] = result.check.window_ok;
  chk["admissible"] = result.check.admissible;
  j["step_size"] = std::move(chk);
  auto reps = nlohmann::json::array();
  for (const auto& rep : result.replications) {
    nlohmann::json rj;
    rj["replication"] = rep.replication + 1;
    if (rep.initial_condition)
      rj["initial_condition_ok"] = *rep.initial_condition;
    else
      rj["initial_condition_ok"] = nullptr;
    rj["final_avg_error"] = rep.final_avg_error;
    rj["steady_state_error"] = rep.steady_state_error;
    rj["bound_asymptote"] = std::sqrt(2.0) * rep.eps_norm;
    rj["bound_paper"] = detail::report_to_json(result.check, rep.r0, rep.eps_norm, rep.report_paper);
    rj["bound_geometric"] =
        detail::report_to_json(result.check, rep.r0, rep.eps_norm, rep.report_geometric);
    reps.push_back(std::move(rj));
  }
  j["replications"] = std::move(reps);
  return j;
}

// ---------------------------------------------------------------------------
// Adversary-count sweeps
// ---------------------------------------------------------------------------

/// Derives the config for one sweep point: the first m agents become the
/// adversaries (m = 0 drops the attack entirely). Everything else, seeds
/// included, stays as in the base config so points are paired.
inline ExperimentConfig sweep_point_config(const ExperimentConfig& base, int m) {
  if (m < 0 || m > base.graph.n)
    throw ConfigError("sweep: adversary count " + std::to_string(m) + " out of range 0.." +
                      std::to_string(base.graph.n));
  if (m > 0 && base.attack.mode == AttackMode::none)
    throw ConfigError("sweep: base config has attack mode 'none'; cannot place adversaries");
  ExperimentConfig cfg = base;
  cfg.name = base.name + "_m" + std::to_string(m);
  cfg.attack.adversaries.clear();
  if (m == 0) {
    cfg.attack.mode = AttackMode::none;
    cfg.attack.fixed_epsilon.reset();
  } else {
    for (int i = 0; i < m; ++i) cfg.attack.adversaries.push_back(i);
  }
  return cfg;
}

struct SweepPoint {
  int m = 0;
  ExperimentConfig cfg;
  ExperimentResult result;
  double mean_steady_state = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // ordered by m ascending
  bool monotone_increasing = true;
};

inline SweepResult run_sweep(const ExperimentConfig& base, std::vector<int> counts) {
  if (counts.empty()) throw ConfigError("sweep: need at least one adversary count");
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  SweepResult sweep;
  for (int m : counts) {
    SweepPoint point;
    point.m = m;
    point.cfg = sweep_point_config(base, m);
    point.result = run_experiment(point.cfg);
    double sum = 0.0;
    for (const auto& rep : point.result.replications) sum += rep.steady_state_error;
    point.mean_steady_state = sum / static_cast<double>(point.result.replications.size());
    sweep.points.push_back(std::move(point));
  }
  for (std::size_t i = 1; i < sweep.points.size(); ++i)
    if (!(sweep.points[i].mean_steady_state > sweep.points[i - 1].mean_steady_state))
      sweep.monotone_increasing = false;
  return sweep;
}

inline std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "m,replication,final_avg_error,steady_state_error\n";
  for (const auto& point : sweep.points)
    for (const auto& rep : point.result.replications) {
      out += std::to_string(point.m);
      out += ",";
      out += std::to_string(rep.replication + 1);
      out += ",";
      out += io::format_double(rep.final_avg_error);
      out += ",";
      out += io::format_double(rep.steady_state_error);
      out += "\n";
    }
  return out;
}

inline nlohmann::json sweep_summary_json(const ExperimentConfig& base, const SweepResult& sweep) {
  nlohmann::json j;
  j["name"] = base.name;
  auto points = nlohmann::json::array();
  for (const auto& point : sweep.points) {
    nlohmann::json pj;
    pj["m"] = point.m;
    pj["replications"] = static_cast<int>(point.result.replications.size());
    pj["mean_steady_state_error"] = point.mean_steady_state;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  j["monotone_increasing"] = sweep.monotone_increasing;
  return j;
}

}  // namespace advgd
