#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "advgd/attack.hpp"
#include "advgd/objectives.hpp"
#include "advgd/rng.hpp"
#include "advgd/topology.hpp"

// Synchronous consensus-gradient iteration. Each round every agent averages
// its neighborhood with the consensus weights, takes a gradient step on its
// own iterate, and adversarial agents add their attack vector before the
// new state is visible to neighbors:
//
//   x_i(k+1) = sum_j W_ij x_j(k) - alpha * grad f_i(x_i(k)) [+ eps_i(k)]

namespace advgd {

struct InitSpec {
  enum class Kind { gaussian, uniform, explicit_values };

  Kind kind = Kind::gaussian;
  double sigma = 1.0;                    // gaussian
  double low = -1.0, high = 1.0;         // uniform
  std::vector<Eigen::VectorXd> values;   // explicit_values, one row per agent

  static InitSpec gaussian(double sigma) {
    InitSpec s;
    s.kind = Kind::gaussian;
    s.sigma = sigma;
    return s;
  }
  static InitSpec uniform(double low, double high) {
    InitSpec s;
    s.kind = Kind::uniform;
    s.low = low;
    s.high = high;
    return s;
  }
  static InitSpec explicit_values(std::vector<Eigen::VectorXd> values) {
    InitSpec s;
    s.kind = Kind::explicit_values;
    s.values = std::move(values);
    return s;
  }
};

struct SimulationConfig {
  Graph graph;
  WeightMatrix weights;
  ObjectiveSpec objective;
  AttackSpec attack;
  double alpha = 0.6;
  int iterations = 100;
  InitSpec init;
  std::uint64_t init_seed = 0;
};

/// Stacked iterates at one round: row i is agent i's current estimate.
struct NetworkState {
  int k = 0;
  Eigen::MatrixXd X;  // n x p
};

struct Trajectory {
  std::vector<NetworkState> states;                     // k = 0..K
  std::vector<Eigen::VectorXd> avg;                     // row mean per round
  std::vector<Eigen::VectorXd> avg_grad;                // mean local gradient per round
  std::vector<std::map<int, AttackVector>> eps_log;     // perturbation applied at round k
  std::optional<std::pair<int, int>> feasible_exit;     // first (k, agent) with ||x_i|| > B

  int rounds() const { return static_cast<int>(states.size()) - 1; }
};

/// Any iterate entry left the sane range (non-finite or |x| > 1e12). Carries
/// the round and agent where the blow-up was detected; run() attaches the
/// trajectory up to the last finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int k, int agent)
      : std::runtime_error(message(k, agent)), k_(k), agent_(agent) {}

  int k() const { return k_; }
  int agent() const { return agent_; }

  void attach_partial(std::shared_ptr<const Trajectory> partial) { partial_ = std::move(partial); }
  const std::shared_ptr<const Trajectory>& partial() const { return partial_; }

 private:
  static std::string message(int k, int agent) {
    std::ostringstream msg;
    msg << "simulation diverged at round " << k << " on agent " << agent + 1;
    return msg.str();
  }

  int k_;
  int agent_;
  std::shared_ptr<const Trajectory> partial_;
};

inline constexpr double kDivergenceLimit = 1e12;

inline void validate_simulation(const SimulationConfig& cfg) {
  const int n = cfg.graph.size();
  const int p = cfg.objective.dimension();
  if (cfg.weights.n != n || cfg.weights.entries.rows() != n || cfg.weights.entries.cols() != n)
    throw std::invalid_argument("simulation: weight matrix does not match the graph");
  if (cfg.objective.agents() != n)
    throw std::invalid_argument("simulation: objective agent count does not match the graph");
  validate_attack(cfg.attack, n);
  if (cfg.attack.fixed_epsilon && cfg.attack.fixed_epsilon->size() != p)
    throw std::invalid_argument("simulation: fixed_epsilon dimension mismatch");
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("simulation: step size must be positive");
  if (cfg.iterations < 0) throw std::invalid_argument("simulation: iterations must be nonnegative");
  if (cfg.init.kind == InitSpec::Kind::explicit_values) {
    if (static_cast<int>(cfg.init.values.size()) != n)
      throw std::invalid_argument("simulation: explicit init must list one row per agent");
    for (const auto& v : cfg.init.values)
      if (v.size() != p)
        throw std::invalid_argument("simulation: explicit init row dimension mismatch");
  }
  if (cfg.init.kind == InitSpec::Kind::uniform && !(cfg.init.low < cfg.init.high))
    throw std::invalid_argument("simulation: uniform init needs low < high");
  if (cfg.init.kind == InitSpec::Kind::gaussian && !(cfg.init.sigma >= 0.0))
    throw std::invalid_argument("simulation: gaussian init needs sigma >= 0");
}

inline NetworkState init_state(const SimulationConfig& cfg) {
  validate_simulation(cfg);
  const int n = cfg.graph.size();
  const int p = cfg.objective.dimension();
  Eigen::MatrixXd x(n, p);
  switch (cfg.init.kind) {
    case InitSpec::Kind::gaussian: {
      rng::Stream stream(rng::mix(cfg.init_seed, 0x696e6974ull /* init draw */));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = cfg.init.sigma * stream.next_gaussian();
      break;
    }
    case InitSpec::Kind::uniform: {
      rng::Stream stream(rng::mix(cfg.init_seed, 0x696e6974ull));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = stream.next_uniform(cfg.init.low, cfg.init.high);
      break;
    }
    case InitSpec::Kind::explicit_values: {
      for (int i = 0; i < n; ++i) x.row(i) = cfg.init.values[static_cast<std::size_t>(i)];
      break;
    }
  }
  return NetworkState{0, std::move(x)};
}

/// One synchronous round. Pure: the input state is untouched.
inline NetworkState step(const NetworkState& state, const SimulationConfig& cfg) {
  const int n = cfg.graph.size();
  const int p = cfg.objective.dimension();
  Eigen::MatrixXd next = cfg.weights.entries * state.X;
  for (int i = 0; i < n; ++i)
    next.row(i) -=
        cfg.alpha * grad_local(cfg.objective, i, state.X.row(i).transpose()).transpose();
  for (int a : cfg.attack.adversaries)
    if (auto eps = epsilon_for(cfg.attack, a, state.k, p)) next.row(a) += eps->transpose();

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) {
      const double v = next(i, j);
      if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit)
        throw DivergenceError(state.k + 1, i);
    }
  return NetworkState{state.k + 1, std::move(next)};
}

/// Runs the full iteration and records every round. Deterministic given the
/// configuration; a replay is bit-identical.
inline Trajectory run(const SimulationConfig& cfg) {
  validate_simulation(cfg);
  const int n = cfg.graph.size();
  const int p = cfg.objective.dimension();
  const int iterations = cfg.iterations;

  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(iterations) + 1);
  traj.avg.reserve(static_cast<std::size_t>(iterations) + 1);
  traj.avg_grad.reserve(static_cast<std::size_t>(iterations) + 1);
  traj.eps_log.reserve(static_cast<std::size_t>(iterations));

  auto record = [&](const NetworkState& s) {
    traj.avg.push_back(s.X.colwise().mean().transpose());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < n; ++i) g += grad_local(cfg.objective, i, s.X.row(i).transpose());
    traj.avg_grad.push_back(g / n);
    if (cfg.objective.feasible_bound() && !traj.feasible_exit) {
      for (int i = 0; i < n; ++i)
        if (s.X.row(i).norm() > *cfg.objective.feasible_bound()) {
          traj.feasible_exit = {s.k, i};
          break;
        }
    }
    traj.states.push_back(s);
  };

  NetworkState state = init_state(cfg);
  record(state);
  for (int k = 0; k < iterations; ++k) {
    try {
      state = step(state, cfg);
    } catch (DivergenceError& err) {
      err.attach_partial(std::make_shared<Trajectory>(std::move(traj)));
      throw;
    }
    std::map<int, AttackVector> applied;
    for (int a : cfg.attack.adversaries)
      if (auto eps = epsilon_for(cfg.attack, a, k, p)) applied.emplace(a, std::move(*eps));
    traj.eps_log.push_back(std::move(applied));
    record(state);
  }
  return traj;
}

}  // namespace advgd
