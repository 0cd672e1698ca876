#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "advgd/rng.hpp"

// Adversary model: a fixed subset of agents additively perturbs its iterate
// each round before it is broadcast. Draws are counter-derived from
// (seed, agent, round), so replays and concurrent queries see identical
// attack sequences.

namespace advgd {

using AttackVector = Eigen::VectorXd;

enum class AttackMode {
  none,
  cooperative_fixed,     // all adversaries share one epsilon, constant over rounds
  independent_per_step,  // each adversary draws a fresh epsilon every round
};

struct AttackSpec {
  std::vector<int> adversaries;  // sorted unique, 0-based
  AttackMode mode = AttackMode::none;
  double dist_low = 0.0;
  double dist_high = 1.0;
  std::uint64_t seed = 0;
  std::optional<AttackVector> fixed_epsilon;  // cooperative_fixed only
};

inline AttackSpec no_attack() { return AttackSpec{}; }

inline bool is_adversary(const AttackSpec& spec, int agent) {
  return std::binary_search(spec.adversaries.begin(), spec.adversaries.end(), agent);
}

inline void validate_attack(const AttackSpec& spec, int n_agents) {
  if ((spec.mode == AttackMode::none) != spec.adversaries.empty())
    throw std::invalid_argument("attack: adversary set must be empty exactly when mode is none");
  if (!std::is_sorted(spec.adversaries.begin(), spec.adversaries.end()) ||
      std::adjacent_find(spec.adversaries.begin(), spec.adversaries.end()) !=
          spec.adversaries.end())
    throw std::invalid_argument("attack: adversaries must be sorted and unique");
  for (int a : spec.adversaries)
    if (a < 0 || a >= n_agents)
      throw std::invalid_argument("attack: adversary index out of range");
  if (!(spec.dist_low < spec.dist_high))
    throw std::invalid_argument("attack: need dist_low < dist_high");
  if (spec.fixed_epsilon && spec.mode != AttackMode::cooperative_fixed)
    throw std::invalid_argument("attack: fixed_epsilon requires cooperative_fixed mode");
}

/// The perturbation agent `agent` applies at round k, or nothing for
/// regular agents. Cooperative adversaries all receive the same vector at
/// every round; per-step adversaries get an independent draw per (agent, k).
inline std::optional<AttackVector> epsilon_for(const AttackSpec& spec, int agent, int k, int p) {
  if (k < 0) throw std::invalid_argument("epsilon_for: round index must be nonnegative");
  if (p < 1) throw std::invalid_argument("epsilon_for: dimension must be positive");
  if (spec.mode == AttackMode::none || !is_adversary(spec, agent)) return std::nullopt;

  AttackVector eps(p);
  if (spec.mode == AttackMode::cooperative_fixed) {
    if (spec.fixed_epsilon) {
      if (spec.fixed_epsilon->size() != p)
        throw std::invalid_argument("epsilon_for: fixed_epsilon dimension mismatch");
      return *spec.fixed_epsilon;
    }
    rng::Stream stream(rng::mix(spec.seed, 0x636f6f70ull /* cooperative draw */));
    for (int j = 0; j < p; ++j) eps(j) = stream.next_uniform(spec.dist_low, spec.dist_high);
    return eps;
  }

  rng::Stream stream(rng::mix(spec.seed, 0x73746570ull /* per-step draw */),
                     static_cast<std::uint64_t>(agent), static_cast<std::uint64_t>(k));
  for (int j = 0; j < p; ++j) eps(j) = stream.next_uniform(spec.dist_low, spec.dist_high);
  return eps;
}

/// The solution the adversaries steer toward: x* + epsilon.
inline Eigen::VectorXd malicious_target(const Eigen::VectorXd& x_star, const AttackVector& eps) {
  if (x_star.size() != eps.size())
    throw std::invalid_argument("malicious_target: dimension mismatch");
  return x_star + eps;
}

}  // namespace advgd
