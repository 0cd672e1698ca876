#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "advgd/rng.hpp"

// Communication topologies and their doubly stochastic consensus weights.
// Agents are 0-based internally; configuration files and diagnostics use
// 1-based ids.

namespace advgd {

enum class GraphKind { complete, general };

/// Undirected connected graph over n agents. Edges are stored once as
/// ordered pairs (i, j) with i < j; construction rejects self-loops,
/// out-of-range endpoints, and disconnected topologies.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges, GraphKind kind)
      : n_(n), kind_(kind) {
    if (n < 1) throw std::invalid_argument("Graph: need at least one agent");
    edges_.reserve(edges.size());
    for (auto [a, b] : edges) {
      if (a == b) throw std::invalid_argument("Graph: self-loops are not allowed");
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("Graph: edge endpoint out of range");
      edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    adj_.assign(n_, {});
    for (auto [a, b] : edges_) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    if (!connected()) throw std::invalid_argument("Graph: topology is not connected");
  }

  int size() const { return n_; }
  GraphKind kind() const { return kind_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& neighbors() const { return adj_; }
  int degree(int v) const { return static_cast<int>(adj_.at(v).size()); }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
  }

 private:
  bool connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj_[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == n_;
  }

  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  GraphKind kind_;
};

/// All n(n-1)/2 edges; requires n >= 2.
inline Graph complete_graph(int n) {
  if (n < 2) throw std::invalid_argument("complete_graph: need n >= 2");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, std::move(edges), GraphKind::complete);
}

/// Samples each possible edge independently with probability edge_prob and
/// retries until the draw is connected. Deterministic for a fixed seed.
inline Graph random_connected_graph(int n, double edge_prob, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_connected_graph: need n >= 2");
  if (!(edge_prob > 0.0) || edge_prob > 1.0)
    throw std::invalid_argument("random_connected_graph: edge_prob must lie in (0, 1]");

  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    rng::Stream stream(seed, 0x67726170ull /* graph sampling */, attempt);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (stream.next_unit() < edge_prob) edges.emplace_back(i, j);
    try {
      return Graph(n, std::move(edges), GraphKind::general);
    } catch (const std::invalid_argument&) {
      // disconnected sample, try again
    }
  }
  std::ostringstream msg;
  msg << "random_connected_graph: no connected sample in " << kMaxAttempts
      << " attempts (n=" << n << ", edge_prob=" << edge_prob << ", seed=" << seed << ")";
  throw std::runtime_error(msg.str());
}

/// Symmetric doubly stochastic consensus weights.
struct WeightMatrix {
  int n = 0;
  Eigen::MatrixXd entries;
};

/// Metropolis-Hastings rule: W_ij = 1/(1 + max(d_i, d_j)) on edges, diagonal
/// absorbs the remainder. Produces a symmetric doubly stochastic matrix with
/// strictly positive diagonal on any connected undirected graph.
inline WeightMatrix metropolis_weights(const Graph& g) {
  const int n = g.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges()) {
    const double v = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = v;
    w(j, i) = v;
  }
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return WeightMatrix{n, std::move(w)};
}

/// Largest eigenvalue magnitude after removing the consensus eigenvalue 1,
/// i.e. the spectral radius of W - (1/n) 11^T. Always < 1 for a connected
/// graph with Metropolis weights.
inline double second_eigenvalue_magnitude(const WeightMatrix& w) {
  if (w.n < 1 || w.entries.rows() != w.n || w.entries.cols() != w.n)
    throw std::invalid_argument("second_eigenvalue_magnitude: malformed weight matrix");
  Eigen::MatrixXd deflated =
      w.entries - Eigen::MatrixXd::Constant(w.n, w.n, 1.0 / static_cast<double>(w.n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(deflated, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace advgd
