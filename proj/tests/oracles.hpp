#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. Nothing here calls the library's search code.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Connected graph: random spanning tree plus `extra` random edges.
inline Adjacency random_connected_graph(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
  Adjacency adj(n);
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b || std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) return;
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (std::size_t i = 1; i < n; ++i) link(i, rng() % i);
  for (std::size_t k = 0; k < extra; ++k) link(rng() % n, rng() % n);
  return adj;
}

inline std::vector<std::int64_t> bfs_depth(const Adjacency& adj, std::size_t v) {
  std::vector<std::int64_t> d(adj.size(), -1);
  d[v] = 0;
  std::deque<std::size_t> q{v};
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (auto w : adj[u]) {
      if (d[w] < 0) {
        d[w] = d[u] + 1;
        q.push_back(w);
      }
    }
  }
  return d;
}

/// Minimum over all simple x-y paths of Σ f(min(d(v,a), d(v,b))).
inline double simple_path_floyd(const Adjacency& adj, const std::function<double(std::int64_t)>& f,
                                std::size_t v, std::size_t x, std::size_t y) {
  if (x == y) return 0.0;
  const auto depth = bfs_depth(adj, v);
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> on(adj.size(), false);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t u, double acc) {
    if (u == y) {
      best = std::min(best, acc);
      return;
    }
    on[u] = true;
    for (auto w : adj[u]) {
      if (!on[w]) dfs(w, acc + f(std::min(depth[u], depth[w])));
    }
    on[u] = false;
  };
  dfs(x, 0.0);
  return best;
}

}  // namespace oracle
