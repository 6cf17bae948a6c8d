#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace rankcert {

// Dinic max-flow with integer capacities.
class Dinic {
public:
  explicit Dinic(int node_count) : g_(node_count) {}

  void add_edge(int u, int v, std::int64_t cap) {
    g_[u].push_back({v, cap, static_cast<int>(g_[v].size())});
    g_[v].push_back({u, 0, static_cast<int>(g_[u].size()) - 1});
  }

  std::int64_t max_flow(int s, int t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      it_.assign(g_.size(), 0);
      while (std::int64_t f = dfs(s, t, INT64_MAX)) flow += f;
    }
    return flow;
  }

  // Source side of the minimal min cut: nodes reachable from s in the
  // residual graph. Only meaningful after max_flow.
  std::vector<char> min_cut_side(int s) const {
    std::vector<char> seen(g_.size(), 0);
    std::queue<int> q;
    seen[s] = 1;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : g_[u])
        if (e.cap > 0 && !seen[e.to]) {
          seen[e.to] = 1;
          q.push(e.to);
        }
    }
    return seen;
  }

private:
  struct Edge {
    int to;
    std::int64_t cap;
    int rev;
  };

  bool bfs(int s, int t) {
    level_.assign(g_.size(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : g_[u])
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(int u, int t, std::int64_t pushed) {
    if (u == t) return pushed;
    for (int& i = it_[u]; i < static_cast<int>(g_[u].size()); ++i) {
      Edge& e = g_[u][i];
      if (e.cap <= 0 || level_[e.to] != level_[u] + 1) continue;
      std::int64_t f = dfs(e.to, t, std::min(pushed, e.cap));
      if (f > 0) {
        e.cap -= f;
        g_[e.to][e.rev].cap += f;
        return f;
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> g_;
  std::vector<int> level_, it_;
};

}  // namespace rankcert
