#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

#include "symgraph/errors.hpp"
#include "symgraph/graph.hpp"

namespace symgraph {

/// Minimum-cardinality s-t edge cut of an undirected graph.
///
/// Unit-capacity max flow with shortest augmenting paths (Edmonds-Karp). Each
/// undirected edge becomes a pair of opposite arcs of capacity 1. The returned
/// cut is the set of edges leaving the residual-reachable side of s, in
/// canonical order. Empty when s and t are already disconnected.
inline std::vector<Edge> min_cut(const Graph& g, NodeId s, NodeId t) {
  g.check(s);
  g.check(t);
  if (s == t) throw ArgumentError("min_cut: source and sink coincide");

  const std::size_t n = g.node_count();
  // Arc k lives at CSR slot k; its reverse is located by binary search once.
  std::vector<std::size_t> reverse_arc(2 * g.edge_count());
  for (NodeId u = 0; u < n; ++u) {
    auto nb = g.neighbors(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const NodeId v = nb[i];
      auto vb = g.neighbors(v);
      const auto j = static_cast<std::size_t>(std::lower_bound(vb.begin(), vb.end(), u) - vb.begin());
      reverse_arc[g.adjacency_offset(u) + i] = g.adjacency_offset(v) + j;
    }
  }
  // Residual capacity per arc; both directions start at 1.
  std::vector<int> residual(reverse_arc.size(), 1);

  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent_arc(n);
  std::vector<NodeId> parent(n);
  std::vector<char> seen(n);

  auto bfs = [&]() {
    std::fill(seen.begin(), seen.end(), 0);
    std::fill(parent_arc.begin(), parent_arc.end(), kNone);
    std::queue<NodeId> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      auto nb = g.neighbors(u);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const std::size_t arc = g.adjacency_offset(u) + i;
        const NodeId v = nb[i];
        if (seen[v] || residual[arc] <= 0) continue;
        seen[v] = 1;
        parent[v] = u;
        parent_arc[v] = arc;
        if (v == t) return true;
        q.push(v);
      }
    }
    return false;
  };

  while (bfs()) {
    for (NodeId v = t; v != s; v = parent[v]) {
      const std::size_t arc = parent_arc[v];
      residual[arc] -= 1;
      residual[reverse_arc[arc]] += 1;
    }
  }

  // After the final failed search, `seen` marks the source side.
  std::vector<Edge> cut;
  for (NodeId u = 0; u < n; ++u) {
    if (!seen[u]) continue;
    for (NodeId v : g.neighbors(u)) {
      if (!seen[v]) cut.push_back(Edge{u, v}.canonical());
    }
  }
  std::sort(cut.begin(), cut.end());
  return cut;
}

}  // namespace symgraph
