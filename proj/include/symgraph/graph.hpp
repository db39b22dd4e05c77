#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "symgraph/errors.hpp"

namespace symgraph {

using NodeId = std::uint32_t;

/// Unordered pair; canonical form has u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  constexpr Edge canonical() const noexcept { return u < v ? *this : Edge{v, u}; }
  friend constexpr bool operator==(const Edge&, const Edge&) = default;
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Hop count, or std::nullopt for UNREACHABLE.
using Distance = std::optional<std::size_t>;
inline constexpr std::nullopt_t kUnreachable = std::nullopt;

/// Immutable undirected simple graph over nodes 0..n-1, stored as CSR with
/// sorted neighbor lists.
class Graph {
 public:
  Graph() = default;

  /// Duplicate and reversed edges collapse; self-loops and out-of-range
  /// endpoints are rejected.
  Graph(std::size_t node_count, std::span<const Edge> edges) : offsets_(node_count + 1, 0) {
    require(node_count <= std::numeric_limits<NodeId>::max(), "node count exceeds NodeId range");
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) {
      require(e.u < node_count && e.v < node_count, "edge endpoint out of range");
      require(e.u != e.v, "self-loop " + std::to_string(e.u));
      canon.push_back(e.canonical());
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    edge_count_ = canon.size();

    for (const Edge& e : canon) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) offsets_[i + 1] += offsets_[i];
    targets_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // canon is sorted by (u, v): every list receives its smaller neighbors
    // first, then its larger ones, both ascending.
    for (const Edge& e : canon) {
      targets_[fill[e.u]++] = e.v;
      targets_[fill[e.v]++] = e.u;
    }
  }

  Graph(std::size_t node_count, std::initializer_list<Edge> edges)
      : Graph(node_count, std::span<const Edge>(edges.begin(), edges.size())) {}

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    check(u);
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  std::size_t degree(NodeId u) const { return neighbors(u).size(); }

  /// Position of u's adjacency list inside the flat neighbor array.
  std::size_t adjacency_offset(NodeId u) const {
    check(u);
    return offsets_[u];
  }

  bool has_edge(NodeId u, NodeId v) const {
    check(v);
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Canonical edges in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  void check(NodeId u) const {
    if (u >= node_count()) {
      throw ArgumentError("node " + std::to_string(u) + " out of range (n=" +
                          std::to_string(node_count()) + ")");
    }
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

 private:
  static void require(bool cond, const std::string& msg) { detail::require(cond, msg); }

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::size_t edge_count_ = 0;
};

/// Graph minus the given edges (absent edges are ignored).
inline Graph remove_edges(const Graph& g, std::span<const Edge> removed) {
  std::vector<Edge> drop(removed.begin(), removed.end());
  for (Edge& e : drop) e = e.canonical();
  std::sort(drop.begin(), drop.end());
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (!std::binary_search(drop.begin(), drop.end(), e)) kept.push_back(e);
  }
  return Graph(g.node_count(), kept);
}

/// Distances from `source` up to `cap` hops (all reachable nodes when cap is
/// absent). Unvisited nodes hold kUnreachable.
inline std::vector<Distance> bfs_distances(const Graph& g, NodeId source,
                                           std::optional<std::size_t> cap = std::nullopt) {
  g.check(source);
  std::vector<Distance> dist(g.node_count());
  std::vector<NodeId> frontier{source}, next;
  dist[source] = 0;
  std::size_t depth = 0;
  while (!frontier.empty() && (!cap || depth < *cap)) {
    ++depth;
    next.clear();
    for (NodeId u : frontier) {
      for (NodeId v : g.neighbors(u)) {
        if (!dist[v]) {
          dist[v] = depth;
          next.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

/// Shortest-path length from u to v, kUnreachable if none within cap.
inline Distance bfs_distance(const Graph& g, NodeId u, NodeId v,
                             std::optional<std::size_t> cap = std::nullopt) {
  g.check(u);
  g.check(v);
  if (u == v) return 0;
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> frontier{u}, next;
  seen[u] = 1;
  std::size_t depth = 0;
  while (!frontier.empty() && (!cap || depth < *cap)) {
    ++depth;
    next.clear();
    for (NodeId x : frontier) {
      for (NodeId y : g.neighbors(x)) {
        if (seen[y]) continue;
        if (y == v) return depth;
        seen[y] = 1;
        next.push_back(y);
      }
    }
    frontier.swap(next);
  }
  return kUnreachable;
}

/// Nodes within `radius` hops of any source, ascending.
inline std::vector<NodeId> ball(const Graph& g, std::span<const NodeId> sources, std::size_t radius) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> frontier, next, members;
  for (NodeId s : sources) {
    g.check(s);
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
      members.push_back(s);
    }
  }
  for (std::size_t depth = 0; depth < radius && !frontier.empty(); ++depth) {
    next.clear();
    for (NodeId x : frontier) {
      for (NodeId y : g.neighbors(x)) {
        if (!seen[y]) {
          seen[y] = 1;
          next.push_back(y);
          members.push_back(y);
        }
      }
    }
    frontier.swap(next);
  }
  std::sort(members.begin(), members.end());
  return members;
}

/// B(s, d): nodes at distance <= d from s, including s.
inline std::size_t neighborhood_size(const Graph& g, NodeId s, std::size_t d) {
  const NodeId src[] = {s};
  return ball(g, src, d).size();
}

/// B(d) = max over s of B(s, d); 0 on the empty graph.
inline std::size_t ball_bound(const Graph& g, std::size_t d) {
  std::size_t best = 0;
  if (d == 1) {
    for (NodeId s = 0; s < g.node_count(); ++s) best = std::max(best, g.degree(s) + 1);
    return best;
  }
  for (NodeId s = 0; s < g.node_count(); ++s) best = std::max(best, neighborhood_size(g, s, d));
  return best;
}

struct Components {
  std::vector<std::size_t> label;  // component index per node
  std::vector<std::size_t> sizes;  // indexed by component, in first-seen node order

  std::size_t count() const noexcept { return sizes.size(); }
  bool connected(NodeId u, NodeId v) const { return label.at(u) == label.at(v); }
};

inline Components components(const Graph& g) {
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  Components c;
  c.label.assign(g.node_count(), kNone);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (c.label[s] != kNone) continue;
    const std::size_t id = c.sizes.size();
    c.sizes.push_back(0);
    c.label[s] = id;
    stack.assign(1, s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      ++c.sizes[id];
      for (NodeId v : g.neighbors(u)) {
        if (c.label[v] == kNone) {
          c.label[v] = id;
          stack.push_back(v);
        }
      }
    }
  }
  return c;
}

// Edge-list text format: "u<TAB>v" per line, 0-based. Lines starting with '#'
// are comments; the writer emits "# nodes N" so isolated trailing nodes survive
// a round trip, and the reader honours it when present.

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.node_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << '\t' << e.v << '\n';
}

inline Graph read_edge_list(std::istream& in, const std::string& source = "<stream>") {
  std::vector<Edge> edges;
  std::size_t declared = 0, max_id_plus_one = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      std::size_t n = 0;
      if (hs >> word && word == "nodes" && hs >> n) declared = n;
      continue;
    }
    std::istringstream ls(line);
    long long u = -1, v = -1;
    if (!(ls >> u >> v) || u < 0 || v < 0) throw ParseError(source, line_no, "expected 'u<TAB>v'");
    if (u == v) throw ParseError(source, line_no, "self-loop");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  if (declared && declared < max_id_plus_one) {
    throw ParseError(source, line_no, "edge endpoint exceeds declared node count");
  }
  return Graph(std::max(declared, max_id_plus_one), edges);
}

inline Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_edge_list(in, path);
}

}  // namespace symgraph
