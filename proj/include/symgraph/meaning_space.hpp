#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "symgraph/errors.hpp"
#include "symgraph/format.hpp"
#include "symgraph/graph.hpp"
#include "symgraph/min_cut.hpp"
#include "symgraph/params.hpp"
#include "symgraph/random.hpp"

namespace symgraph {

/// Hidden ground-truth graph, optionally labeled (labels[i] names node i).
struct MeaningGraph {
  Graph graph;
  std::vector<std::string> labels;

  std::size_t node_count() const noexcept { return graph.node_count(); }
  std::size_t edge_count() const noexcept { return graph.edge_count(); }
};

/// Ordered pair of meaning nodes (m, m').
struct NodePair {
  NodeId first = 0;
  NodeId second = 0;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Erdős–Rényi G(n, p) with geometric skip-sampling over the C(n,2) pairs.
inline MeaningGraph gen_er(std::size_t n, double p, std::uint64_t seed) {
  detail::require(n >= 1, "gen_er: n must be >= 1");
  detail::require_probability(p, "p");
  Stream rng(derive_key(seed, "gen_er"));
  std::vector<Edge> edges;
  if (p > 0.0 && n >= 2) {
    // Walk pairs (u, v), u < v, row by row.
    NodeId u = 0;
    std::uint64_t v = 1;
    while (true) {
      std::uint64_t skip = rng.geometric_skip(p);
      while (u < n - 1) {
        const std::uint64_t left_in_row = n - v;
        if (skip < left_in_row) break;
        skip -= left_in_row;
        ++u;
        v = u + 1ULL;
      }
      if (u >= n - 1) break;
      v += skip;
      edges.push_back({u, static_cast<NodeId>(v)});
      ++v;
      if (v >= n) {
        ++u;
        v = u + 1ULL;
        if (u >= n - 1) break;
      }
    }
  }
  return MeaningGraph{Graph(n, edges), {}};
}

/// Ingest `head<TAB>relation<TAB>tail` triples whose relation starts with
/// `relation_prefix`. Entities become nodes in first-seen order; edges are
/// undirected and deduplicated. Triples with head == tail contribute their
/// entity but no edge.
inline MeaningGraph load_triples(std::istream& in, const std::string& relation_prefix,
                                 const std::string& source = "<stream>") {
  std::unordered_map<std::string, NodeId> index;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.try_emplace(name, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(name);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ParseError(source, line_no, "expected head<TAB>relation<TAB>tail");
    }
    std::string head = line.substr(0, t1);
    std::string rel = line.substr(t1 + 1, t2 - t1 - 1);
    std::string tail = line.substr(t2 + 1);
    if (head.empty() || rel.empty() || tail.empty()) {
      throw ParseError(source, line_no, "empty field");
    }
    if (rel.compare(0, relation_prefix.size(), relation_prefix) != 0) continue;
    const NodeId h = intern(head);
    const NodeId t = intern(tail);
    if (h != t) edges.push_back({h, t});
  }
  if (in.bad()) throw IoError("read failure on " + source);
  return MeaningGraph{Graph(labels.size(), edges), std::move(labels)};
}

inline MeaningGraph load_triples(const std::string& path, const std::string& relation_prefix) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_triples(in, relation_prefix, path);
}

// ---------------------------------------------------------------------------
// Nontriviality

/// Finite-instance thresholds for the asymptotic conditions.
struct NontrivialityThresholds {
  double noise_ratio = 10.0;    // p- <= p+ / noise_ratio
  double ball_fraction = 0.25;  // B(d) <= ball_fraction * n
};

struct ConditionResult {
  bool pass = false;
  std::string message;
};

struct NontrivialityReport {
  std::array<ConditionResult, 5> conditions;
  bool pass = false;
};

inline NontrivialityReport check_nontrivial(const MeaningGraph& g, const SampleParams& params,
                                            std::size_t d,
                                            const NontrivialityThresholds& th = {}) {
  NontrivialityReport r;
  auto fmt = [](double x) { return format_double(x); };

  {
    const bool ok = params.p_minus > 0 && params.eps_minus > 0 && params.eps_plus > 0;
    r.conditions[0] = {ok, "non-zero noise: p-=" + fmt(params.p_minus) + " eps-=" +
                               fmt(params.eps_minus) + " eps+=" + fmt(params.eps_plus)};
  }
  r.conditions[1] = {params.p_plus < 1.0, "incomplete information: p+=" + fmt(params.p_plus)};
  {
    const bool ok = params.p_minus <= params.p_plus / th.noise_ratio && params.eps_plus < 0.5 &&
                    params.p_plus > 0.5;
    r.conditions[2] = {ok, "noise does not dominate: p- <= p+/" + fmt(th.noise_ratio) +
                               ", eps+ < 0.5, p+ > 0.5"};
  }
  {
    const std::size_t n = g.node_count();
    const std::size_t b = ball_bound(g.graph, d);
    const bool ok = static_cast<double>(b) <= th.ball_fraction * static_cast<double>(n);
    r.conditions[3] = {ok, "not overly connected: B(" + std::to_string(d) + ")=" +
                               std::to_string(b) + " vs " + fmt(th.ball_fraction) + "*n=" +
                               fmt(th.ball_fraction * static_cast<double>(n))};
  }
  {
    const std::size_t n = g.node_count();
    const auto need = n > 0 ? static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)))) : 0;
    r.conditions[4] = {g.edge_count() >= need, "not overly sparse: |E|=" +
                                                   std::to_string(g.edge_count()) +
                                                   " vs ceil(ln n)=" + std::to_string(need)};
  }
  r.pass = true;
  for (const auto& c : r.conditions) r.pass = r.pass && c.pass;
  return r;
}

// ---------------------------------------------------------------------------
// Hypothesis fixtures

/// Uniform sampler of ordered meaning pairs at an exact distance, or in
/// different components. Rejection over random anchors first (10·n attempts),
/// then an exhaustive scan that either finds the pairs or proves there are none.
class PairSampler {
 public:
  explicit PairSampler(const Graph& g) : g_(&g), comps_(components(g)) {}

  std::optional<NodePair> at_distance(std::size_t d, Stream& rng) const {
    detail::require(d >= 1, "pair distance must be >= 1");
    const std::size_t n = g_->node_count();
    if (n < 2) return std::nullopt;
    for (std::size_t attempt = 0; attempt < 10 * n; ++attempt) {
      const auto m = static_cast<NodeId>(rng.below(n));
      const auto m2 = static_cast<NodeId>(rng.below(n));
      if (m == m2 || !comps_.connected(m, m2)) continue;
      const Distance dist = bfs_distance(*g_, m, m2, d);
      if (dist && *dist == d) return NodePair{m, m2};
    }
    return scan_at_distance(d, rng);
  }

  std::optional<NodePair> disconnected(Stream& rng) const {
    const std::size_t n = g_->node_count();
    if (comps_.count() < 2) return std::nullopt;
    for (std::size_t attempt = 0; attempt < 10 * n; ++attempt) {
      const auto m = static_cast<NodeId>(rng.below(n));
      const auto m2 = static_cast<NodeId>(rng.below(n));
      if (!comps_.connected(m, m2)) return NodePair{m, m2};
    }
    // Ordered pairs in different components: n^2 - sum(size^2) of them.
    std::uint64_t total = 0;
    for (std::size_t s : comps_.sizes) total += s * (n - s);
    std::uint64_t pick = rng.below(total);
    for (NodeId m = 0; m < n; ++m) {
      const std::uint64_t here = n - comps_.sizes[comps_.label[m]];
      if (pick >= here) {
        pick -= here;
        continue;
      }
      for (NodeId m2 = 0; m2 < n; ++m2) {
        if (comps_.connected(m, m2)) continue;
        if (pick-- == 0) return NodePair{m, m2};
      }
    }
    return std::nullopt;  // unreachable
  }

  const Components& components_view() const noexcept { return comps_; }

 private:
  std::optional<NodePair> scan_at_distance(std::size_t d, Stream& rng) const {
    const std::size_t n = g_->node_count();
    std::vector<std::uint64_t> per_anchor(n, 0);
    std::uint64_t total = 0;
    for (NodeId m = 0; m < n; ++m) {
      const auto dist = bfs_distances(*g_, m, d);
      for (const Distance& x : dist) {
        if (x && *x == d) ++per_anchor[m];
      }
      total += per_anchor[m];
    }
    if (total == 0) return std::nullopt;
    std::uint64_t pick = rng.below(total);
    for (NodeId m = 0; m < n; ++m) {
      if (pick >= per_anchor[m]) {
        pick -= per_anchor[m];
        continue;
      }
      const auto dist = bfs_distances(*g_, m, d);
      for (NodeId m2 = 0; m2 < n; ++m2) {
        if (dist[m2] && *dist[m2] == d && pick-- == 0) return NodePair{m, m2};
      }
    }
    return std::nullopt;  // unreachable
  }

  const Graph* g_;
  Components comps_;
};

/// A pair with exact meaning distance d, or std::nullopt (NO_SUCH_PAIR).
inline std::optional<NodePair> pick_pair_at_distance(const MeaningGraph& g, std::size_t d,
                                                     std::uint64_t seed) {
  Stream rng(derive_key(seed, "pair-at-distance"));
  return PairSampler(g.graph).at_distance(d, rng);
}

/// A pair in different components, or std::nullopt (NO_SUCH_PAIR).
inline std::optional<NodePair> pick_disconnected_pair(const MeaningGraph& g, std::uint64_t seed) {
  Stream rng(derive_key(seed, "pair-disconnected"));
  return PairSampler(g.graph).disconnected(rng);
}

// ---------------------------------------------------------------------------
// Cut construction

/// Twin meaning graphs differing exactly by an (m, m') min-cut.
struct CutPair {
  MeaningGraph g;
  MeaningGraph g_prime;
  NodeId m = 0;
  NodeId m_prime = 0;
  std::vector<Edge> cut;
  std::size_t d = 0;  // dist_g(m, m')
};

inline CutPair make_cut_pair(const MeaningGraph& g, NodeId m, NodeId m_prime) {
  detail::require(m != m_prime, "make_cut_pair: m and m' coincide");
  const Distance dist = bfs_distance(g.graph, m, m_prime);
  if (!dist) throw ArgumentError("make_cut_pair: m and m' are already disconnected");
  CutPair cp;
  cp.cut = min_cut(g.graph, m, m_prime);
  cp.g = g;
  cp.g_prime = MeaningGraph{remove_edges(g.graph, cp.cut), g.labels};
  cp.m = m;
  cp.m_prime = m_prime;
  cp.d = *dist;
  return cp;
}

}  // namespace symgraph
