#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "symgraph/errors.hpp"
#include "symgraph/format.hpp"
#include "symgraph/graph.hpp"
#include "symgraph/meaning_space.hpp"
#include "symgraph/params.hpp"
#include "symgraph/random.hpp"

namespace symgraph {

/// Channel bits carried by a symbol edge. An edge may carry both.
enum EdgeKind : std::uint8_t {
  kStructural = 1,
  kSimilarity = 2,
};

/// Observable graph over λ·n symbol nodes. Symbol w belongs to meaning node
/// w / λ; the replicas of m are λ·m .. λ·m + λ - 1.
class SymbolGraph {
 public:
  struct KindedEdge {
    Edge edge;
    std::uint8_t kind = 0;
  };

  SymbolGraph() = default;

  /// Merges duplicate pairs by OR-ing their kinds.
  SymbolGraph(std::size_t meaning_count, std::size_t lambda, std::vector<KindedEdge> edges,
              SampleParams params, std::uint64_t seed)
      : meaning_count_(meaning_count), lambda_(lambda), params_(params), seed_(seed) {
    detail::require(lambda >= 1, "lambda must be >= 1");
    for (auto& e : edges) e.edge = e.edge.canonical();
    std::sort(edges.begin(), edges.end(),
              [](const KindedEdge& a, const KindedEdge& b) { return a.edge < b.edge; });
    std::vector<KindedEdge> merged;
    merged.reserve(edges.size());
    for (const auto& e : edges) {
      if (!merged.empty() && merged.back().edge == e.edge) {
        merged.back().kind |= e.kind;
      } else {
        merged.push_back(e);
      }
    }
    std::vector<Edge> plain;
    plain.reserve(merged.size());
    for (const auto& e : merged) plain.push_back(e.edge);
    graph_ = Graph(meaning_count * lambda, plain);

    kinds_.assign(2 * merged.size(), 0);
    for (const auto& e : merged) {
      kinds_[slot(e.edge.u, e.edge.v)] = e.kind;
      kinds_[slot(e.edge.v, e.edge.u)] = e.kind;
    }
  }

  const Graph& graph() const noexcept { return graph_; }
  std::size_t node_count() const noexcept { return graph_.node_count(); }
  std::size_t meaning_count() const noexcept { return meaning_count_; }
  std::size_t lambda() const noexcept { return lambda_; }
  const SampleParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// O⁻¹(w).
  NodeId origin(NodeId w) const {
    graph_.check(w);
    return static_cast<NodeId>(w / lambda_);
  }

  /// The r-th replica of meaning node m.
  NodeId replica(NodeId m, std::size_t r = 0) const {
    detail::require(m < meaning_count_ && r < lambda_, "replica index out of range");
    return static_cast<NodeId>(m * lambda_ + r);
  }

  /// O(m): all replicas of m, ascending.
  std::vector<NodeId> cluster(NodeId m) const {
    std::vector<NodeId> out(lambda_);
    for (std::size_t r = 0; r < lambda_; ++r) out[r] = replica(m, r);
    return out;
  }

  /// Kind bits of edge (u, v); 0 when absent.
  std::uint8_t kind(NodeId u, NodeId v) const {
    graph_.check(v);
    auto nb = graph_.neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) return 0;
    return kinds_[graph_.adjacency_offset(u) + static_cast<std::size_t>(it - nb.begin())];
  }

  std::vector<KindedEdge> kinded_edges() const {
    std::vector<KindedEdge> out;
    for (const Edge& e : graph_.edges()) out.push_back({e, kind(e.u, e.v)});
    return out;
  }

  std::size_t count_kind(std::uint8_t bit) const {
    std::size_t c = 0;
    for (std::uint8_t k : kinds_) c += (k & bit) ? 1 : 0;
    return c / 2;
  }

 private:
  std::size_t slot(NodeId u, NodeId v) const {
    auto nb = graph_.neighbors(u);
    return graph_.adjacency_offset(u) +
           static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), v) - nb.begin());
  }

  Graph graph_;
  std::vector<std::uint8_t> kinds_;  // aligned with the CSR neighbor array
  std::size_t meaning_count_ = 0;
  std::size_t lambda_ = 1;
  SampleParams params_;
  std::uint64_t seed_ = 0;
};

namespace detail {

/// Keys of the four independent pair-class streams of one sample.
struct SamplerStreams {
  std::uint64_t positive, negative, similarity_intra, similarity_cross;

  explicit SamplerStreams(std::uint64_t seed) {
    const std::uint64_t base = derive_key(seed, "symbol-sampler");
    positive = derive_key(base, "structural-positive");
    negative = derive_key(base, "structural-negative");
    similarity_intra = derive_key(base, "similarity-intra");
    similarity_cross = derive_key(base, "similarity-cross");
  }
};

/// Index of slot (i, j) over meaning pair (a, b), a < b; stable across graphs
/// so that coupled samples can share the draw.
inline std::uint64_t slot_index(std::uint64_t n, std::size_t lambda, NodeId a, NodeId b,
                                std::size_t i, std::size_t j) {
  return ((static_cast<std::uint64_t>(a) * n + b) * lambda + i) * lambda + j;
}

/// Calls visit(x, y) for every hit of independent Bernoulli(p) trials over the
/// unordered pairs x < y of N nodes, in O(N + hits).
template <class Visit>
void for_each_bernoulli_pair(std::size_t N, double p, Stream& rng, Visit&& visit) {
  if (p <= 0.0 || N < 2) return;
  std::uint64_t x = 0, y = 1;
  while (true) {
    std::uint64_t skip = rng.geometric_skip(p);
    while (x < N - 1) {
      const std::uint64_t left = N - y;
      if (skip < left) break;
      skip -= left;
      ++x;
      y = x + 1;
    }
    if (x >= N - 1) return;
    y += skip;
    visit(static_cast<NodeId>(x), static_cast<NodeId>(y));
    if (++y >= N) {
      ++x;
      y = x + 1;
      if (x >= N - 1) return;
    }
  }
}

/// Structural pass of the sampler over `reference` (the meaning graph whose
/// edges receive p+). Slots over the meaning edges listed in `downgraded`
/// (canonical, sorted) use threshold `downgraded_p` instead of p+; they remain
/// excluded from the negative pass so every other draw is shared.
inline void sample_structural(const Graph& reference, const SampleParams& eff,
                              const SamplerStreams& streams, std::span<const Edge> downgraded,
                              double downgraded_p, std::vector<SymbolGraph::KindedEdge>& out) {
  const std::uint64_t n = reference.node_count();
  const std::size_t lambda = eff.lambda;
  for (const Edge& e : reference.edges()) {
    const bool down = std::binary_search(downgraded.begin(), downgraded.end(), e);
    const double threshold = down ? downgraded_p : eff.p_plus;
    for (std::size_t i = 0; i < lambda; ++i) {
      for (std::size_t j = 0; j < lambda; ++j) {
        const double u = keyed_uniform(streams.positive, slot_index(n, lambda, e.u, e.v, i, j));
        if (u < threshold) {
          out.push_back({{static_cast<NodeId>(e.u * lambda + i), static_cast<NodeId>(e.v * lambda + j)},
                         kStructural});
        }
      }
    }
  }
  Stream neg(streams.negative);
  for_each_bernoulli_pair(n * lambda, eff.p_minus, neg, [&](NodeId x, NodeId y) {
    const auto a = static_cast<NodeId>(x / lambda), b = static_cast<NodeId>(y / lambda);
    if (a == b || reference.has_edge(a, b)) return;
    out.push_back({{x, y}, kStructural});
  });
}

inline void sample_similarity(std::size_t n, const SampleParams& eff, const SamplerStreams& streams,
                              std::vector<SymbolGraph::KindedEdge>& out) {
  const std::size_t lambda = eff.lambda;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < lambda; ++i) {
      for (std::size_t j = i + 1; j < lambda; ++j) {
        const double u = keyed_uniform(streams.similarity_intra, (m * lambda + i) * lambda + j);
        if (u >= eff.eps_plus) {
          out.push_back({{static_cast<NodeId>(m * lambda + i), static_cast<NodeId>(m * lambda + j)},
                         kSimilarity});
        }
      }
    }
  }
  Stream cross(streams.similarity_cross);
  for_each_bernoulli_pair(n * lambda, eff.eps_minus, cross, [&](NodeId x, NodeId y) {
    if (x / lambda == y / lambda) return;
    out.push_back({{x, y}, kSimilarity});
  });
}

}  // namespace detail

/// Sample a symbol graph from `gm`: λ replicas per meaning node; for every
/// unordered meaning pair and each of its λ² symbol slots a structural edge
/// with probability p+ (meaning edge) or p- (non-edge); then the similarity
/// oracle realized once per symbol pair: 1-ε+ inside a cluster, ε- across.
/// Rare-edge passes use geometric skips, so cost is O(n·λ + |E|·λ² + hits).
inline SymbolGraph sample_symbol_graph(const MeaningGraph& gm, const SampleParams& params,
                                       std::uint64_t seed) {
  params.validate();
  detail::require(gm.node_count() >= 1, "meaning graph is empty");
  const SampleParams eff = params.effective();
  const detail::SamplerStreams streams(seed);
  std::vector<SymbolGraph::KindedEdge> edges;
  detail::sample_structural(gm.graph, eff, streams, {}, 0.0, edges);
  detail::sample_similarity(gm.node_count(), eff, streams, edges);
  return SymbolGraph(gm.node_count(), eff.lambda, std::move(edges), params, seed);
}

/// Monotonely coupled samples of G (from `g`) and G' (from g minus `cut`).
/// Every draw is shared except the λ² slots over each cut edge, where one
/// uniform u decides presence in G (u < p+) and in G' (u < p-).
struct CoupledSymbolGraphs {
  SymbolGraph g;
  SymbolGraph g_prime;
};

inline CoupledSymbolGraphs sample_coupled(const MeaningGraph& g, std::span<const Edge> cut,
                                          const SampleParams& params, std::uint64_t seed) {
  params.validate();
  std::vector<Edge> down(cut.begin(), cut.end());
  for (Edge& e : down) {
    e = e.canonical();
    detail::require(g.graph.has_edge(e.u, e.v), "cut edge is not an edge of the meaning graph");
  }
  std::sort(down.begin(), down.end());
  const SampleParams eff = params.effective();
  const detail::SamplerStreams streams(seed);

  std::vector<SymbolGraph::KindedEdge> similarity;
  detail::sample_similarity(g.node_count(), eff, streams, similarity);

  std::vector<SymbolGraph::KindedEdge> a = similarity, b = std::move(similarity);
  detail::sample_structural(g.graph, eff, streams, {}, 0.0, a);
  detail::sample_structural(g.graph, eff, streams, down, eff.p_minus, b);
  return {SymbolGraph(g.node_count(), eff.lambda, std::move(a), params, seed),
          SymbolGraph(g.node_count(), eff.lambda, std::move(b), params, seed)};
}

/// NodePairConnectivity: a structural edge or a realized similarity joins w, w'.
inline bool node_pair_connectivity(const SymbolGraph& sg, NodeId w, NodeId w_prime) {
  sg.graph().check(w);
  sg.graph().check(w_prime);
  detail::require(w != w_prime, "node_pair_connectivity: w and w' coincide");
  return sg.graph().has_edge(w, w_prime);
}

// Serialization: the edge-list format with a third column, S (structural) or
// R (similarity). An edge carrying both channels is written as two lines.
// Header: "# symbol-graph meaning=M lambda=L seed=S", a params comment, then
// one "#origin w m" line per symbol node.

inline void write_symbol_graph(std::ostream& out, const SymbolGraph& sg) {
  const SampleParams& p = sg.params();
  out << "# symbol-graph meaning=" << sg.meaning_count() << " lambda=" << sg.lambda()
      << " seed=" << sg.seed() << '\n';
  out << "# params p_plus=" << format_double(p.p_plus) << " p_minus=" << format_double(p.p_minus)
      << " eps_plus=" << format_double(p.eps_plus) << " eps_minus=" << format_double(p.eps_minus)
      << " fold=" << (p.fold ? 1 : 0) << '\n';
  out << "# nodes " << sg.node_count() << '\n';
  for (NodeId w = 0; w < sg.node_count(); ++w) out << "#origin " << w << ' ' << sg.origin(w) << '\n';
  for (const auto& e : sg.kinded_edges()) {
    if (e.kind & kStructural) out << e.edge.u << '\t' << e.edge.v << "\tS\n";
    if (e.kind & kSimilarity) out << e.edge.u << '\t' << e.edge.v << "\tR\n";
  }
}

inline SymbolGraph read_symbol_graph(std::istream& in, const std::string& source = "<stream>") {
  std::size_t meaning = 0, lambda = 0, line_no = 0;
  std::uint64_t seed = 0;
  SampleParams params;
  std::vector<SymbolGraph::KindedEdge> edges;
  std::string line;
  bool header = false;
  auto value_of = [](const std::string& tok, const std::string& key) -> std::string {
    return tok.rfind(key + "=", 0) == 0 ? tok.substr(key.size() + 1) : std::string();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string tag;
      ls >> tag;
      if (tag == "#origin") {
        std::size_t w = 0, m = 0;
        if (!(ls >> w >> m) || !header || m != w / lambda) {
          throw ParseError(source, line_no, "origin line inconsistent with constant replication");
        }
        continue;
      }
      std::string kind, tok;
      ls >> kind;
      if (kind == "symbol-graph") {
        while (ls >> tok) {
          if (auto v = value_of(tok, "meaning"); !v.empty()) meaning = std::stoull(v);
          if (auto v = value_of(tok, "lambda"); !v.empty()) lambda = std::stoull(v);
          if (auto v = value_of(tok, "seed"); !v.empty()) seed = std::stoull(v);
        }
        header = lambda >= 1;
      } else if (kind == "params") {
        while (ls >> tok) {
          if (auto v = value_of(tok, "p_plus"); !v.empty()) params.p_plus = std::stod(v);
          if (auto v = value_of(tok, "p_minus"); !v.empty()) params.p_minus = std::stod(v);
          if (auto v = value_of(tok, "eps_plus"); !v.empty()) params.eps_plus = std::stod(v);
          if (auto v = value_of(tok, "eps_minus"); !v.empty()) params.eps_minus = std::stod(v);
          if (auto v = value_of(tok, "fold"); !v.empty()) params.fold = v == "1";
        }
      }
      continue;
    }
    if (!header) throw ParseError(source, line_no, "edge before symbol-graph header");
    long long u = -1, v = -1;
    std::string k;
    if (!(ls >> u >> v >> k) || u < 0 || v < 0 || (k != "S" && k != "R")) {
      throw ParseError(source, line_no, "expected 'u<TAB>v<TAB>S|R'");
    }
    edges.push_back({{static_cast<NodeId>(u), static_cast<NodeId>(v)},
                     static_cast<std::uint8_t>(k == "S" ? kStructural : kSimilarity)});
  }
  if (!header) throw ParseError(source, line_no, "missing symbol-graph header");
  params.lambda = lambda;
  return SymbolGraph(meaning, lambda, std::move(edges), params, seed);
}

}  // namespace symgraph
