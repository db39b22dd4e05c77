#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "symgraph/bounds.hpp"
#include "symgraph/sampler.hpp"

using namespace symgraph;

namespace {

SampleParams make(double p_plus, double p_minus, double eps_plus, double eps_minus, std::size_t lambda,
                  bool fold = false) {
  SampleParams p;
  p.p_plus = p_plus;
  p.p_minus = p_minus;
  p.eps_plus = eps_plus;
  p.eps_minus = eps_minus;
  p.lambda = lambda;
  p.fold = fold;
  return p;
}

bool cluster_connected(const SymbolGraph& sg, NodeId m) {
  const auto members = sg.cluster(m);
  oracle::Edges e;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (sg.kind(members[i], members[j]) & kSimilarity) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return oracle::connected(static_cast<int>(members.size()), e);
}

}  // namespace

TEST_CASE("fold_noise") {
  CHECK(fold_noise(0.5, 0.0) == 0.5);
  CHECK(fold_noise(0.5, 0.5) == 0.75);
  CHECK(fold_noise(0.9, 0.1) == Catch::Approx(0.91).epsilon(1e-15));
  CHECK(fold_noise(0.3, 0.2) == fold_noise(0.2, 0.3));
  CHECK_THROWS_AS(fold_noise(1.1, 0.0), ArgumentError);
  CHECK_THROWS_AS(fold_noise(0.1, -0.1), ArgumentError);
}

TEST_CASE("params validation and folding") {
  CHECK_THROWS_AS(make(0.5, 0.1, 0.1, 0.1, 0).validate(), ArgumentError);
  CHECK_THROWS_AS(make(1.5, 0.1, 0.1, 0.1, 1).validate(), ArgumentError);
  const SampleParams e = make(0.8, 0.01, 0.2, 0.1, 2, true).effective();
  CHECK(e.p_plus == fold_noise(0.8, 0.1));
  CHECK(e.p_minus == fold_noise(0.01, 0.1));
  CHECK(e.eps_minus == 0.0);
  CHECK(e.eps_plus == 0.2);
}

TEST_CASE("identity channel reproduces the meaning graph") {
  const MeaningGraph gm = gen_er(80, 0.05, 3);
  const SymbolGraph sg = sample_symbol_graph(gm, identity_params(), 9);
  REQUIRE(sg.node_count() == 80);
  CHECK(sg.graph() == gm.graph);
  CHECK(sg.count_kind(kSimilarity) == 0);
  for (NodeId w = 0; w < 80; ++w) CHECK(sg.origin(w) == w);
}

TEST_CASE("constant replication") {
  const MeaningGraph gm = gen_er(10, 0.3, 1);
  const SymbolGraph sg = sample_symbol_graph(gm, make(0.5, 0.01, 0.3, 0.01, 3), 2);
  CHECK(sg.node_count() == 30);
  std::vector<int> owned(10, 0);
  for (NodeId w = 0; w < 30; ++w) ++owned[sg.origin(w)];
  for (int c : owned) CHECK(c == 3);
  for (NodeId m = 0; m < 10; ++m)
    for (NodeId w : sg.cluster(m)) CHECK(sg.origin(w) == m);
}

TEST_CASE("structural edge count matches the binomial mean") {
  const MeaningGraph gm = gen_er(200, 0.05, 5);
  const double e = static_cast<double>(gm.edge_count());
  const double non = 200.0 * 199.0 / 2.0 - e;
  const double mean = 4 * (0.8 * e + 0.001 * non);
  const double sd = std::sqrt(4 * (0.8 * 0.2 * e + 0.001 * 0.999 * non));
  const SymbolGraph sg = sample_symbol_graph(gm, make(0.8, 0.001, 0.0, 0.0, 2), 17);
  CHECK(std::abs(static_cast<double>(sg.count_kind(kStructural)) - mean) <= 4 * sd);
}

TEST_CASE("no structural edges inside a cluster and no self loops") {
  const MeaningGraph gm = gen_er(50, 0.1, 8);
  const SymbolGraph sg = sample_symbol_graph(gm, make(0.7, 0.05, 0.4, 0.02, 4), 3);
  for (const auto& ke : sg.kinded_edges()) {
    CHECK(ke.edge.u != ke.edge.v);
    if (sg.origin(ke.edge.u) == sg.origin(ke.edge.v)) CHECK(ke.kind == kSimilarity);
    CHECK(sg.kind(ke.edge.v, ke.edge.u) == ke.kind);
  }
}

TEST_CASE("sampling is deterministic under the seed") {
  const MeaningGraph gm = gen_er(100, 0.04, 2);
  const SampleParams p = make(0.8, 0.002, 0.2, 0.001, 3);
  const SymbolGraph a = sample_symbol_graph(gm, p, 77), b = sample_symbol_graph(gm, p, 77);
  CHECK(a.graph() == b.graph());
  std::ostringstream sa, sb;
  write_symbol_graph(sa, a);
  write_symbol_graph(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK_FALSE(sample_symbol_graph(gm, p, 78).graph() == a.graph());
}

TEST_CASE("node_pair_connectivity examples") {
  const MeaningGraph gm = gen_er(20, 0.2, 1);
  const SymbolGraph id = sample_symbol_graph(gm, identity_params(), 1);
  const Edge e = gm.graph.edges().front();
  CHECK(node_pair_connectivity(id, e.u, e.v));
  CHECK(node_pair_connectivity(id, e.u, e.v) == node_pair_connectivity(id, e.v, e.u));

  const SymbolGraph sim = sample_symbol_graph(gm, make(0.5, 0.0, 0.0, 0.0, 3), 1);
  CHECK(node_pair_connectivity(sim, sim.replica(4, 0), sim.replica(4, 2)));

  const SymbolGraph off = sample_symbol_graph(gm, make(0.0, 0.0, 1.0, 0.0, 2), 1);
  CHECK(off.graph().edge_count() == 0);
  CHECK_FALSE(node_pair_connectivity(off, 0, 1));
  CHECK_THROWS_AS(node_pair_connectivity(off, 3, 3), ArgumentError);
  CHECK_THROWS_AS(node_pair_connectivity(off, 0, 40), ArgumentError);
}

TEST_CASE("per-pair-class probabilities agree with the folded channel") {
  for (double p_plus : {0.3, 0.9}) {
    for (double p_minus : {0.0, 0.01}) {
      for (double eps_minus : {0.0, 0.05, 0.3}) {
        const SampleParams raw = make(p_plus, p_minus, 0.2, eps_minus, 2);
        const SampleParams folded = make(fold_noise(p_plus, eps_minus), fold_noise(p_minus, eps_minus), 0.2, 0.0, 2);
        CHECK(raw.meaning_edge_pair_probability() == folded.meaning_edge_pair_probability());
        CHECK(raw.non_edge_pair_probability() == folded.non_edge_pair_probability());
        CHECK(raw.intra_cluster_pair_probability() == folded.intra_cluster_pair_probability());
        SampleParams flag = raw;
        flag.fold = true;
        CHECK(flag.meaning_edge_pair_probability() == raw.meaning_edge_pair_probability());
        CHECK(flag.non_edge_pair_probability() == raw.non_edge_pair_probability());
      }
    }
  }
}

TEST_CASE("serialization round trip") {
  const MeaningGraph gm = gen_er(30, 0.1, 4);
  const SymbolGraph sg = sample_symbol_graph(gm, make(0.6, 0.02, 0.3, 0.05, 3), 12);
  std::stringstream ss;
  write_symbol_graph(ss, sg);
  const SymbolGraph back = read_symbol_graph(ss);
  CHECK(back.graph() == sg.graph());
  CHECK(back.lambda() == 3);
  CHECK(back.meaning_count() == 30);
  CHECK(back.seed() == 12);
  CHECK(back.params() == sg.params());
  for (const auto& ke : sg.kinded_edges()) CHECK(back.kind(ke.edge.u, ke.edge.v) == ke.kind);

  std::istringstream headless("0\t1\tS\n");
  CHECK_THROWS_AS(read_symbol_graph(headless), ParseError);
  std::istringstream bad_kind("# symbol-graph meaning=2 lambda=1 seed=0\n0\t1\tX\n");
  CHECK_THROWS_AS(read_symbol_graph(bad_kind), ParseError);
}

TEST_CASE("cluster connectivity rate dominates the corollary bound") {
  const MeaningGraph gm{Graph(500, {}), {}};
  for (std::size_t lambda : {4u, 6u}) {
    for (double eps : {0.1, 0.3}) {
      const SymbolGraph sg = sample_symbol_graph(gm, make(0.5, 0.0, eps, 0.0, lambda), lambda * 100);
      std::size_t ok = 0;
      for (NodeId m = 0; m < 500; ++m) ok += cluster_connected(sg, m);
      const double rate = static_cast<double>(ok) / 500.0;
      const double se = std::sqrt(std::max(rate * (1 - rate), 1e-12) / 500.0);
      const double bound = std::max(0.0, 1.0 - 2.0 * kE3 * std::pow(eps, lambda / 2.0));
      CHECK(rate + 3 * se >= bound);
      const double exact = oracle::connectivity_probability(static_cast<int>(lambda), 1.0 - eps);
      CHECK(std::abs(rate - exact) <= 4 * std::sqrt(exact * (1 - exact) / 500.0) + 1e-9);
    }
  }
}

TEST_CASE("coupled samples share every draw outside the cut") {
  const MeaningGraph gm = gen_er(60, 0.08, 21);
  const auto pair = pick_pair_at_distance(gm, 2, 1);
  REQUIRE(pair);
  const CutPair cp = make_cut_pair(gm, pair->first, pair->second);
  const SampleParams p = make(0.8, 0.01, 0.1, 0.01, 2);
  const CoupledSymbolGraphs c = sample_coupled(cp.g, cp.cut, p, 5);
  CHECK(c.g.graph() == sample_symbol_graph(gm, p, 5).graph());

  std::size_t differing = 0;
  for (const auto& ke : c.g.kinded_edges()) {
    const NodeId a = c.g.origin(ke.edge.u), b = c.g.origin(ke.edge.v);
    const bool in_cut = std::binary_search(cp.cut.begin(), cp.cut.end(), Edge{a, b}.canonical());
    if (!in_cut) CHECK(c.g_prime.kind(ke.edge.u, ke.edge.v) == ke.kind);
    differing += in_cut && c.g_prime.kind(ke.edge.u, ke.edge.v) != ke.kind;
  }
  for (const auto& ke : c.g_prime.kinded_edges()) {
    // Comonotone: anything G' has, G has.
    CHECK((c.g.kind(ke.edge.u, ke.edge.v) & ke.kind) == ke.kind);
  }
  CHECK(differing > 0);
}

TEST_CASE("coupled cut slots have the right marginals") {
  const MeaningGraph gm{Graph(2, {{0, 1}}), {}};
  const std::vector<Edge> cut{{0, 1}};
  const SampleParams p = make(0.7, 0.2, 1.0, 0.0, 2);
  const int trials = 500;
  int in_g = 0, in_gp = 0;
  for (int t = 0; t < trials; ++t) {
    const auto c = sample_coupled(gm, cut, p, static_cast<std::uint64_t>(t));
    for (NodeId i = 0; i < 2; ++i) {
      for (NodeId j = 2; j < 4; ++j) {
        const bool a = c.g.graph().has_edge(i, j), b = c.g_prime.graph().has_edge(i, j);
        in_g += a;
        in_gp += b;
        REQUIRE((!b || a));
      }
    }
  }
  const double n = 4.0 * trials;
  CHECK(std::abs(in_g / n - 0.7) <= 4 * std::sqrt(0.7 * 0.3 / n));
  CHECK(std::abs(in_gp / n - 0.2) <= 4 * std::sqrt(0.2 * 0.8 / n));
}
