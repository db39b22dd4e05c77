#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symgraph/bounds.hpp"
#include "symgraph/errors.hpp"
#include "symgraph/format.hpp"
#include "symgraph/graph.hpp"
#include "symgraph/meaning_space.hpp"
#include "symgraph/random.hpp"
#include "symgraph/sampler.hpp"

namespace symgraph {

/// Square symmetric matrix, row-major. set() writes both mirror entries so the
/// matrix is symmetric by construction.
class DenseSymmetricMatrix {
 public:
  DenseSymmetricMatrix() = default;
  explicit DenseSymmetricMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  std::size_t dimension() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      const double* row = data_.data() + i * dim_;
      double s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += row[j] * x[j];
      y[i] = s;
    }
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix in CSR form; rows hold every stored entry (both mirrors).
class SparseSymmetricMatrix {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  SparseSymmetricMatrix() = default;
  SparseSymmetricMatrix(std::size_t dim, std::vector<std::vector<Entry>> rows) : dim_(dim) {
    detail::require(rows.size() == dim, "sparse matrix: row count mismatch");
    offsets_.reserve(dim + 1);
    offsets_.push_back(0);
    for (auto& r : rows) {
      std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
      for (const Entry& e : r) entries_.push_back(e);
      offsets_.push_back(entries_.size());
    }
  }

  std::size_t dimension() const noexcept { return dim_; }

  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  double operator()(std::size_t i, std::size_t j) const {
    for (const Entry& e : row(i)) {
      if (e.col == j) return e.value;
    }
    return 0.0;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (const Entry& e : row(i)) s += e.value * x[e.col];
      y[i] = s;
    }
  }

  bool all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry& e) { return std::isfinite(e.value); });
  }

  DenseSymmetricMatrix to_dense() const {
    DenseSymmetricMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (const Entry& e : row(i)) m.set(i, e.col, e.value);
    }
    return m;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Anything that applies a symmetric matrix to a vector.
template <class M>
concept SymmetricOperator = requires(const M& m, std::span<const double> x, std::span<double> y) {
  { m.dimension() } -> std::convertible_to<std::size_t>;
  m.multiply(x, y);
};

/// a·A - b·B without materializing the combination.
template <SymmetricOperator A, SymmetricOperator B>
class LinearCombination {
 public:
  LinearCombination(double a, const A& lhs, double b, const B& rhs)
      : a_(a), b_(b), lhs_(&lhs), rhs_(&rhs), scratch_(lhs.dimension()) {
    detail::require(lhs.dimension() == rhs.dimension(), "linear combination: dimension mismatch");
  }

  std::size_t dimension() const noexcept { return lhs_->dimension(); }

  void multiply(std::span<const double> x, std::span<double> y) const {
    lhs_->multiply(x, y);
    rhs_->multiply(x, scratch_);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a_ * y[i] - b_ * scratch_[i];
  }

 private:
  double a_, b_;
  const A* lhs_;
  const B* rhs_;
  mutable std::vector<double> scratch_;
};

struct SpectralNormResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // false: NOT_CONVERGED, value is the best estimate
};

struct PowerIterationOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 0x5eed;
};

/// Largest |eigenvalue| of a symmetric operator by power iteration.
///
/// The iterate is x ← Ax/‖Ax‖. The estimate is the larger |Ritz value| of A
/// on span{x, Ax}, i.e. the Rayleigh quotient of the best vector there; once x
/// has collapsed onto the dominant ±λ pair that span contains both
/// eigenvectors, so nearly opposite extremes do not slow the estimate down.
/// Stops when successive estimates differ relatively by < tol.
template <SymmetricOperator M>
SpectralNormResult spectral_norm(const M& m, const PowerIterationOptions& opt = {}) {
  detail::require(opt.tol > 0.0, "spectral_norm: tol must be positive");
  if constexpr (requires { m.all_finite(); }) {
    if (!m.all_finite()) throw ArgumentError("spectral_norm: non-finite matrix entry");
  }
  const std::size_t n = m.dimension();
  SpectralNormResult r;
  if (n == 0) {
    r.converged = true;
    return r;
  }
  std::vector<double> x(n), y(n), q(n), z(n);
  Stream rng(derive_key(opt.seed, "power-iteration"));
  for (double& v : x) v = 2.0 * rng.uniform() - 1.0;
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  auto normalize = [&](std::vector<double>& v) {
    const double s = std::sqrt(dot(v, v));
    if (s > 0.0) {
      for (double& e : v) e /= s;
    }
    return s;
  };
  normalize(x);

  double prev = -1.0;
  for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
    m.multiply(x, y);
    const double alpha = dot(x, y);
    for (std::size_t i = 0; i < n; ++i) q[i] = y[i] - alpha * x[i];
    const double proj = dot(q, x);  // one re-orthogonalization pass
    for (std::size_t i = 0; i < n; ++i) q[i] -= proj * x[i];
    const double beta = normalize(q);
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw ArgumentError("spectral_norm: non-finite iterate");

    double est = std::abs(alpha);
    if (beta > 1e-14 * std::max(std::abs(alpha), std::numeric_limits<double>::min())) {
      m.multiply(q, z);
      const double gamma = dot(q, z);
      const double mid = 0.5 * (alpha + gamma), rad = std::hypot(0.5 * (alpha - gamma), beta);
      const double mu = std::abs(mid + rad) >= std::abs(mid - rad) ? mid + rad : mid - rad;
      est = std::abs(mu);
    }
    x.swap(y);
    normalize(x);
    r.value = est;
    if (est == 0.0 || beta <= 1e-14 * est) {
      r.converged = true;
      return r;
    }
    if (prev >= 0.0 && std::abs(est - prev) < opt.tol * est) {
      r.converged = true;
      return r;
    }
    prev = est;
  }
  r.iterations = opt.max_iter;
  return r;
}

/// Laplacian D - A of the subgraph induced on `nodes` (row i ↔ nodes[i]);
/// degrees count induced neighbors only, so every row sums to zero.
inline SparseSymmetricMatrix laplacian_of(const Graph& g, std::span<const NodeId> nodes) {
  detail::require(!nodes.empty(), "laplacian_of: empty node set");
  std::vector<NodeId> sorted(nodes.begin(), nodes.end());
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = nodes[order[i]];
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    detail::require(sorted[i] != sorted[i - 1], "laplacian_of: duplicate node " + std::to_string(sorted[i]));
  }
  for (NodeId u : sorted) g.check(u);

  auto index_of = [&](NodeId v) -> std::ptrdiff_t {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it == sorted.end() || *it != v) return -1;
    return static_cast<std::ptrdiff_t>(order[static_cast<std::size_t>(it - sorted.begin())]);
  };

  std::vector<std::vector<SparseSymmetricMatrix::Entry>> rows(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t degree = 0;
    for (NodeId v : g.neighbors(nodes[i])) {
      const auto j = index_of(v);
      if (j < 0) continue;
      ++degree;
      rows[i].push_back({static_cast<std::size_t>(j), -1.0});
    }
    rows[i].push_back({i, static_cast<double>(degree)});
  }
  return SparseSymmetricMatrix(nodes.size(), std::move(rows));
}

/// Laplacian of the graph formed by `edges` alone over their endpoints.
inline SparseSymmetricMatrix edge_set_laplacian(std::span<const Edge> edges) {
  std::vector<NodeId> ids;
  for (const Edge& e : edges) {
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Edge> local;
  for (const Edge& e : edges) {
    local.push_back({static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), e.u) - ids.begin()),
                     static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), e.v) - ids.begin())});
  }
  const Graph g(ids.size(), local);
  std::vector<NodeId> all(ids.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
  return laplacian_of(g, all);
}

/// Adjacency matrix of g as a symmetric 0/1 operator.
inline SparseSymmetricMatrix adjacency_matrix(const Graph& g) {
  std::vector<std::vector<SparseSymmetricMatrix::Entry>> rows(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.neighbors(u)) rows[u].push_back({v, 1.0});
  }
  return SparseSymmetricMatrix(g.node_count(), std::move(rows));
}

// ---------------------------------------------------------------------------
// Coupled cut experiment

struct SpectralOptions {
  std::size_t max_local_nodes = 4000;
  PowerIterationOptions power;
};

struct SpectralTrial {
  std::uint64_t seed = 0;
  std::size_t d_tilde = 0;
  std::size_t cut_size = 0;
  std::size_t neighborhood_size = 0;  // |U|
  double norm_L = 0.0, norm_Lp = 0.0;
  double diff_normalized = 0.0;  // ‖L̃ - L̃'‖₂
  double analytic_bound = 0.0;
  bool within_bound = false;
  bool converged = true;  // all three power iterations converged
  std::size_t max_degree_L = 0, max_degree_Lp = 0;
};

/// Samples G_S, G'_S coupled on the cut, builds the Laplacians of both graphs
/// on U = union of the d̃-balls around the first replicas of m, m' in both
/// graphs, normalizes each by its own spectral norm and compares the
/// difference against √(2λ)·B(1)/√(n·ln(nλ)).
inline SpectralTrial coupled_cut_trial(const CutPair& cp, const SampleParams& params, std::size_t d_tilde,
                                       std::uint64_t seed, const SpectralOptions& opt = {}) {
  detail::require(!cp.cut.empty(), "coupled_cut_trial: cut pair has an empty cut");
  const CoupledSymbolGraphs pair = sample_coupled(cp.g, cp.cut, params, seed);
  const NodeId reps[] = {pair.g.replica(cp.m), pair.g.replica(cp.m_prime)};

  std::vector<NodeId> u = ball(pair.g.graph(), reps, d_tilde);
  const std::vector<NodeId> u_prime = ball(pair.g_prime.graph(), reps, d_tilde);
  std::vector<NodeId> merged;
  std::set_union(u.begin(), u.end(), u_prime.begin(), u_prime.end(), std::back_inserter(merged));
  if (merged.size() > opt.max_local_nodes) {
    throw ArgumentError("coupled_cut_trial: neighborhood of " + std::to_string(merged.size()) +
                        " nodes exceeds cap " + std::to_string(opt.max_local_nodes));
  }

  const SparseSymmetricMatrix L = laplacian_of(pair.g.graph(), merged);
  const SparseSymmetricMatrix Lp = laplacian_of(pair.g_prime.graph(), merged);

  SpectralTrial t;
  t.seed = seed;
  t.d_tilde = d_tilde;
  t.cut_size = cp.cut.size();
  t.neighborhood_size = merged.size();
  for (std::size_t i = 0; i < merged.size(); ++i) {
    t.max_degree_L = std::max(t.max_degree_L, static_cast<std::size_t>(L(i, i)));
    t.max_degree_Lp = std::max(t.max_degree_Lp, static_cast<std::size_t>(Lp(i, i)));
  }
  const auto nl = spectral_norm(L, opt.power);
  const auto nlp = spectral_norm(Lp, opt.power);
  t.norm_L = nl.value;
  t.norm_Lp = nlp.value;
  // Zero-norm Laplacians are left unscaled.
  const double a = t.norm_L > 0.0 ? 1.0 / t.norm_L : 1.0;
  const double b = t.norm_Lp > 0.0 ? 1.0 / t.norm_Lp : 1.0;
  const auto diff = spectral_norm(LinearCombination(a, L, b, Lp), opt.power);
  t.diff_normalized = diff.value;
  t.converged = nl.converged && nlp.converged && diff.converged;
  t.analytic_bound = laplacian_diff_bound(cp.g.node_count(), params.lambda, ball_bound(cp.g.graph, 1));
  t.within_bound = t.diff_normalized <= t.analytic_bound;
  return t;
}

inline constexpr const char* kSpectralCsvHeader =
    "seed,n,lambda,p_minus,d,d_tilde,cut_size,U_size,normL,normLp,diff,bound,within";

inline std::string spectral_csv_record(const SpectralTrial& t, std::size_t n, const SampleParams& p,
                                       std::size_t d) {
  return std::to_string(t.seed) + ',' + std::to_string(n) + ',' + std::to_string(p.lambda) + ',' +
         format_double(p.p_minus) + ',' + std::to_string(d) + ',' + std::to_string(t.d_tilde) + ',' +
         std::to_string(t.cut_size) + ',' + std::to_string(t.neighborhood_size) + ',' +
         format_double(t.norm_L) + ',' + format_double(t.norm_Lp) + ',' + format_double(t.diff_normalized) +
         ',' + format_double(t.analytic_bound) + ',' + (t.within_bound ? "1" : "0");
}

/// ‖A(G(n,p))‖₂ / √(2n·ln n). Diagnostic only.
inline double adjacency_norm_ratio(std::size_t n, double p, std::uint64_t seed,
                                   const PowerIterationOptions& opt = {}) {
  detail::require(n >= 2, "adjacency_norm_ratio: n must be >= 2");
  const MeaningGraph g = gen_er(n, p, seed);
  const double norm = spectral_norm(adjacency_matrix(g.graph), opt).value;
  const double nn = static_cast<double>(n);
  return norm / std::sqrt(2.0 * nn * std::log(nn));
}

}  // namespace symgraph
