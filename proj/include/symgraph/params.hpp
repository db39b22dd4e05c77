#pragma once

#include <cstddef>

#include "symgraph/errors.hpp"

namespace symgraph {

/// Noisy-OR: p ⊕ q = 1 - (1-p)(1-q).
inline double fold_noise(double p, double eps) {
  detail::require_probability(p, "p");
  detail::require_probability(eps, "eps");
  return p + eps - p * eps;
}

/// Knobs of the symbol-graph sampler and of the noisy similarity oracle.
struct SampleParams {
  double p_plus = 1.0;     // retention of a meaning edge, per symbol slot
  double p_minus = 0.0;    // spurious structural edge, per symbol slot
  double eps_plus = 0.0;   // similarity false negative inside a cluster
  double eps_minus = 0.0;  // similarity false positive across clusters
  std::size_t lambda = 1;  // replicas per meaning node
  bool fold = false;       // fold eps_minus into p_plus / p_minus

  void validate() const {
    detail::require_probability(p_plus, "p_plus");
    detail::require_probability(p_minus, "p_minus");
    detail::require_probability(eps_plus, "eps_plus");
    detail::require_probability(eps_minus, "eps_minus");
    detail::require(lambda >= 1, "lambda must be >= 1");
  }

  /// The channel actually sampled: when `fold` is set, (p+ ⊕ ε-, p- ⊕ ε-, ε+, 0).
  SampleParams effective() const {
    validate();
    if (!fold) return *this;
    SampleParams e = *this;
    e.p_plus = fold_noise(p_plus, eps_minus);
    e.p_minus = fold_noise(p_minus, eps_minus);
    e.eps_minus = 0.0;
    e.fold = false;
    return e;
  }

  /// Per-slot probability that two symbols of adjacent meaning nodes are joined
  /// by a structural or similarity edge.
  double meaning_edge_pair_probability() const {
    return fold ? effective().p_plus : fold_noise(p_plus, eps_minus);
  }
  double non_edge_pair_probability() const {
    return fold ? effective().p_minus : fold_noise(p_minus, eps_minus);
  }
  double intra_cluster_pair_probability() const { return 1.0 - eps_plus; }

  friend bool operator==(const SampleParams&, const SampleParams&) = default;
};

/// λ=1, p+=1, p-=ε+=ε-=0: the symbol graph reproduces the meaning graph.
inline SampleParams identity_params() { return SampleParams{}; }

}  // namespace symgraph
