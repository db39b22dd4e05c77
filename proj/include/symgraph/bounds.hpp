#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "symgraph/errors.hpp"
#include "symgraph/params.hpp"

// Closed-form accuracy bounds for the connectivity separator, random-graph
// connectivity bounds, and the local-Laplacian closeness bound. All logarithms
// are natural. Probabilities are clamped into [0,1]; the *_raw variants keep
// the unclamped value.

namespace symgraph {

inline constexpr double kE = std::numbers::e;
inline const double kE3 = std::exp(3.0);

namespace detail {
inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace detail

/// Lower bound on P[w reaches w' within λd+λ-1 | dist(m,m') = d]:
/// (1 - 2e³ ε+^{λ/2})₊^{d+1} · (1 - (1 - p+ ⊕ ε-)^{λ²})^d.
inline double lb_connected_raw(std::size_t d, std::size_t lambda, double p_plus, double eps_plus,
                               double eps_minus) {
  detail::require(lambda >= 1 && d >= 1, "lb_connected: lambda and d must be >= 1");
  const double lam = static_cast<double>(lambda);
  const double cluster = 1.0 - 2.0 * kE3 * std::pow(eps_plus, lam / 2.0);
  const double link = 1.0 - std::pow(1.0 - fold_noise(p_plus, eps_minus), lam * lam);
  return std::pow(std::max(cluster, 0.0), static_cast<double>(d + 1)) *
         std::pow(link, static_cast<double>(d));
}

inline double lb_connected(std::size_t d, std::size_t lambda, double p_plus, double eps_plus,
                           double eps_minus) {
  return detail::clamp01(lb_connected_raw(d, lambda, p_plus, eps_plus, eps_minus));
}

/// 2e·n·(λ·B(d))²·q, the spurious-path penalty with q the noise probability.
inline double spurious_penalty(std::size_t n, std::size_t lambda, std::size_t ball_d, double q) {
  const double t = std::pow(static_cast<double>(lambda) * static_cast<double>(ball_d), 2.0) * q;
  return 2.0 * kE * static_cast<double>(n) * t;
}

/// Upper bound on P[w reaches w' within d̃ | m, m' disconnected], or nullopt
/// (INAPPLICABLE) when (λB(d))²(p- ⊕ ε-) > 1/(2en).
inline std::optional<double> ub_disconnected(std::size_t n, std::size_t d, std::size_t lambda,
                                             double p_minus, double eps_minus, std::size_t ball_d) {
  (void)d;  // enters only through ball_d
  detail::require(n >= 1 && lambda >= 1, "ub_disconnected: n and lambda must be >= 1");
  detail::require(ball_d >= 1, "ub_disconnected: ball_d must be >= 1");
  const double q = fold_noise(p_minus, eps_minus);
  const double t = std::pow(static_cast<double>(lambda) * static_cast<double>(ball_d), 2.0) * q;
  if (t > 1.0 / (2.0 * kE * static_cast<double>(n))) return std::nullopt;
  return detail::clamp01(2.0 * kE * static_cast<double>(n) * t);
}

enum class PenaltyForm {
  kFolded,  // penalty uses p- ⊕ ε- (default)
  kBare,    // penalty uses p- alone
};

/// γ* before clamping: LB - penalty.
inline double gamma_star_raw(std::size_t n, std::size_t d, std::size_t lambda, double p_plus,
                             double p_minus, double eps_plus, double eps_minus, std::size_t ball_d,
                             PenaltyForm form = PenaltyForm::kFolded) {
  detail::require_probability(p_plus, "p_plus");
  detail::require_probability(p_minus, "p_minus");
  detail::require_probability(eps_plus, "eps_plus");
  detail::require_probability(eps_minus, "eps_minus");
  detail::require(ball_d >= 1, "gamma_star: ball_d must be >= 1");
  const double q = form == PenaltyForm::kFolded ? fold_noise(p_minus, eps_minus) : p_minus;
  return lb_connected_raw(d, lambda, p_plus, eps_plus, eps_minus) - spurious_penalty(n, lambda, ball_d, q);
}

inline double gamma_star(std::size_t n, std::size_t d, std::size_t lambda, double p_plus,
                         double p_minus, double eps_plus, double eps_minus, std::size_t ball_d,
                         PenaltyForm form = PenaltyForm::kFolded) {
  return std::max(0.0, gamma_star_raw(n, d, lambda, p_plus, p_minus, eps_plus, eps_minus, ball_d, form));
}

// ---------------------------------------------------------------------------
// Connectivity of G(n, p)

struct GilbertBounds {
  double exact_formula_lb = 1.0;
  double corollary_lb = 1.0;
  double exact_formula_raw = 1.0;
  double corollary_raw = 1.0;
};

/// Gilbert's lower bound on P[G(n,p) connected] and its simplification
/// 1 - 2e³q^{n/2}, q = 1-p. Both are defined as 1 for n = 1.
inline GilbertBounds gilbert_bounds(std::size_t n, double p) {
  detail::require(n >= 1, "gilbert_bounds: n must be >= 1");
  detail::require_probability(p, "p");
  GilbertBounds b;
  if (n == 1) return b;
  const double q = 1.0 - p;
  const double nn = static_cast<double>(n);
  const double a = std::pow(1.0 + std::pow(q, (nn - 2.0) / 2.0), nn - 1.0);
  const double bracket = std::pow(q, nn - 1.0) * (a - std::pow(q, (nn - 2.0) * (nn - 1.0) / 2.0)) +
                         std::pow(q, nn / 2.0) * (a - 1.0);
  b.exact_formula_raw = 1.0 - bracket;
  b.corollary_raw = 1.0 - 2.0 * kE3 * std::pow(q, nn / 2.0);
  b.exact_formula_lb = detail::clamp01(b.exact_formula_raw);
  b.corollary_lb = detail::clamp01(b.corollary_raw);
  return b;
}

/// √(2λ)·B(1) / √(n·ln(nλ)).
inline double laplacian_diff_bound(std::size_t n, std::size_t lambda, std::size_t ball_1) {
  detail::require(n >= 2 && lambda >= 1 && ball_1 >= 1,
                  "laplacian_diff_bound: need n >= 2, lambda >= 1, ball_1 >= 1");
  const double nn = static_cast<double>(n), lam = static_cast<double>(lambda);
  return std::sqrt(2.0 * lam) * static_cast<double>(ball_1) / std::sqrt(nn * std::log(nn * lam));
}

// ---------------------------------------------------------------------------
// Theorem preconditions

/// lhs <op> rhs, with the evaluated sides kept for reporting.
struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct Preconditions {
  // Possibility: (p- ⊕ ε-)·B(d)² < 1/(2eλ²n).
  Inequality possibility;
  // Connectivity impossibility: p- ⊕ ε- >= c2/(λn) and d >= ceil(ln n).
  Inequality small_world_noise;
  Inequality small_world_depth;
  // General impossibility: p- ⊕ ε- > c3·ln n/(λn) and d > ln n.
  Inequality general_noise;
  Inequality general_depth;

  bool theorem1() const { return possibility.holds; }
  bool theorem2() const { return small_world_noise.holds && small_world_depth.holds; }
  bool theorem3() const { return general_noise.holds && general_depth.holds; }
};

inline Preconditions theorem_preconditions(std::size_t n, std::size_t d, std::size_t lambda,
                                           double p_minus, double eps_minus, std::size_t ball_d,
                                           double c2 = 2.0, double c3 = 2.0) {
  detail::require(n >= 2 && lambda >= 1 && ball_d >= 1, "theorem_preconditions: need n >= 2, lambda, ball_d >= 1");
  detail::require(c2 > 0 && c3 > 0, "theorem_preconditions: constants must be positive");
  const double q = fold_noise(p_minus, eps_minus);
  const double nn = static_cast<double>(n), lam = static_cast<double>(lambda);
  const double b = static_cast<double>(ball_d), dd = static_cast<double>(d);
  const double ln_n = std::log(nn);

  Preconditions p;
  p.possibility.lhs = q * b * b;
  p.possibility.rhs = 1.0 / (2.0 * kE * lam * lam * nn);
  p.possibility.holds = p.possibility.lhs < p.possibility.rhs;

  p.small_world_noise = {q, c2 / (lam * nn), q >= c2 / (lam * nn)};
  p.small_world_depth = {dd, std::ceil(ln_n), dd >= std::ceil(ln_n)};

  p.general_noise = {q, c3 * ln_n / (lam * nn), q > c3 * ln_n / (lam * nn)};
  p.general_depth = {dd, ln_n, dd > ln_n};

  // With c2 >= 1 the two noise conditions cannot both hold:
  // 1/(2eλ²n·B²) < 1/(λn) <= c2/(λn).
  if (c2 >= 1.0 && p.theorem1() && p.small_world_noise.holds) {
    throw std::logic_error("possibility and small-world regimes overlap");
  }
  return p;
}

/// All closed-form quantities for one parameter point.
struct BoundReport {
  std::size_t n = 0, d = 0, lambda = 0, ball_d = 0, ball_1 = 0;
  SampleParams params;
  double c2 = 2.0, c3 = 2.0;

  double lb_connected = 0.0, lb_connected_raw = 0.0;
  std::optional<double> ub_disconnected;
  double penalty = 0.0;
  double gamma_star = 0.0, gamma_star_raw = 0.0;
  double gamma_star_bare = 0.0;  // penalty with bare p-
  std::optional<double> laplacian_bound;  // when ball_1 >= 1 and n >= 2
  Preconditions preconditions;
};

inline BoundReport make_bound_report(std::size_t n, std::size_t d, const SampleParams& params,
                                     std::size_t ball_d, std::size_t ball_1 = 0, double c2 = 2.0,
                                     double c3 = 2.0) {
  params.validate();
  BoundReport r;
  r.n = n;
  r.d = d;
  r.lambda = params.lambda;
  r.ball_d = ball_d;
  r.ball_1 = ball_1;
  r.params = params;
  r.c2 = c2;
  r.c3 = c3;
  const auto& p = params;
  r.lb_connected_raw = lb_connected_raw(d, p.lambda, p.p_plus, p.eps_plus, p.eps_minus);
  r.lb_connected = detail::clamp01(r.lb_connected_raw);
  r.ub_disconnected = ub_disconnected(n, d, p.lambda, p.p_minus, p.eps_minus, ball_d);
  r.penalty = spurious_penalty(n, p.lambda, ball_d, fold_noise(p.p_minus, p.eps_minus));
  r.gamma_star_raw = gamma_star_raw(n, d, p.lambda, p.p_plus, p.p_minus, p.eps_plus, p.eps_minus, ball_d);
  r.gamma_star = std::max(0.0, r.gamma_star_raw);
  r.gamma_star_bare = gamma_star(n, d, p.lambda, p.p_plus, p.p_minus, p.eps_plus, p.eps_minus, ball_d,
                                 PenaltyForm::kBare);
  if (ball_1 >= 1 && n >= 2) r.laplacian_bound = laplacian_diff_bound(n, p.lambda, ball_1);
  r.preconditions = theorem_preconditions(n, d, p.lambda, p.p_minus, p.eps_minus, ball_d, c2, c3);
  return r;
}

}  // namespace symgraph
