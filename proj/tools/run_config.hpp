#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "symgraph/symgraph.hpp"

namespace symgraph::cli {

/// Where the meaning graph comes from.
struct GraphSource {
  std::string kind = "er";  // er | triples | edges
  std::size_t n = 200;
  double p = 0.03;
  std::uint64_t seed = 1;
  std::string path;
  std::string prefix;
};

/// Everything one subcommand run needs. A JSON config fills these first;
/// command-line flags override individual fields.
struct RunConfig {
  std::string experiment;
  SampleParams params;
  GraphSource graph;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool allow_trivial = false;
  std::string out;

  // gamma, spectral, check
  std::size_t d = 2;
  std::size_t d_tilde = 0;  // 0: derived from regime
  std::string regime = "possibility";
  std::size_t trials = 100;
  std::string replica = "first";
  bool fixed_pairs = false;

  // heatmap
  std::vector<double> p_minus_grid{1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  std::size_t d_max = 5;
  std::size_t pairs_per_cell = 50;

  // bounds
  std::size_t n = 0;
  std::size_t ball_d = 0;
  std::size_t ball_1 = 0;
  double c2 = 2.0;
  double c3 = 2.0;
  std::string format = "text";

  void validate() const {
    params.validate();
    detail::require(threads >= 1, "threads must be >= 1");
    detail::require(d >= 1, "d must be >= 1");
    detail::require(trials >= 1, "trials must be >= 1");
    detail::require(regime == "possibility" || regime == "impossibility",
                    "regime must be 'possibility' or 'impossibility'");
    detail::require(replica == "first" || replica == "uniform", "replica must be 'first' or 'uniform'");
    detail::require(!p_minus_grid.empty(), "p_minus_grid must not be empty");
    for (double p : p_minus_grid) detail::require_probability(p, "p_minus_grid value");
    detail::require(d_max >= 1, "d_max must be >= 1");
    detail::require(pairs_per_cell >= 1, "pairs_per_cell must be >= 1");
    detail::require(c2 > 0 && c3 > 0, "c2 and c3 must be positive");
    detail::require(format == "text" || format == "json", "format must be 'text' or 'json'");
    detail::require(graph.kind == "er" || graph.kind == "triples" || graph.kind == "edges",
                    "graph.kind must be er, triples or edges");
    if (graph.kind == "er") detail::require_probability(graph.p, "graph.p");
    if (graph.kind != "er") detail::require(!graph.path.empty(), "graph.path is required");
  }

  std::size_t resolved_d_tilde() const {
    if (d_tilde) return d_tilde;
    return choose_d_tilde(regime == "possibility" ? Regime::kPossibility : Regime::kImpossibility,
                          params.lambda, d);
  }
};

namespace config_detail {

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!j.at(key).is_number_unsigned()) {
      throw ArgumentError(std::string("config key '") + key + "' must be a non-negative integer");
    }
  }
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config key '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ArgumentError("unknown config key '" + where + key + "'");
  }
}

}  // namespace config_detail

/// Overlays a parsed JSON config onto `cfg`. Unknown keys are rejected.
inline void apply_json(const nlohmann::json& j, RunConfig& cfg) {
  using config_detail::take;
  if (!j.is_object()) throw ArgumentError("config root must be a JSON object");
  config_detail::reject_unknown(j,
                         {"experiment", "params", "graph", "seed", "threads", "allow_trivial", "out", "d",
                          "d_tilde", "regime", "trials", "replica", "fixed_pairs", "p_minus_grid", "d_max",
                          "pairs_per_cell", "n", "ball_d", "ball_1", "c2", "c3", "format"},
                         "");
  take(j, "experiment", cfg.experiment);
  take(j, "seed", cfg.seed);
  take(j, "threads", cfg.threads);
  take(j, "allow_trivial", cfg.allow_trivial);
  take(j, "out", cfg.out);
  take(j, "d", cfg.d);
  take(j, "d_tilde", cfg.d_tilde);
  take(j, "regime", cfg.regime);
  take(j, "trials", cfg.trials);
  take(j, "replica", cfg.replica);
  take(j, "fixed_pairs", cfg.fixed_pairs);
  take(j, "p_minus_grid", cfg.p_minus_grid);
  take(j, "d_max", cfg.d_max);
  take(j, "pairs_per_cell", cfg.pairs_per_cell);
  take(j, "n", cfg.n);
  take(j, "ball_d", cfg.ball_d);
  take(j, "ball_1", cfg.ball_1);
  take(j, "c2", cfg.c2);
  take(j, "c3", cfg.c3);
  take(j, "format", cfg.format);
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) throw ArgumentError("config key 'params' must be an object");
    config_detail::reject_unknown(p, {"p_plus", "p_minus", "eps_plus", "eps_minus", "lambda", "fold"}, "params.");
    take(p, "p_plus", cfg.params.p_plus);
    take(p, "p_minus", cfg.params.p_minus);
    take(p, "eps_plus", cfg.params.eps_plus);
    take(p, "eps_minus", cfg.params.eps_minus);
    take(p, "lambda", cfg.params.lambda);
    take(p, "fold", cfg.params.fold);
  }
  if (j.contains("graph")) {
    const auto& g = j.at("graph");
    if (!g.is_object()) throw ArgumentError("config key 'graph' must be an object");
    config_detail::reject_unknown(g, {"kind", "n", "p", "seed", "path", "prefix"}, "graph.");
    take(g, "kind", cfg.graph.kind);
    take(g, "n", cfg.graph.n);
    take(g, "p", cfg.graph.p);
    take(g, "seed", cfg.graph.seed);
    take(g, "path", cfg.graph.path);
    take(g, "prefix", cfg.graph.prefix);
  }
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  apply_json(j, cfg);
}

}  // namespace symgraph::cli
