#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "run_config.hpp"
#include "symgraph/symgraph.hpp"

namespace symgraph::cli {

enum ExitCode : int { kExitOk = 0, kExitArgument = 1, kExitIo = 2, kExitNoFixture = 3 };

namespace impl {

/// Writes `name` under cfg.out, or to `fallback` when no output directory is set.
inline void emit(const RunConfig& cfg, const std::string& name, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& body) {
  if (cfg.out.empty()) {
    body(fallback);
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out + ": " + ec.message());
  const std::string path = (std::filesystem::path(cfg.out) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  body(f);
  f.flush();
  if (!f) throw IoError("write failed on " + path);
}

inline MeaningGraph load_graph(const GraphSource& src) {
  if (src.kind == "er") return gen_er(src.n, src.p, src.seed);
  if (src.kind == "triples") return load_triples(src.path, src.prefix);
  return MeaningGraph{read_edge_list_file(src.path), {}};
}

inline void require_nontrivial(const RunConfig& cfg, const MeaningGraph& gm, std::ostream& err) {
  if (cfg.allow_trivial) return;
  const NontrivialityReport r = check_nontrivial(gm, cfg.params, cfg.d);
  if (r.pass) return;
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (!r.conditions[i].pass) err << "nontriviality condition " << i + 1 << " fails: " << r.conditions[i].message << '\n';
  }
  throw ArgumentError("parameters are trivial for this meaning graph (pass --allow-trivial to run anyway)");
}

inline std::string yes_no(bool b) { return b ? "holds" : "fails"; }

inline void write_bounds_text(std::ostream& o, const BoundReport& r) {
  auto row = [&](const std::string& key, const std::string& value) {
    o << std::left << std::setw(22) << key << value << '\n';
  };
  auto num = [](double x) { return format_double(x); };
  row("n", std::to_string(r.n));
  row("d", std::to_string(r.d));
  row("lambda", std::to_string(r.lambda));
  row("ball_d", std::to_string(r.ball_d));
  row("ball_1", std::to_string(r.ball_1));
  row("p_plus", num(r.params.p_plus));
  row("p_minus", num(r.params.p_minus));
  row("eps_plus", num(r.params.eps_plus));
  row("eps_minus", num(r.params.eps_minus));
  row("lb_connected", num(r.lb_connected));
  row("ub_disconnected", r.ub_disconnected ? num(*r.ub_disconnected) : "INAPPLICABLE");
  row("penalty", num(r.penalty));
  row("gamma_star", num(r.gamma_star));
  row("gamma_star_raw", num(r.gamma_star_raw));
  row("gamma_star_bare", num(r.gamma_star_bare));
  row("laplacian_bound", r.laplacian_bound ? num(*r.laplacian_bound) : "n/a");
  const auto& p = r.preconditions;
  auto ineq = [&](const std::string& key, const Inequality& q, const char* op) {
    row(key, yes_no(q.holds) + "  " + num(q.lhs) + ' ' + op + ' ' + num(q.rhs));
  };
  ineq("possibility", p.possibility, "<");
  ineq("small_world_noise", p.small_world_noise, ">=");
  ineq("small_world_depth", p.small_world_depth, ">=");
  ineq("general_noise", p.general_noise, ">");
  ineq("general_depth", p.general_depth, ">");
  row("theorem1", yes_no(p.theorem1()));
  row("theorem2", yes_no(p.theorem2()));
  row("theorem3", yes_no(p.theorem3()));
}

inline nlohmann::ordered_json bounds_json(const BoundReport& r) {
  using J = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? J(*v) : J(nullptr); };
  auto ineq = [](const Inequality& q) { return J{{"lhs", q.lhs}, {"rhs", q.rhs}, {"holds", q.holds}}; };
  const auto& p = r.preconditions;
  J j;
  j["n"] = r.n;
  j["d"] = r.d;
  j["lambda"] = r.lambda;
  j["ball_d"] = r.ball_d;
  j["ball_1"] = r.ball_1;
  j["p_plus"] = r.params.p_plus;
  j["p_minus"] = r.params.p_minus;
  j["eps_plus"] = r.params.eps_plus;
  j["eps_minus"] = r.params.eps_minus;
  j["c2"] = r.c2;
  j["c3"] = r.c3;
  j["lb_connected"] = r.lb_connected;
  j["lb_connected_raw"] = r.lb_connected_raw;
  j["ub_disconnected"] = opt(r.ub_disconnected);
  j["penalty"] = r.penalty;
  j["gamma_star"] = r.gamma_star;
  j["gamma_star_raw"] = r.gamma_star_raw;
  j["gamma_star_bare"] = r.gamma_star_bare;
  j["laplacian_bound"] = opt(r.laplacian_bound);
  j["preconditions"] = J{{"possibility", ineq(p.possibility)},
                         {"small_world_noise", ineq(p.small_world_noise)},
                         {"small_world_depth", ineq(p.small_world_depth)},
                         {"general_noise", ineq(p.general_noise)},
                         {"general_depth", ineq(p.general_depth)},
                         {"theorem1", p.theorem1()},
                         {"theorem2", p.theorem2()},
                         {"theorem3", p.theorem3()}};
  return j;
}

// Subcommand bodies. Each validates before touching any graph.

inline void run_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const MeaningGraph gm = load_graph(cfg.graph);
  require_nontrivial(cfg, gm, err);
  const SymbolGraph sg = sample_symbol_graph(gm, cfg.params, cfg.seed);
  emit(cfg, "symbol_graph.tsv", out, [&](std::ostream& o) { write_symbol_graph(o, sg); });
}

inline void run_gamma(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const MeaningGraph gm = load_graph(cfg.graph);
  require_nontrivial(cfg, gm, err);
  GammaOptions opt;
  opt.replica = cfg.replica == "first" ? ReplicaChoice::kFirst : ReplicaChoice::kUniform;
  opt.fixed_pairs = cfg.fixed_pairs;
  opt.threads = cfg.threads;
  const std::size_t d_tilde = cfg.resolved_d_tilde();
  const GammaEstimate g = estimate_gamma(gm, cfg.d, cfg.params, d_tilde, cfg.trials, cfg.seed, opt);
  emit(cfg, "gamma.csv", out, [&](std::ostream& o) {
    o << kGammaCsvHeader << '\n' << gamma_csv_record(gm.node_count(), cfg.d, cfg.params, d_tilde, g) << '\n';
  });
}

inline void run_bounds(const RunConfig& cfg, bool graph_given, std::ostream& out) {
  cfg.validate();
  std::size_t n = cfg.n, ball_d = cfg.ball_d, ball_1 = cfg.ball_1;
  if (graph_given || n == 0 || ball_d == 0) {
    const MeaningGraph gm = load_graph(cfg.graph);
    n = gm.node_count();
    ball_d = ball_bound(gm.graph, cfg.d);
    ball_1 = ball_bound(gm.graph, 1);
  }
  const BoundReport r = make_bound_report(n, cfg.d, cfg.params, ball_d, ball_1, cfg.c2, cfg.c3);
  auto text = [&](std::ostream& o) { write_bounds_text(o, r); };
  auto json = [&](std::ostream& o) { o << bounds_json(r).dump(2) << '\n'; };
  if (cfg.out.empty()) {
    if (cfg.format == "json") {
      json(out);
    } else {
      text(out);
    }
    return;
  }
  emit(cfg, "bounds.txt", out, text);
  emit(cfg, "bounds.json", out, json);
}

inline void run_heatmap(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const MeaningGraph gm = load_graph(cfg.graph);
  require_nontrivial(cfg, gm, err);
  const HeatmapTable t =
      heatmap(gm, cfg.p_minus_grid, cfg.d_max, cfg.pairs_per_cell, cfg.params, cfg.seed, cfg.threads);
  emit(cfg, "heatmap.csv", out, [&](std::ostream& o) { write_heatmap_csv(o, t); });
  if (!cfg.out.empty()) emit(cfg, "heatmap.svg", out, [&](std::ostream& o) { write_heatmap_svg(o, t); });
}

inline void run_spectral(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const MeaningGraph gm = load_graph(cfg.graph);
  require_nontrivial(cfg, gm, err);
  const std::size_t d_tilde = cfg.d_tilde ? cfg.d_tilde : cfg.params.lambda * cfg.d;
  const PairSampler pairs(gm.graph);
  std::vector<SpectralTrial> trials(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    Stream rng(derive_key(cfg.seed, "spectral-pair", i));
    const auto pair = pairs.at_distance(cfg.d, rng);
    if (!pair) throw NoFixtureError("meaning graph has no pair at distance " + std::to_string(cfg.d));
    const CutPair cp = make_cut_pair(gm, pair->first, pair->second);
    trials[i] = coupled_cut_trial(cp, cfg.params, d_tilde, derive_key(cfg.seed, "spectral-trial", i));
  });
  emit(cfg, "spectral.csv", out, [&](std::ostream& o) {
    o << kSpectralCsvHeader << '\n';
    for (const auto& t : trials) o << spectral_csv_record(t, gm.node_count(), cfg.params, cfg.d) << '\n';
  });
}

inline void run_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::require(!cfg.graph.path.empty(), "ingest needs --triples");
  const MeaningGraph gm = load_triples(cfg.graph.path, cfg.graph.prefix);
  err << "nodes " << gm.node_count() << " edges " << gm.edge_count() << '\n';
  emit(cfg, "graph.edges", out, [&](std::ostream& o) { write_edge_list(o, gm.graph); });
  if (!cfg.out.empty()) {
    emit(cfg, "labels.tsv", out, [&](std::ostream& o) {
      for (std::size_t i = 0; i < gm.labels.size(); ++i) o << i << '\t' << gm.labels[i] << '\n';
    });
  }
}

inline void run_check(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const MeaningGraph gm = load_graph(cfg.graph);
  const NontrivialityReport r = check_nontrivial(gm, cfg.params, cfg.d);
  emit(cfg, "nontriviality.txt", out, [&](std::ostream& o) {
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      o << "condition " << i + 1 << ' ' << (r.conditions[i].pass ? "PASS" : "FAIL") << "  "
        << r.conditions[i].message << '\n';
    }
    o << "overall " << (r.pass ? "PASS" : "FAIL") << '\n';
  });
}

/// Value of --config in argv, if any.
inline std::string find_config(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace impl

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    if (const std::string path = impl::find_config(argc, argv); !path.empty()) load_config_file(path, cfg);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgument;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  CLI::App app{"Simulator for reasoning over noisy symbol graphs sampled from a hidden meaning graph"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON run config; flags override its fields");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--out", cfg.out, "Output directory (default: standard output)");
  app.add_option("--threads", cfg.threads, "Worker threads");
  app.add_flag("--allow-trivial", cfg.allow_trivial, "Skip the nontriviality gate");

  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--p-plus", cfg.params.p_plus, "Structural edge survival probability");
    sub->add_option("--p-minus", cfg.params.p_minus, "Spurious structural edge probability");
    sub->add_option("--eps-plus", cfg.params.eps_plus, "Similarity false-negative rate");
    sub->add_option("--eps-minus", cfg.params.eps_minus, "Similarity false-positive rate");
    sub->add_option("--lambda", cfg.params.lambda, "Replicas per meaning node");
    sub->add_flag("--fold", cfg.params.fold, "Fold eps- into the edge probabilities");
  };
  std::vector<CLI::Option*> graph_opts;
  auto add_graph = [&](CLI::App* sub) {
    graph_opts.push_back(sub->add_option("--er-n", cfg.graph.n, "Erdos-Renyi meaning graph size"));
    graph_opts.push_back(sub->add_option("--er-p", cfg.graph.p, "Erdos-Renyi edge probability"));
    graph_opts.push_back(sub->add_option("--graph-seed", cfg.graph.seed, "Erdos-Renyi seed"));
    graph_opts.push_back(sub->add_option("--triples", cfg.graph.path, "TSV triples file")->each([&](const std::string&) {
      cfg.graph.kind = "triples";
    }));
    graph_opts.push_back(sub->add_option("--prefix", cfg.graph.prefix, "Relation prefix filter"));
    graph_opts.push_back(sub->add_option("--edges", cfg.graph.path, "Edge-list file")->each([&](const std::string&) {
      cfg.graph.kind = "edges";
    }));
  };
  auto add_trials = [&](CLI::App* sub) {
    sub->add_option("--d", cfg.d, "Meaning distance");
    sub->add_option("--d-tilde", cfg.d_tilde, "Symbol search depth (default from regime)");
    sub->add_option("--trials", cfg.trials, "Number of trials");
  };

  auto* sample = app.add_subcommand("sample", "Sample a symbol graph");
  add_params(sample);
  add_graph(sample);
  sample->add_option("--d", cfg.d, "Distance used by the nontriviality gate");

  auto* gamma = app.add_subcommand("gamma", "Estimate the separator's gamma");
  add_params(gamma);
  add_graph(gamma);
  add_trials(gamma);
  gamma->add_option("--regime", cfg.regime, "possibility | impossibility");
  gamma->add_option("--replica", cfg.replica, "first | uniform");
  gamma->add_flag("--fixed-pairs", cfg.fixed_pairs, "Reuse one pair per hypothesis");

  auto* bounds = app.add_subcommand("bounds", "Closed-form bounds and theorem preconditions");
  add_params(bounds);
  add_graph(bounds);
  bounds->add_option("--n", cfg.n, "Meaning graph size");
  bounds->add_option("--d", cfg.d, "Meaning distance");
  bounds->add_option("--ball-d", cfg.ball_d, "B(d)");
  bounds->add_option("--ball-1", cfg.ball_1, "B(1)");
  bounds->add_option("--c2", cfg.c2, "Small-world constant");
  bounds->add_option("--c3", cfg.c3, "General impossibility constant");
  bounds->add_option("--format", cfg.format, "text | json");

  auto* heat = app.add_subcommand("heatmap", "Mean symbol distance over a p- grid");
  add_params(heat);
  add_graph(heat);
  heat->add_option("--p-minus-grid", cfg.p_minus_grid, "Comma-separated p- values")->delimiter(',');
  heat->add_option("--d-max", cfg.d_max, "Largest meaning distance column");
  heat->add_option("--pairs", cfg.pairs_per_cell, "Meaning pairs per cell");
  heat->add_option("--d", cfg.d, "Distance used by the nontriviality gate");

  auto* spectral = app.add_subcommand("spectral", "Coupled cut Laplacian trials");
  add_params(spectral);
  add_graph(spectral);
  add_trials(spectral);

  auto* ingest = app.add_subcommand("ingest", "Convert triples to an edge list");
  ingest->add_option("--triples", cfg.graph.path, "TSV triples file")->required();
  ingest->add_option("--prefix", cfg.graph.prefix, "Relation prefix filter");

  auto* check = app.add_subcommand("check", "Nontriviality report");
  add_params(check);
  add_graph(check);
  check->add_option("--d", cfg.d, "Meaning distance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitArgument;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  bool graph_given = false;
  for (const CLI::Option* o : graph_opts) graph_given = graph_given || o->count() > 0;

  try {
    if (!cfg.experiment.empty() && cfg.experiment != name) {
      throw ArgumentError("config experiment '" + cfg.experiment + "' does not match subcommand '" + name + "'");
    }
    if (name == "sample") impl::run_sample(cfg, out, err);
    else if (name == "gamma") impl::run_gamma(cfg, out, err);
    else if (name == "bounds") impl::run_bounds(cfg, graph_given, out);
    else if (name == "heatmap") impl::run_heatmap(cfg, out, err);
    else if (name == "spectral") impl::run_spectral(cfg, out, err);
    else if (name == "ingest") impl::run_ingest(cfg, out, err);
    else impl::run_check(cfg, out);
  } catch (const NoFixtureError& e) {
    err << "no fixture: " << e.what() << '\n';
    return kExitNoFixture;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgument;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitArgument;
  }
  return kExitOk;
}

}  // namespace symgraph::cli
