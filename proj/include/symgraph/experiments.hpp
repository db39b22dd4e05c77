#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "symgraph/errors.hpp"
#include "symgraph/format.hpp"
#include "symgraph/graph.hpp"
#include "symgraph/meaning_space.hpp"
#include "symgraph/parallel.hpp"
#include "symgraph/params.hpp"
#include "symgraph/random.hpp"
#include "symgraph/sampler.hpp"

namespace symgraph {

/// Mean symbol-graph distance per (p-, meaning distance) cell. Columns are
/// d = 1..d_max followed by DISCONNECTED (index d_max). A cell with no sampled
/// pair is EMPTY (std::nullopt).
struct HeatmapTable {
  std::vector<double> p_minus_grid;  // ascending
  std::size_t d_max = 0;
  std::size_t cap = 0;  // BFS cap; unreachable pairs count as cap
  std::size_t pairs_per_cell = 0;
  SampleParams params;  // base parameters (p_minus overridden per row)
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::vector<std::size_t>> samples;

  std::size_t rows() const noexcept { return p_minus_grid.size(); }
  std::size_t columns() const noexcept { return d_max + 1; }
  std::size_t disconnected_column() const noexcept { return d_max; }

  std::string column_label(std::size_t c) const {
    return c == d_max ? std::string("disconnected") : std::to_string(c + 1);
  }
};

/// BFS cap used for heat-map distances: 2·ceil(ln(λn)).
inline std::size_t heatmap_cap(std::size_t n, std::size_t lambda) {
  const double x = static_cast<double>(n) * static_cast<double>(lambda);
  return 2 * static_cast<std::size_t>(std::ceil(std::log(std::max(x, 2.0))));
}

/// For each p- in the grid, samples one symbol graph and averages the capped
/// distance between first replicas of `pairs_per_cell` meaning pairs per
/// column. The same meaning pairs are reused across rows.
inline HeatmapTable heatmap(const MeaningGraph& gm, std::vector<double> p_minus_grid, std::size_t d_max,
                            std::size_t pairs_per_cell, const SampleParams& params_base, std::uint64_t seed,
                            std::size_t threads = 1) {
  detail::require(d_max >= 1, "heatmap: d_max must be >= 1");
  detail::require(!p_minus_grid.empty(), "heatmap: empty p- grid");
  detail::require(pairs_per_cell >= 1, "heatmap: pairs_per_cell must be >= 1");
  params_base.validate();
  for (double p : p_minus_grid) detail::require_probability(p, "p_minus grid value");
  std::sort(p_minus_grid.begin(), p_minus_grid.end());

  HeatmapTable t;
  t.p_minus_grid = std::move(p_minus_grid);
  t.d_max = d_max;
  t.cap = heatmap_cap(gm.node_count(), params_base.lambda);
  t.pairs_per_cell = pairs_per_cell;
  t.params = params_base;
  t.cells.assign(t.rows(), std::vector<std::optional<double>>(t.columns()));
  t.samples.assign(t.rows(), std::vector<std::size_t>(t.columns(), 0));

  // Column fixtures, shared by every row.
  const PairSampler sampler(gm.graph);
  std::vector<std::vector<NodePair>> fixtures(t.columns());
  for (std::size_t c = 0; c < t.columns(); ++c) {
    Stream rng(derive_key(seed, "heatmap-pairs", c));
    for (std::size_t k = 0; k < pairs_per_cell; ++k) {
      auto pair = c == t.disconnected_column() ? sampler.disconnected(rng) : sampler.at_distance(c + 1, rng);
      if (!pair) break;  // NO_SUCH_PAIR: cell stays EMPTY
      fixtures[c].push_back(*pair);
    }
  }

  parallel_for(t.rows(), threads, [&](std::size_t r) {
    SampleParams p = params_base;
    p.p_minus = t.p_minus_grid[r];
    const SymbolGraph sg = sample_symbol_graph(gm, p, derive_key(seed, "heatmap-row", r));
    for (std::size_t c = 0; c < t.columns(); ++c) {
      if (fixtures[c].empty()) continue;
      double sum = 0.0;
      for (const NodePair& mp : fixtures[c]) {
        const Distance dist = bfs_distance(sg.graph(), sg.replica(mp.first), sg.replica(mp.second), t.cap);
        sum += static_cast<double>(dist ? *dist : t.cap);
      }
      t.samples[r][c] = fixtures[c].size();
      t.cells[r][c] = sum / static_cast<double>(fixtures[c].size());
    }
  });
  return t;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kHeatmapCsvHeader = "p_minus,d,mean_distance,samples";

/// Long format, one line per cell; EMPTY cells carry an empty mean.
inline void write_heatmap_csv(std::ostream& out, const HeatmapTable& t) {
  out << kHeatmapCsvHeader << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns(); ++c) {
      out << format_double(t.p_minus_grid[r]) << ',' << t.column_label(c) << ','
          << (t.cells[r][c] ? format_double(*t.cells[r][c]) : std::string()) << ',' << t.samples[r][c]
          << '\n';
    }
  }
}

/// Inverse of write_heatmap_csv for the grid, cells and sample counts.
inline HeatmapTable read_heatmap_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kHeatmapCsvHeader) {
    throw ParseError(source, line_no, "missing heat-map CSV header");
  }
  struct Row {
    double p;
    std::string d;
    std::optional<double> mean;
    std::size_t samples;
  };
  std::vector<Row> rows;
  std::size_t d_max = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 4) throw ParseError(source, line_no, "expected 4 fields");
    try {
      Row row{std::stod(f[0]), f[1], std::nullopt, std::stoull(f[3])};
      if (!f[2].empty()) row.mean = std::stod(f[2]);
      if (row.d != "disconnected") d_max = std::max<std::size_t>(d_max, std::stoull(row.d));
      rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "malformed number");
    }
  }
  HeatmapTable t;
  t.d_max = d_max;
  for (const Row& row : rows) {
    if (t.p_minus_grid.empty() || t.p_minus_grid.back() != row.p) t.p_minus_grid.push_back(row.p);
  }
  t.cells.assign(t.rows(), std::vector<std::optional<double>>(t.columns()));
  t.samples.assign(t.rows(), std::vector<std::size_t>(t.columns(), 0));
  for (const Row& row : rows) {
    const auto r = static_cast<std::size_t>(
        std::find(t.p_minus_grid.begin(), t.p_minus_grid.end(), row.p) - t.p_minus_grid.begin());
    const std::size_t c = row.d == "disconnected" ? d_max : std::stoull(row.d) - 1;
    t.cells[r][c] = row.mean;
    t.samples[r][c] = row.samples;
  }
  return t;
}

// ---------------------------------------------------------------------------
// SVG

/// Grayscale heat map: short distances dark, long distances light, scaled
/// linearly between the smallest and largest cell. Rows are drawn with the
/// largest p- on top. EMPTY cells are outlined and left unfilled.
inline void write_heatmap_svg(std::ostream& out, const HeatmapTable& t) {
  constexpr int kCell = 48, kLeft = 96, kTop = 40, kLegendGap = 24, kLegendWidth = 20;
  const int cols = static_cast<int>(t.columns()), rows = static_cast<int>(t.rows());
  const int grid_w = cols * kCell, grid_h = rows * kCell;
  const int width = kLeft + grid_w + kLegendGap + kLegendWidth + 64;
  const int height = kTop + grid_h + 56;

  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& row : t.cells) {
    for (const auto& v : row) {
      if (!v) continue;
      lo = any ? std::min(lo, *v) : *v;
      hi = any ? std::max(hi, *v) : *v;
      any = true;
    }
  }
  auto shade = [&](double v) {
    const double f = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    const int g = static_cast<int>(std::lround(255.0 * f));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
    return std::string(buf);
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
      << "<stop offset=\"0\" stop-color=\"#000000\"/><stop offset=\"1\" stop-color=\"#ffffff\"/>"
      << "</linearGradient></defs>\n";
  out << "<text x=\"" << kLeft << "\" y=\"16\">mean symbol distance (lambda=" << t.params.lambda
      << ", eps+=" << format_double(t.params.eps_plus) << ", cap=" << t.cap << ")</text>\n";

  for (int r = 0; r < rows; ++r) {
    const int y = kTop + (rows - 1 - r) * kCell;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4 << "\" text-anchor=\"end\">"
        << format_double(t.p_minus_grid[static_cast<std::size_t>(r)]) << "</text>\n";
    for (int c = 0; c < cols; ++c) {
      const auto& v = t.cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const int x = kLeft + c * kCell;
      out << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
          << kCell << '"';
      if (v) {
        out << " fill=\"" << shade(*v) << "\"><title>" << format_double(*v) << "</title></rect>\n";
      } else {
        out << " fill=\"none\" stroke=\"#cc0000\"><title>EMPTY</title></rect>\n";
      }
    }
  }
  for (int c = 0; c < cols; ++c) {
    out << "<text x=\"" << kLeft + c * kCell + kCell / 2 << "\" y=\"" << kTop + grid_h + 14
        << "\" text-anchor=\"middle\">" << (c == cols - 1 ? std::string("disc.") : std::to_string(c + 1))
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + grid_w / 2 << "\" y=\"" << kTop + grid_h + 32
      << "\" text-anchor=\"middle\">meaning distance d</text>\n";
  out << "<text x=\"12\" y=\"" << kTop + grid_h / 2 << "\" transform=\"rotate(-90 12 " << kTop + grid_h / 2
      << ")\" text-anchor=\"middle\">p-</text>\n";

  const int lx = kLeft + grid_w + kLegendGap;
  out << "<rect class=\"legend\" x=\"" << lx << "\" y=\"" << kTop << "\" width=\"" << kLegendWidth
      << "\" height=\"" << grid_h << "\" fill=\"url(#scale)\" stroke=\"#000000\"/>\n";
  out << "<text x=\"" << lx + kLegendWidth + 4 << "\" y=\"" << kTop + 10 << "\">" << format_double(hi)
      << "</text>\n";
  out << "<text x=\"" << lx + kLegendWidth + 4 << "\" y=\"" << kTop + grid_h << "\">" << format_double(lo)
      << "</text>\n";
  out << "</svg>\n";
}

namespace detail {
template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("write failed on " + path);
}
}  // namespace detail

inline void emit_csv(const HeatmapTable& t, const std::string& path) {
  detail::write_file(path, [&](std::ostream& o) { write_heatmap_csv(o, t); });
}

inline void emit_svg_heatmap(const HeatmapTable& t, const std::string& path) {
  detail::write_file(path, [&](std::ostream& o) { write_heatmap_svg(o, t); });
}

}  // namespace symgraph
