#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tcim/error.hpp"
#include "tcim/generators.hpp"
#include "tcim/graph_io.hpp"
#include "tcim/pim_sim.hpp"
#include "tcim/report_json.hpp"
#include "tcim/slicing.hpp"
#include "tcim/tc_kernel.hpp"

namespace tcim {

enum class Engine { kBitwise, kOracle, kTrace };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::kBitwise: return "bitwise";
    case Engine::kOracle: return "oracle";
    case Engine::kTrace: return "trace";
  }
  return "bitwise";
}
inline Engine parse_engine(std::string_view s) {
  if (s == "bitwise") return Engine::kBitwise;
  if (s == "oracle") return Engine::kOracle;
  if (s == "trace") return Engine::kTrace;
  throw ConfigError("unknown engine '" + std::string(s) + "'");
}

struct GnpSpec {
  std::size_t vertices = 0;
  double probability = 0.0;

  friend bool operator==(const GnpSpec&, const GnpSpec&) = default;
};

/// Everything that determines a run's counters. Echoed into every report.
struct RunSpec {
  std::string command;
  std::string input;
  std::optional<GnpSpec> gnp;
  std::uint64_t seed = 1;
  std::vector<std::uint32_t> slice_lengths{64};
  std::uint32_t index_width = 32;
  /// Column-slice capacities; empty means the 8 MB preset.
  std::vector<std::uint64_t> capacities;
  ReplacementPolicy policy = ReplacementPolicy::kPriority;
  RowOrder order = RowOrder::kSequential;
  Engine engine = Engine::kBitwise;
  CostConfig cost;
  unsigned threads = 1;
};

inline void to_json(nlohmann::json& j, const RunSpec& s) {
  nlohmann::json caps = nlohmann::json::array();
  for (std::uint64_t c : s.capacities) caps.push_back(capacity_to_json(c));
  j = {{"command", s.command},
       {"input", s.input},
       {"gnp", s.gnp ? nlohmann::json{{"vertices", s.gnp->vertices}, {"probability", s.gnp->probability}}
                     : nlohmann::json(nullptr)},
       {"seed", s.seed},
       {"slice_lengths", s.slice_lengths},
       {"index_width", s.index_width},
       {"capacities", caps},
       {"policy", to_string(s.policy)},
       {"order", to_string(s.order)},
       {"engine", to_string(s.engine)},
       {"cost", s.cost}};
}

inline void from_json(const nlohmann::json& j, RunSpec& s) {
  j.at("command").get_to(s.command);
  j.at("input").get_to(s.input);
  if (const auto& g = j.at("gnp"); !g.is_null()) {
    s.gnp = GnpSpec{g.at("vertices").get<std::size_t>(), g.at("probability").get<double>()};
  } else {
    s.gnp.reset();
  }
  j.at("seed").get_to(s.seed);
  j.at("slice_lengths").get_to(s.slice_lengths);
  j.at("index_width").get_to(s.index_width);
  s.capacities.clear();
  for (const auto& c : j.at("capacities")) s.capacities.push_back(capacity_from_json(c));
  s.policy = parse_policy(j.at("policy").get<std::string>());
  s.order = parse_row_order(j.at("order").get<std::string>());
  s.engine = parse_engine(j.at("engine").get<std::string>());
  j.at("cost").get_to(s.cost);
}

/// Checks command-specific requirements and fills defaults that depend on
/// other fields (the 8 MB capacity preset). Throws ConfigError.
inline RunSpec resolve(RunSpec s) {
  static const std::vector<std::string> commands{"count", "compress-stats", "simulate",
                                                 "compare-policies"};
  if (std::find(commands.begin(), commands.end(), s.command) == commands.end()) {
    throw ConfigError("unknown command '" + s.command + "'");
  }
  if (s.input.empty() == !s.gnp.has_value()) {
    throw ConfigError("exactly one of an input file or a synthetic G(n,p) graph is required");
  }
  if (s.gnp && !(s.gnp->probability >= 0.0 && s.gnp->probability <= 1.0)) {
    throw ConfigError("G(n,p) probability must lie in [0, 1]");
  }
  if (s.slice_lengths.empty()) throw ConfigError("at least one slice length is required");
  for (std::uint32_t len : s.slice_lengths) {
    if (len == 0) throw ConfigError("slice length must be positive");
  }
  if (s.index_width == 0) throw ConfigError("index width must be positive");
  if (s.threads == 0) throw ConfigError("thread count must be positive");
  const bool simulates = s.command == "simulate" || s.command == "compare-policies";
  if (simulates) {
    if (s.command == "simulate" && s.slice_lengths.size() != 1) {
      throw ConfigError("simulate takes a single slice length");
    }
    if (s.command == "simulate" && s.capacities.size() > 1) {
      throw ConfigError("simulate takes a single capacity");
    }
    for (std::uint64_t c : s.capacities) {
      if (c == 0) throw ConfigError("capacity must be at least one slice");
    }
    if (s.capacities.empty()) {
      s.capacities.push_back(capacity_preset_8mb({s.slice_lengths.front(), s.index_width}));
    }
  }
  return s;
}

inline Graph load_input(const RunSpec& s) {
  if (s.gnp) return gnp_graph(s.gnp->vertices, s.gnp->probability, s.seed);
  return load_edge_list(s.input);
}

namespace detail {

inline nlohmann::json graph_summary(const Graph& g) {
  return {{"vertices", g.vertex_count()},
          {"edges", g.edge_count()},
          {"self_loops_dropped", g.self_loops_dropped()},
          {"duplicates_dropped", g.duplicates_dropped()}};
}

inline nlohmann::json report_shell(const RunSpec& s, const Graph& g) {
  nlohmann::json config = s;
  return {{"provenance", provenance(config)}, {"config", config}, {"graph", graph_summary(g)}};
}

inline std::string percent(double ratio, int digits = 5) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << ratio * 100.0 << '%';
  return os.str();
}

}  // namespace detail

/// |V|, |E|, triangle count and wall time with the selected engine.
inline nlohmann::json cmd_count(const RunSpec& spec, std::ostream& out) {
  const RunSpec s = resolve(spec);
  const Graph g = load_input(s);
  const auto start = std::chrono::steady_clock::now();
  TriangleCount triangles = 0;
  switch (s.engine) {
    case Engine::kBitwise: triangles = count_triangles_bitwise(orient(g), {s.threads}); break;
    case Engine::kOracle: triangles = count_triangles_oracle(g); break;
    case Engine::kTrace: triangles = count_triangles_trace(g); break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json report = detail::report_shell(s, g);
  report["result"] = {{"engine", to_string(s.engine)}, {"triangles", triangles}};
  report["timing"] = {{"wall_seconds", seconds}};

  out << "vertices   " << g.vertex_count() << '\n'
      << "edges      " << g.edge_count() << '\n'
      << "triangles  " << triangles << '\n'
      << "engine     " << to_string(s.engine) << '\n'
      << "wall time  " << std::fixed << std::setprecision(3) << seconds << " s\n";
  return report;
}

/// Sparsity, analytic and measured compression rate, valid slices and valid
/// pair ratio for every requested slice length.
inline nlohmann::json cmd_compress_stats(const RunSpec& spec, std::ostream& out) {
  const RunSpec s = resolve(spec);
  const Graph g = load_input(s);
  const OrientedAdjacency adj = orient(g);
  nlohmann::json report = detail::report_shell(s, g);
  nlohmann::json rows = nlohmann::json::array();

  out << std::left << std::setw(8) << "|S|" << std::setw(6) << "|D|" << std::setw(14) << "alpha"
      << std::setw(14) << "analytic CR" << std::setw(14) << "measured CR" << std::setw(12) << "N_VS"
      << "VSR\n";
  for (std::uint32_t len : s.slice_lengths) {
    const SliceConfig cfg{len, s.index_width};
    const CompressionMetrics m = measured_metrics(compress(adj, cfg));
    nlohmann::json row = m;
    row["slice_length"] = len;
    row["index_width"] = s.index_width;
    rows.push_back(row);
    out << std::left << std::setw(8) << len << std::setw(6) << s.index_width << std::setw(14)
        << detail::percent(m.alpha) << std::setw(14) << detail::percent(m.analytic_cr, 3)
        << std::setw(14) << detail::percent(m.measured_cr, 3) << std::setw(12)
        << m.valid_slice_count << detail::percent(m.valid_pair_ratio, 3) << '\n';
  }
  report["result"] = {{"metrics", rows}};
  return report;
}

inline void print_sim_row(std::ostream& out, std::string_view label, std::uint64_t capacity,
                          const SimReport& r) {
  out << std::left << std::setw(10) << label << std::setw(12)
      << (capacity == kUnboundedCapacity ? std::string("inf") : std::to_string(capacity))
      << std::setw(12) << r.column_loads_requested << std::setw(12) << r.hits << std::setw(12)
      << r.misses << std::setw(14) << r.replacements << std::setw(12) << r.row_writes
      << std::setw(12) << detail::percent(r.hit_ratio, 2) << r.triangles << '\n';
}

inline void print_sim_header(std::ostream& out) {
  out << std::left << std::setw(10) << "policy" << std::setw(12) << "capacity" << std::setw(12)
      << "loads" << std::setw(12) << "hits" << std::setw(12) << "misses" << std::setw(14)
      << "replacements" << std::setw(12) << "row writes" << std::setw(12) << "hit ratio"
      << "triangles\n";
}

/// One simulation run; counters plus a cost estimate from the cost model.
inline nlohmann::json cmd_simulate(const RunSpec& spec, std::ostream& out) {
  const RunSpec s = resolve(spec);
  const Graph g = load_input(s);
  const CompressedGraph cg = compress(orient(g), {s.slice_lengths.front(), s.index_width});
  const SimConfig config{s.policy, s.capacities.front(), s.order, s.cost};
  const SimReport r = simulate(cg, config);

  nlohmann::json report = detail::report_shell(s, g);
  report["result"] = {{"sim_config", config}, {"report", r}};
  print_sim_header(out);
  print_sim_row(out, to_string(s.policy), config.capacity_slices, r);
  out << "cost estimate (" << s.cost.source << "): latency " << r.total_latency << " ns, energy "
      << r.total_energy << " pJ\n";
  return report;
}

/// LRU and PRIORITY on the same trace for every capacity.
inline nlohmann::json cmd_compare_policies(const RunSpec& spec, std::ostream& out) {
  const RunSpec s = resolve(spec);
  const Graph g = load_input(s);
  nlohmann::json report = detail::report_shell(s, g);
  nlohmann::json rows = nlohmann::json::array();
  print_sim_header(out);
  for (std::uint32_t len : s.slice_lengths) {
    const CompressedGraph cg = compress(orient(g), {len, s.index_width});
    const AccessTrace trace = build_access_trace(cg, s.order);
    for (std::uint64_t capacity : s.capacities) {
      const SimReport lru = simulate(cg, trace, {ReplacementPolicy::kLru, capacity, s.order, s.cost});
      const SimReport pri =
          simulate(cg, trace, {ReplacementPolicy::kPriority, capacity, s.order, s.cost});
      const double reduction =
          lru.replacements == 0
              ? 0.0
              : (static_cast<double>(lru.replacements) - static_cast<double>(pri.replacements)) /
                    static_cast<double>(lru.replacements);
      rows.push_back({{"slice_length", len},
                      {"capacity_slices", capacity_to_json(capacity)},
                      {"lru", lru},
                      {"priority", pri},
                      {"replacement_reduction", reduction}});
      print_sim_row(out, "lru", capacity, lru);
      print_sim_row(out, "priority", capacity, pri);
      out << "  |S|=" << len << " replacement reduction " << detail::percent(reduction, 2) << '\n';
    }
  }
  report["result"] = {{"comparisons", rows}};
  return report;
}

inline nlohmann::json run_command(const RunSpec& spec, std::ostream& out) {
  if (spec.command == "count") return cmd_count(spec, out);
  if (spec.command == "compress-stats") return cmd_compress_stats(spec, out);
  if (spec.command == "simulate") return cmd_simulate(spec, out);
  if (spec.command == "compare-policies") return cmd_compare_policies(spec, out);
  throw ConfigError("unknown command '" + spec.command + "'");
}

}  // namespace tcim
