#pragma once

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcim/bitvector.hpp"
#include "tcim/error.hpp"

namespace tcim {

using VertexId = std::uint32_t;

/// Undirected edge stored with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on dense ids [0, vertex_count).
///
/// Construction normalizes the edge list: endpoints are ordered, self-loops and
/// duplicates are dropped. Endpoints outside the vertex range are rejected.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t vertex_count, std::vector<Edge> edges,
        std::vector<std::uint64_t> original_ids = {})
      : vertex_count_(vertex_count), original_ids_(std::move(original_ids)) {
    if (vertex_count > std::numeric_limits<VertexId>::max()) {
      throw CapacityError("vertex count exceeds 32-bit id range");
    }
    if (!original_ids_.empty() && original_ids_.size() != vertex_count) {
      throw DomainError("original id map size differs from vertex count");
    }
    std::size_t kept = 0;
    for (Edge e : edges) {
      if (e.u >= vertex_count || e.v >= vertex_count) {
        throw DomainError("edge endpoint " + std::to_string(std::max(e.u, e.v)) +
                          " outside vertex range " + std::to_string(vertex_count));
      }
      if (e.u == e.v) {
        ++self_loops_dropped_;
        continue;
      }
      if (e.u > e.v) std::swap(e.u, e.v);
      edges[kept++] = e;
    }
    edges.resize(kept);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    duplicates_dropped_ = kept - edges.size();
    edges_ = std::move(edges);
  }

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Id in the source file for dense id v (identity when no map was recorded).
  std::uint64_t original_id(VertexId v) const {
    return original_ids_.empty() ? v : original_ids_.at(v);
  }
  std::span<const std::uint64_t> original_ids() const noexcept { return original_ids_; }

  std::size_t self_loops_dropped() const noexcept { return self_loops_dropped_; }
  std::size_t duplicates_dropped() const noexcept { return duplicates_dropped_; }

  /// Sorted neighbor lists of the undirected graph.
  std::vector<std::vector<VertexId>> adjacency_lists() const {
    std::vector<std::vector<VertexId>> adj(vertex_count_);
    for (Edge e : edges_) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
  }

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> original_ids_;
  std::size_t self_loops_dropped_ = 0;
  std::size_t duplicates_dropped_ = 0;
};

/// Strictly upper-triangular adjacency matrix: bit (i, j) set iff {i, j} is an
/// edge and i < j. Row R_i = A[i][*], column C_j = A[*][j].
///
/// Rows and columns are held as sorted index lists; dense bit-vectors of length
/// |V| are produced on request. A dense |V|^2 matrix does not fit in memory for
/// the million-vertex road networks.
class OrientedAdjacency {
 public:
  OrientedAdjacency() : row_offsets_(1, 0), col_offsets_(1, 0) {}

  explicit OrientedAdjacency(const Graph& g)
      : vertex_count_(g.vertex_count()),
        row_offsets_(g.vertex_count() + 1, 0),
        col_offsets_(g.vertex_count() + 1, 0) {
    const auto edges = g.edges();
    for (Edge e : edges) {
      ++row_offsets_[e.u + 1];
      ++col_offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < vertex_count_; ++i) {
      row_offsets_[i + 1] += row_offsets_[i];
      col_offsets_[i + 1] += col_offsets_[i];
    }
    row_targets_.resize(edges.size());
    col_sources_.resize(edges.size());
    std::vector<std::size_t> row_fill(row_offsets_.begin(), row_offsets_.end() - 1);
    std::vector<std::size_t> col_fill(col_offsets_.begin(), col_offsets_.end() - 1);
    // Edges are sorted by (u, v), so both fills come out ascending.
    for (Edge e : edges) {
      row_targets_[row_fill[e.u]++] = e.v;
      col_sources_[col_fill[e.v]++] = e.u;
    }
  }

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return row_targets_.size(); }

  /// Columns j > i with bit (i, j) set, ascending.
  std::span<const VertexId> row_indices(std::size_t i) const {
    return std::span<const VertexId>(row_targets_).subspan(row_offsets_[i],
                                                           row_offsets_[i + 1] - row_offsets_[i]);
  }
  /// Rows i < j with bit (i, j) set, ascending.
  std::span<const VertexId> column_indices(std::size_t j) const {
    return std::span<const VertexId>(col_sources_).subspan(col_offsets_[j],
                                                           col_offsets_[j + 1] - col_offsets_[j]);
  }

  bool test(std::size_t i, std::size_t j) const {
    const auto row = row_indices(i);
    return std::binary_search(row.begin(), row.end(), static_cast<VertexId>(j));
  }

  BitVector row(std::size_t i) const { return materialize(row_indices(i)); }
  BitVector column(std::size_t j) const { return materialize(column_indices(j)); }

  Graph to_graph() const {
    std::vector<Edge> edges;
    edges.reserve(edge_count());
    for (std::size_t i = 0; i < vertex_count_; ++i) {
      for (VertexId j : row_indices(i)) edges.push_back({static_cast<VertexId>(i), j});
    }
    return Graph(vertex_count_, std::move(edges));
  }

  friend bool operator==(const OrientedAdjacency&, const OrientedAdjacency&) = default;

 private:
  BitVector materialize(std::span<const VertexId> indices) const {
    BitVector v(vertex_count_);
    for (VertexId t : indices) v.set(t);
    return v;
  }

  std::size_t vertex_count_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<VertexId> row_targets_;
  std::vector<std::size_t> col_offsets_;
  std::vector<VertexId> col_sources_;
};

inline OrientedAdjacency orient(const Graph& g) { return OrientedAdjacency(g); }

/// Sparsity 1 - |E| / |V|^2, with |E| the undirected edge count.
inline double sparsity(const Graph& g) {
  if (g.vertex_count() == 0) throw DomainError("sparsity is undefined for an empty vertex set");
  const double v = static_cast<double>(g.vertex_count());
  return 1.0 - static_cast<double>(g.edge_count()) / (v * v);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::uint64_t parse_vertex_token(std::string_view token, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("expected a non-negative integer vertex id, got '" + std::string(token) + "'",
                     line_no);
  }
  return value;
}

inline std::string read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw ParseError("cannot open " + path.string());
  std::string out;
  char buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) out.append(buffer, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(file);
  if (failed) throw ParseError("corrupt gzip stream in " + path.string());
  return out;
}

}  // namespace detail

/// Reads a SNAP-style edge list: two whitespace-separated non-negative integers
/// per line, '#' starts a comment line. Ids are remapped to a dense range in
/// ascending order of their original value; every id that appears on a line is
/// a vertex, even when its only line is a self-loop.
inline Graph parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = detail::trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    std::uint64_t ids[2];
    for (int t = 0; t < 2; ++t) {
      const auto end = rest.find_first_of(" \t");
      if (rest.empty()) throw ParseError("expected two vertex ids", line_no);
      ids[t] = detail::parse_vertex_token(rest.substr(0, end), line_no);
      rest = end == std::string_view::npos ? std::string_view{} : detail::trim(rest.substr(end));
    }
    if (!rest.empty()) throw ParseError("unexpected trailing token '" + std::string(rest) + "'", line_no);
    raw.emplace_back(ids[0], ids[1]);
  }
  if (in.bad()) throw ParseError("read failure");

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (auto [a, b] : raw) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > std::numeric_limits<VertexId>::max()) throw CapacityError("too many vertices");

  auto dense = [&ids](std::uint64_t id) {
    return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (auto [a, b] : raw) edges.push_back({dense(a), dense(b)});
  raw.clear();
  raw.shrink_to_fit();
  const std::size_t n = ids.size();
  return Graph(n, std::move(edges), std::move(ids));
}

/// Loads an edge list file; files ending in ".gz" are decompressed on the fly.
inline Graph load_edge_list(const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    std::istringstream in(detail::read_gzip(path));
    return parse_edge_list(in);
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_edge_list(in);
}

/// Writes g with dense ids, one edge per line. Vertices without edges are
/// written as self-loop lines so that a reload keeps the vertex count.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# Nodes: " << g.vertex_count() << " Edges: " << g.edge_count() << '\n';
  std::vector<bool> touched(g.vertex_count(), false);
  for (Edge e : g.edges()) {
    out << e.u << '\t' << e.v << '\n';
    touched[e.u] = touched[e.v] = true;
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (!touched[v]) out << v << '\t' << v << '\n';
  }
}

}  // namespace tcim
