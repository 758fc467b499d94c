#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "tcim/graph_io.hpp"

namespace tcim {

/// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
/// Unlike std::uniform_real_distribution the sequence is identical across
/// standard library implementations, so seeded graphs can be pinned in tests.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Erdős–Rényi G(n, p): each of the n(n-1)/2 pairs i < j, visited in
/// lexicographic order, is an edge with probability p.
inline Graph gnp_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit_draw(rng) < p) edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j)});
    }
  }
  return Graph(n, std::move(edges));
}

/// Complete graph K_n.
inline Graph complete_graph(std::size_t n) { return gnp_graph(n, 1.0, 0); }

/// Same graph with vertex v renamed to perm[v], perm drawn from `seed`.
inline Graph relabel_randomly(const Graph& g, std::uint64_t seed) {
  std::vector<VertexId> perm(g.vertex_count());
  std::iota(perm.begin(), perm.end(), VertexId{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with unit_draw keeps the permutation portable.
  for (std::size_t i = perm.size(); i > 1; --i) {
    const auto k = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(i));
    std::swap(perm[i - 1], perm[k]);
  }
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (Edge e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  return Graph(g.vertex_count(), std::move(edges));
}

}  // namespace tcim
