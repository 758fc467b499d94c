#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <thread>
#include <vector>

#include "tcim/bitvector.hpp"
#include "tcim/error.hpp"
#include "tcim/graph_io.hpp"

namespace tcim {

using TriangleCount = std::uint64_t;

struct KernelOptions {
  /// Worker threads for the edge loop; results are identical for any value.
  unsigned threads = 1;
};

namespace detail {

// Scratch bit-vector that remembers which bits it set so it can be cleared in
// O(degree) instead of O(|V|/64).
class ScratchBits {
 public:
  explicit ScratchBits(std::size_t bits) : bits_(bits) {}

  void load(std::span<const VertexId> indices) {
    for (VertexId t : indices) bits_.set(t);
    loaded_ = indices;
  }
  void unload() {
    for (VertexId t : loaded_) bits_.reset(t);
    loaded_ = {};
  }
  std::span<const Word> words() const { return bits_.words(); }

 private:
  BitVector bits_;
  std::span<const VertexId> loaded_;
};

// Sum over the oriented edges of rows [first, last) stepping by `stride`.
inline TriangleCount bitwise_rows(const OrientedAdjacency& adj, std::size_t first,
                                  std::size_t stride) {
  const std::size_t n = adj.vertex_count();
  ScratchBits row(n);
  ScratchBits col(n);
  TriangleCount total = 0;
  for (std::size_t i = first; i < n; i += stride) {
    const auto targets = adj.row_indices(i);
    if (targets.empty()) continue;
    row.load(targets);
    for (VertexId j : targets) {
      col.load(adj.column_indices(j));
      // R_i has no bits at or below i and C_j none at or above j, so the AND
      // is zero outside the words covering (i, j).
      const std::size_t lo = (i + 1) / kWordBits;
      const std::size_t hi = j / kWordBits + 1;
      total += and_popcount(row.words().subspan(lo, hi - lo), col.words().subspan(lo, hi - lo));
      col.unload();
    }
    row.unload();
  }
  return total;
}

}  // namespace detail

/// Triangle count as the sum, over every set bit A[i][j], of
/// BitCount(AND(R_i, C_j)). Each triangle i < k < j is counted once, through
/// its middle vertex k.
inline TriangleCount count_triangles_bitwise(const OrientedAdjacency& adj,
                                             KernelOptions options = {}) {
  const unsigned threads = std::max(1U, options.threads);
  if (threads == 1) return detail::bitwise_rows(adj, 0, 1);

  std::vector<TriangleCount> partial(threads, 0);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&adj, &partial, t, threads] {
        partial[t] = detail::bitwise_rows(adj, t, threads);
      });
    }
  }
  TriangleCount total = 0;
  for (TriangleCount p : partial) total += p;
  return total;
}

/// Set-intersection count over sorted neighbor lists. Shares no code with the
/// bitwise path.
inline TriangleCount count_triangles_oracle(const Graph& g) {
  const auto adj = g.adjacency_lists();
  TriangleCount common_total = 0;
  for (Edge e : g.edges()) {
    const auto& a = adj[e.u];
    const auto& b = adj[e.v];
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++common_total;
        ++ia;
        ++ib;
      }
    }
  }
  // Each triangle is seen from each of its three edges.
  return common_total / 3;
}

inline constexpr std::size_t kTraceOracleMaxVertices = 2048;

/// trace(A^3) / 6 on the full symmetric 0/1 matrix. Dense and cubic, so
/// refused above kTraceOracleMaxVertices.
inline TriangleCount count_triangles_trace(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n > kTraceOracleMaxVertices) {
    throw CapacityError("trace oracle limited to " + std::to_string(kTraceOracleMaxVertices) +
                        " vertices, graph has " + std::to_string(n));
  }
  std::vector<std::uint8_t> a(n * n, 0);
  for (Edge e : g.edges()) {
    a[e.u * n + e.v] = 1;
    a[e.v * n + e.u] = 1;
  }
  // trace(A^3) = sum_i sum_j (A^2)[i][j] * A[j][i], one row of A^2 at a time.
  std::vector<std::uint64_t> square_row(n);
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(square_row.begin(), square_row.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i * n + k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) square_row[j] += a[k * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) trace += square_row[j] * a[j * n + i];
  }
  return trace / 6;
}

}  // namespace tcim
