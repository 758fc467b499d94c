#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "tcim/bitvector.hpp"
#include "tcim/error.hpp"
#include "tcim/graph_io.hpp"

namespace tcim {

/// Slice length |S| and stored index width |D|, both in bits.
struct SliceConfig {
  std::uint32_t slice_length = 64;
  std::uint32_t index_width = 32;

  friend bool operator==(const SliceConfig&, const SliceConfig&) = default;
};

/// ceil(|V| / |S|): slices per row and per column.
inline std::uint64_t slices_per_line(std::size_t vertex_count, const SliceConfig& cfg) {
  return (vertex_count + cfg.slice_length - 1) / cfg.slice_length;
}

/// Smallest |D| that can address every slice ordinal of a |V|-vertex graph.
inline std::uint32_t required_index_width(std::size_t vertex_count, const SliceConfig& cfg) {
  const std::uint64_t slices = slices_per_line(vertex_count, cfg);
  return slices <= 1 ? 0U : static_cast<std::uint32_t>(std::bit_width(slices - 1));
}

inline void validate(const SliceConfig& cfg, std::size_t vertex_count) {
  if (cfg.slice_length == 0) throw ConfigError("slice length must be positive");
  if (cfg.index_width == 0 || cfg.index_width > 64) {
    throw ConfigError("index width must be in [1, 64] bits");
  }
  const std::uint32_t need = required_index_width(vertex_count, cfg);
  if (cfg.index_width < need) {
    throw ConfigError("index width " + std::to_string(cfg.index_width) + " cannot address " +
                      std::to_string(slices_per_line(vertex_count, cfg)) + " slices (need " +
                      std::to_string(need) + " bits)");
  }
}

/// One stored slice: its ordinal k within the row/column and |S| payload bits.
/// Payload bit t stands for matrix position k*|S| + t.
struct SliceView {
  std::uint64_t ordinal = 0;
  std::span<const Word> payload;
  std::uint32_t length = 0;

  bool test(std::size_t t) const { return (payload[t / kWordBits] >> (t % kWordBits)) & 1U; }
  std::size_t count() const { return popcount(payload); }
  BitVector bits() const {
    BitVector v(length);
    std::copy(payload.begin(), payload.end(), v.words().begin());
    return v;
  }
};

/// BitCount(AND(row slice, column slice)).
inline std::size_t and_popcount(const SliceView& a, const SliceView& b) {
  return and_popcount(a.payload, b.payload);
}

/// Valid slices of every row (or every column) of one side of the matrix,
/// packed into flat arrays. Slices of line i occupy slots
/// [first_slot(i), end_slot(i)), in strictly increasing ordinal.
class SliceStore {
 public:
  SliceStore() : offsets_(1, 0) {}

  /// `indices_of(line)` yields the ascending set-bit positions of that line.
  template <typename IndexSource>
  SliceStore(std::size_t lines, std::uint32_t slice_length, IndexSource&& indices_of)
      : slice_length_(slice_length), words_per_slice_(words_for_bits(slice_length)) {
    offsets_.reserve(lines + 1);
    offsets_.push_back(0);
    for (std::size_t line = 0; line < lines; ++line) {
      std::uint64_t open = ~std::uint64_t{0};
      for (auto t : indices_of(line)) {
        const std::uint64_t k = static_cast<std::uint64_t>(t) / slice_length;
        if (k != open) {
          ordinals_.push_back(k);
          words_.resize(words_.size() + words_per_slice_, 0);
          open = k;
        }
        const std::uint64_t bit = static_cast<std::uint64_t>(t) % slice_length;
        words_[words_.size() - words_per_slice_ + bit / kWordBits] |= Word{1} << (bit % kWordBits);
      }
      offsets_.push_back(ordinals_.size());
    }
  }

  std::size_t line_count() const noexcept { return offsets_.size() - 1; }
  std::size_t size() const noexcept { return ordinals_.size(); }
  std::uint32_t slice_length() const noexcept { return slice_length_; }

  std::size_t first_slot(std::size_t line) const { return offsets_[line]; }
  std::size_t end_slot(std::size_t line) const { return offsets_[line + 1]; }
  std::size_t slice_count(std::size_t line) const { return end_slot(line) - first_slot(line); }

  SliceView slot(std::size_t s) const {
    return {ordinals_[s],
            std::span<const Word>(words_).subspan(s * words_per_slice_, words_per_slice_),
            slice_length_};
  }

  /// The valid slices of one line, as a range of SliceView.
  auto line(std::size_t i) const {
    return std::views::iota(first_slot(i), end_slot(i)) |
           std::views::transform([this](std::size_t s) { return slot(s); });
  }

  std::size_t set_bit_count() const { return popcount(words_); }

 private:
  std::uint32_t slice_length_ = 0;
  std::size_t words_per_slice_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> ordinals_;
  std::vector<Word> words_;
};

/// Row-side and column-side valid slices of an oriented adjacency matrix.
struct CompressedGraph {
  SliceConfig config;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  SliceStore rows;
  SliceStore columns;

  auto row_slices(std::size_t i) const { return rows.line(i); }
  auto column_slices(std::size_t j) const { return columns.line(j); }
};

/// Keeps exactly the slices holding at least one set bit, per row and per column.
inline CompressedGraph compress(const OrientedAdjacency& adj, SliceConfig cfg = {}) {
  validate(cfg, adj.vertex_count());
  const std::size_t n = adj.vertex_count();
  return CompressedGraph{
      cfg, n, adj.edge_count(),
      SliceStore(n, cfg.slice_length, [&adj](std::size_t i) { return adj.row_indices(i); }),
      SliceStore(n, cfg.slice_length, [&adj](std::size_t j) { return adj.column_indices(j); })};
}

/// Rebuilds the oriented matrix from the row-side slices.
inline OrientedAdjacency decompress(const CompressedGraph& cg) {
  std::vector<Edge> edges;
  edges.reserve(cg.edge_count);
  const std::uint64_t s_len = cg.config.slice_length;
  for (std::size_t i = 0; i < cg.vertex_count; ++i) {
    for (const SliceView slice : cg.row_slices(i)) {
      for (std::size_t t = 0; t < slice.length; ++t) {
        if (slice.test(t)) {
          edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(slice.ordinal * s_len + t)});
        }
      }
    }
  }
  return orient(Graph(cg.vertex_count, std::move(edges)));
}

/// Calls f(row_slot, column_slot) for every ordinal k at which both R_iS_k and
/// C_jS_k are valid, in ascending k.
template <typename F>
void for_each_valid_slice_pair(const CompressedGraph& cg, std::size_t i, std::size_t j, F&& f) {
  std::size_t r = cg.rows.first_slot(i);
  const std::size_t r_end = cg.rows.end_slot(i);
  std::size_t c = cg.columns.first_slot(j);
  const std::size_t c_end = cg.columns.end_slot(j);
  while (r < r_end && c < c_end) {
    const std::uint64_t kr = cg.rows.slot(r).ordinal;
    const std::uint64_t kc = cg.columns.slot(c).ordinal;
    if (kr < kc) {
      ++r;
    } else if (kc < kr) {
      ++c;
    } else {
      f(r, c);
      ++r;
      ++c;
    }
  }
}

struct SlicePair {
  SliceView row;
  SliceView column;
};

/// Ordinal-matched intersection of row i's and column j's valid slices.
inline std::vector<SlicePair> valid_slice_pairs(const CompressedGraph& cg, std::size_t i,
                                                std::size_t j) {
  std::vector<SlicePair> pairs;
  for_each_valid_slice_pair(cg, i, j, [&](std::size_t r, std::size_t c) {
    pairs.push_back({cg.rows.slot(r), cg.columns.slot(c)});
  });
  return pairs;
}

/// (1 + |D|/|S|) * (1 - alpha^|S|).
inline double analytic_compression_rate(double alpha, const SliceConfig& cfg) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("sparsity must lie in [0, 1]");
  if (cfg.slice_length == 0) throw ConfigError("slice length must be positive");
  const double s = cfg.slice_length;
  return (1.0 + cfg.index_width / s) * (1.0 - std::pow(alpha, s));
}

/// Expected valid slices on one side of a |V|-vertex matrix with i.i.d. cells
/// of zero-probability alpha: (1 - alpha^|S|) * ceil(|V|/|S|) * |V|.
inline double expected_valid_slices(double alpha, std::size_t vertex_count, const SliceConfig& cfg) {
  return (1.0 - std::pow(alpha, static_cast<double>(cfg.slice_length))) *
         static_cast<double>(slices_per_line(vertex_count, cfg)) * static_cast<double>(vertex_count);
}

struct CompressionMetrics {
  double alpha = 1.0;
  double analytic_cr = 0.0;
  /// Row-side store size over the dense |V|^2-bit matrix size.
  double measured_cr = 0.0;
  std::uint64_t valid_slice_count = 0;
  /// Column-side store, reported for diagnostics only.
  std::uint64_t column_valid_slice_count = 0;
  std::uint64_t valid_pair_count = 0;
  /// Valid pairs over |E| * ceil(|V|/|S|).
  double valid_pair_ratio = 0.0;
};

inline CompressionMetrics measured_metrics(const CompressedGraph& cg) {
  CompressionMetrics m;
  m.valid_slice_count = cg.rows.size();
  m.column_valid_slice_count = cg.columns.size();
  if (cg.vertex_count == 0) return m;

  const double v = static_cast<double>(cg.vertex_count);
  m.alpha = 1.0 - static_cast<double>(cg.edge_count) / (v * v);
  m.analytic_cr = analytic_compression_rate(m.alpha, cg.config);
  m.measured_cr = static_cast<double>(m.valid_slice_count) *
                  (cg.config.index_width + cg.config.slice_length) / (v * v);

  for (std::size_t i = 0; i < cg.vertex_count; ++i) {
    for (const SliceView slice : cg.row_slices(i)) {
      for (std::size_t t = 0; t < slice.length; ++t) {
        if (!slice.test(t)) continue;
        const std::size_t j = slice.ordinal * cg.config.slice_length + t;
        for_each_valid_slice_pair(cg, i, j, [&m](std::size_t, std::size_t) { ++m.valid_pair_count; });
      }
    }
  }
  if (cg.edge_count > 0) {
    m.valid_pair_ratio =
        static_cast<double>(m.valid_pair_count) /
        (static_cast<double>(cg.edge_count) *
         static_cast<double>(slices_per_line(cg.vertex_count, cg.config)));
  }
  return m;
}

// On-disk layout, all integers little-endian:
//   u64 |V|, u64 |E|, u32 |S|, u32 |D|
//   per row: u64 slice count, then per slice ceil(|D|/8) ordinal bytes and
//   |S|/8 payload bytes, payload bit t at byte t/8, bit t%8.
namespace detail {

inline void put_le(std::ostream& out, std::uint64_t value, std::size_t bytes) {
  for (std::size_t b = 0; b < bytes; ++b) out.put(static_cast<char>((value >> (8 * b)) & 0xFF));
}

inline std::uint64_t get_le(std::istream& in, std::size_t bytes) {
  std::uint64_t value = 0;
  for (std::size_t b = 0; b < bytes; ++b) {
    const int c = in.get();
    if (c == std::istream::traits_type::eof()) throw ParseError("truncated compressed graph");
    value |= static_cast<std::uint64_t>(c) << (8 * b);
  }
  return value;
}

}  // namespace detail

inline void write_compressed(std::ostream& out, const CompressedGraph& cg) {
  if (cg.config.slice_length % 8 != 0) {
    throw ConfigError("on-disk format needs a slice length divisible by 8");
  }
  const std::size_t ordinal_bytes = (cg.config.index_width + 7) / 8;
  const std::size_t payload_bytes = cg.config.slice_length / 8;
  detail::put_le(out, cg.vertex_count, 8);
  detail::put_le(out, cg.edge_count, 8);
  detail::put_le(out, cg.config.slice_length, 4);
  detail::put_le(out, cg.config.index_width, 4);
  for (std::size_t i = 0; i < cg.vertex_count; ++i) {
    detail::put_le(out, cg.rows.slice_count(i), 8);
    for (const SliceView slice : cg.row_slices(i)) {
      detail::put_le(out, slice.ordinal, ordinal_bytes);
      for (std::size_t b = 0; b < payload_bytes; ++b) {
        out.put(static_cast<char>((slice.payload[b / 8] >> (8 * (b % 8))) & 0xFF));
      }
    }
  }
  if (!out) throw Error("write failure on compressed graph stream");
}

/// Reads the row-side records and rebuilds both sides. Rejects records that
/// break the stored-slice invariants.
inline CompressedGraph read_compressed(std::istream& in) {
  const std::uint64_t n = detail::get_le(in, 8);
  const std::uint64_t declared_edges = detail::get_le(in, 8);
  SliceConfig cfg;
  cfg.slice_length = static_cast<std::uint32_t>(detail::get_le(in, 4));
  cfg.index_width = static_cast<std::uint32_t>(detail::get_le(in, 4));
  if (cfg.slice_length == 0 || cfg.slice_length % 8 != 0) {
    throw ParseError("slice length in header must be a positive multiple of 8");
  }
  if (n > std::numeric_limits<VertexId>::max()) throw ParseError("vertex count out of range");
  validate(cfg, n);
  const std::size_t ordinal_bytes = (cfg.index_width + 7) / 8;
  const std::size_t payload_bytes = cfg.slice_length / 8;
  const std::uint64_t per_line = slices_per_line(n, cfg);

  std::vector<Edge> edges;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t count = detail::get_le(in, 8);
    if (count > per_line) throw ParseError("row " + std::to_string(i) + " has too many slices");
    std::uint64_t previous = 0;
    for (std::uint64_t s = 0; s < count; ++s) {
      const std::uint64_t k = detail::get_le(in, ordinal_bytes);
      if (k >= per_line || (s > 0 && k <= previous)) {
        throw ParseError("row " + std::to_string(i) + " has an out-of-order slice ordinal");
      }
      previous = k;
      bool any = false;
      for (std::size_t b = 0; b < payload_bytes; ++b) {
        const std::uint64_t byte = detail::get_le(in, 1);
        for (std::size_t bit = 0; bit < 8; ++bit) {
          if (((byte >> bit) & 1U) == 0) continue;
          const std::uint64_t j = k * cfg.slice_length + b * 8 + bit;
          if (j >= n || j <= i) {
            throw ParseError("row " + std::to_string(i) + " sets a bit outside the upper triangle");
          }
          edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j)});
          any = true;
        }
      }
      if (!any) throw ParseError("row " + std::to_string(i) + " stores an all-zero slice");
    }
  }
  if (edges.size() != declared_edges) throw ParseError("edge count does not match header");
  return compress(orient(Graph(n, std::move(edges))), cfg);
}

}  // namespace tcim
