#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tcim/error.hpp"
#include "tcim/graph_io.hpp"
#include "tcim/slicing.hpp"
#include "tcim/tc_kernel.hpp"

namespace tcim {

enum class ReplacementPolicy { kLru, kPriority };
enum class RowOrder { kSequential, kZigzag };

inline std::string_view to_string(ReplacementPolicy p) {
  return p == ReplacementPolicy::kLru ? "lru" : "priority";
}
inline std::string_view to_string(RowOrder o) {
  return o == RowOrder::kSequential ? "sequential" : "zigzag";
}
inline ReplacementPolicy parse_policy(std::string_view s) {
  if (s == "lru") return ReplacementPolicy::kLru;
  if (s == "priority") return ReplacementPolicy::kPriority;
  throw ConfigError("unknown replacement policy '" + std::string(s) + "'");
}
inline RowOrder parse_row_order(std::string_view s) {
  if (s == "sequential") return RowOrder::kSequential;
  if (s == "zigzag") return RowOrder::kZigzag;
  throw ConfigError("unknown row order '" + std::string(s) + "'");
}

/// One COMPUTE(RowSlice, ColumnSlice) step. Slots index the row-side and
/// column-side slice stores of the CompressedGraph the trace was built from;
/// a column slot identifies the column slice (j, k) and orders like it.
struct Task {
  VertexId row = 0;
  VertexId column = 0;
  std::uint64_t ordinal = 0;
  std::size_t row_slot = 0;
  std::size_t column_slot = 0;

  friend bool operator==(const Task&, const Task&) = default;
};

using AccessTrace = std::vector<Task>;

/// Rows are visited in index order. SEQUENTIAL walks every row's set bits
/// left to right; ZIGZAG alternates direction on successive non-empty rows,
/// starting left to right. Each edge expands to its valid slice pairs in
/// ascending ordinal.
inline AccessTrace build_access_trace(const CompressedGraph& cg,
                                      RowOrder order = RowOrder::kSequential) {
  AccessTrace trace;
  std::vector<VertexId> targets;
  bool descending = false;
  for (std::size_t i = 0; i < cg.vertex_count; ++i) {
    targets.clear();
    for (const SliceView slice : cg.row_slices(i)) {
      for (std::size_t t = 0; t < slice.length; ++t) {
        if (slice.test(t)) {
          targets.push_back(static_cast<VertexId>(slice.ordinal * cg.config.slice_length + t));
        }
      }
    }
    if (targets.empty()) continue;
    if (descending) std::reverse(targets.begin(), targets.end());
    for (VertexId j : targets) {
      for_each_valid_slice_pair(cg, i, j, [&](std::size_t r, std::size_t c) {
        trace.push_back({static_cast<VertexId>(i), j, cg.rows.slot(r).ordinal, r, c});
      });
    }
    if (order == RowOrder::kZigzag) descending = !descending;
  }
  return trace;
}

inline constexpr std::uint64_t kUnboundedCapacity = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kNeverUsed = std::numeric_limits<std::uint64_t>::max();

/// Slices of |S| bits that fit into `bytes` of array.
inline std::uint64_t capacity_slices_from_bytes(std::uint64_t bytes, const SliceConfig& cfg) {
  const std::uint64_t slices = bytes * 8 / cfg.slice_length;
  if (slices == 0) throw ConfigError("array of " + std::to_string(bytes) + " bytes holds no slice");
  return slices;
}

inline constexpr std::uint64_t kMebibyte = 1ULL << 20;

/// 8 MB and 16 MB computational arrays.
inline std::uint64_t capacity_preset_8mb(const SliceConfig& cfg = {}) {
  return capacity_slices_from_bytes(8 * kMebibyte, cfg);
}
inline std::uint64_t capacity_preset_16mb(const SliceConfig& cfg = {}) {
  return capacity_slices_from_bytes(16 * kMebibyte, cfg);
}

/// For each trace position, the next position touching the same column
/// slice, or kNeverUsed.
inline std::vector<std::uint64_t> next_use_positions(const AccessTrace& trace) {
  std::vector<std::uint64_t> next(trace.size(), kNeverUsed);
  std::unordered_map<std::size_t, std::uint64_t> seen;
  for (std::size_t t = trace.size(); t-- > 0;) {
    auto [it, inserted] = seen.try_emplace(trace[t].column_slot, t);
    if (!inserted) {
      next[t] = it->second;
      it->second = t;
    }
  }
  return next;
}

/// Resident column slices under least-recently-used replacement.
class LruResidency {
 public:
  bool contains(std::size_t id) const { return where_.contains(id); }
  std::size_t size() const noexcept { return order_.size(); }

  void on_hit(std::size_t id, std::uint64_t /*next_use*/) {
    order_.splice(order_.end(), order_, where_.at(id));
  }
  void on_insert(std::size_t id, std::uint64_t /*next_use*/) {
    order_.push_back(id);
    where_[id] = std::prev(order_.end());
  }
  /// Removes and returns the slice with the oldest last access.
  std::size_t evict() {
    if (order_.empty()) throw InternalError("LRU eviction from an empty array");
    const std::size_t victim = order_.front();
    order_.pop_front();
    where_.erase(victim);
    return victim;
  }

 private:
  std::list<std::size_t> order_;
  std::unordered_map<std::size_t, std::list<std::size_t>::iterator> where_;
};

/// Resident column slices under farthest-next-use (Belady) replacement.
/// Requires the next-use position of every access up front.
class PriorityResidency {
 public:
  bool contains(std::size_t id) const { return next_use_.contains(id); }
  std::size_t size() const noexcept { return next_use_.size(); }

  void on_hit(std::size_t id, std::uint64_t next_use) {
    auto it = next_use_.find(id);
    queue_.erase(Entry{it->second, id});
    it->second = next_use;
    queue_.insert(Entry{next_use, id});
  }
  void on_insert(std::size_t id, std::uint64_t next_use) {
    next_use_[id] = next_use;
    queue_.insert(Entry{next_use, id});
  }
  /// Removes and returns the slice reused farthest in the future; slices never
  /// used again come first, ties go to the smaller id.
  std::size_t evict() {
    if (queue_.empty()) throw InternalError("priority eviction from an empty array");
    const auto last = std::prev(queue_.end());
    const std::size_t victim = last->id;
    queue_.erase(last);
    next_use_.erase(victim);
    return victim;
  }

 private:
  struct Entry {
    std::uint64_t next_use;
    std::size_t id;
  };
  // Ascending next use; within equal next use, descending id so that the
  // last element is the smallest id.
  struct Farthest {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.next_use != b.next_use) return a.next_use < b.next_use;
      return a.id > b.id;
    }
  };

  std::unordered_map<std::size_t, std::uint64_t> next_use_;
  std::set<Entry, Farthest> queue_;
};

/// Per-operation costs. Latencies in ns, energies in pJ.
struct CostConfig {
  double write_latency = 1.0;
  double write_energy = 1.0;
  double compute_latency = 1.0;
  double compute_energy = 1.0;
  /// Charged to latency once per residency check.
  double buffer_lookup_cost = 0.0;
  /// "placeholder" for the built-in unit costs, otherwise the file they came from.
  std::string source = "placeholder";

  friend bool operator==(const CostConfig&, const CostConfig&) = default;
};

/// Parses `key = value` lines (also `key: value` or `key value`). '#' starts
/// a comment; a `# units: ns pJ` header line, if present, must declare ns and pJ.
inline CostConfig parse_cost_config(std::istream& in, std::string source = "stream") {
  CostConfig cfg;
  cfg.source = std::move(source);
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      text = detail::trim(text.substr(1));
      if (text.starts_with("units:")) {
        const std::string_view units = detail::trim(text.substr(6));
        if (units.find("ns") == std::string_view::npos || units.find("pJ") == std::string_view::npos) {
          throw ConfigError("cost config line " + std::to_string(line_no) +
                            ": units must be ns and pJ, got '" + std::string(units) + "'");
        }
      }
      continue;
    }
    const auto sep = text.find_first_of("=: \t");
    if (sep == std::string_view::npos) {
      throw ConfigError("cost config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trim(text.substr(0, sep)));
    std::string_view value_text = detail::trim(text.substr(sep + 1));
    if (!value_text.empty() && (value_text.front() == '=' || value_text.front() == ':')) {
      value_text = detail::trim(value_text.substr(1));
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc{} || ptr != value_text.data() + value_text.size()) {
      throw ConfigError("cost config line " + std::to_string(line_no) + ": bad number '" +
                        std::string(value_text) + "'");
    }
    if (!(value >= 0.0)) {
      throw ConfigError("cost config line " + std::to_string(line_no) + ": " + key +
                        " must be non-negative");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("cost config line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    if (key == "write_latency") {
      cfg.write_latency = value;
    } else if (key == "write_energy") {
      cfg.write_energy = value;
    } else if (key == "compute_latency") {
      cfg.compute_latency = value;
    } else if (key == "compute_energy") {
      cfg.compute_energy = value;
    } else if (key == "buffer_lookup_cost") {
      cfg.buffer_lookup_cost = value;
    } else {
      throw ConfigError("cost config line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }
  for (const char* required : {"write_latency", "write_energy", "compute_latency", "compute_energy"}) {
    if (!seen.contains(required)) throw ConfigError(std::string("cost config is missing ") + required);
  }
  if (!seen.contains("buffer_lookup_cost")) cfg.buffer_lookup_cost = 0.0;
  return cfg;
}

inline CostConfig load_cost_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost config " + path.string());
  return parse_cost_config(in, path.string());
}

struct SimReport {
  TriangleCount triangles = 0;
  std::uint64_t compute_ops = 0;
  std::uint64_t column_loads_requested = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t replacements = 0;
  std::uint64_t row_writes = 0;
  std::uint64_t column_writes = 0;
  std::uint64_t lookups = 0;
  std::uint64_t distinct_column_slices = 0;
  std::uint64_t peak_resident = 0;
  double hit_ratio = 0.0;
  /// Share of slice writes avoided relative to writing both slices of every
  /// pair: 1 - (row_writes + column_writes) / (2 * compute_ops).
  double write_ops_saved_ratio = 0.0;
  double total_latency = 0.0;
  double total_energy = 0.0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct CostTotals {
  double latency = 0.0;
  double energy = 0.0;
};

inline CostTotals cost_totals(const SimReport& r, const CostConfig& cost) {
  const double writes = static_cast<double>(r.row_writes + r.column_writes);
  const double computes = static_cast<double>(r.compute_ops);
  return {writes * cost.write_latency + computes * cost.compute_latency +
              static_cast<double>(r.lookups) * cost.buffer_lookup_cost,
          writes * cost.write_energy + computes * cost.compute_energy};
}

struct SimConfig {
  ReplacementPolicy policy = ReplacementPolicy::kPriority;
  std::uint64_t capacity_slices = kUnboundedCapacity;
  RowOrder order = RowOrder::kSequential;
  CostConfig cost;
};

/// What happened at one trace position; handed to the step observer.
struct StepEvent {
  std::size_t position = 0;
  const Task* task = nullptr;
  bool hit = false;
  bool row_write = false;
  std::optional<std::size_t> victim;
  std::size_t resident = 0;
};

struct NoStepObserver {
  void operator()(const StepEvent&) const noexcept {}
};

namespace detail {

template <typename Residency, typename Observer>
SimReport run_trace(const CompressedGraph& cg, const AccessTrace& trace,
                    const std::vector<std::uint64_t>& next_use, const SimConfig& config,
                    Observer&& observe) {
  if (config.capacity_slices < 1) throw ConfigError("capacity must be at least one slice");
  Residency array;
  SimReport r;
  // The row buffer holds the current row's slices; a new row overwrites it.
  std::unordered_set<std::size_t> row_buffer;
  std::optional<VertexId> buffered_row;
  std::unordered_set<std::size_t> distinct_columns;

  for (std::size_t t = 0; t < trace.size(); ++t) {
    const Task& task = trace[t];
    StepEvent ev;
    ev.position = t;
    ev.task = &task;

    if (buffered_row != task.row) {
      row_buffer.clear();
      buffered_row = task.row;
    }
    if (row_buffer.insert(task.row_slot).second) {
      ++r.row_writes;
      ev.row_write = true;
    }

    ++r.column_loads_requested;
    ++r.lookups;
    distinct_columns.insert(task.column_slot);
    const std::uint64_t next = next_use.empty() ? kNeverUsed : next_use[t];
    if (array.contains(task.column_slot)) {
      ++r.hits;
      ev.hit = true;
      array.on_hit(task.column_slot, next);
    } else {
      ++r.misses;
      if (array.size() >= config.capacity_slices) {
        ev.victim = array.evict();
        ++r.replacements;
      }
      array.on_insert(task.column_slot, next);
      ++r.column_writes;
    }

    ++r.compute_ops;
    r.triangles += and_popcount(cg.rows.slot(task.row_slot), cg.columns.slot(task.column_slot));

    ev.resident = array.size();
    r.peak_resident = std::max<std::uint64_t>(r.peak_resident, ev.resident);
    if (ev.resident > config.capacity_slices || r.hits + r.misses != r.column_loads_requested ||
        r.column_writes != r.misses || r.replacements > r.misses) {
      throw InternalError("simulator counter invariant broken at step " + std::to_string(t));
    }
    observe(static_cast<const StepEvent&>(ev));
  }

  r.distinct_column_slices = distinct_columns.size();
  if (r.column_loads_requested > 0) {
    r.hit_ratio = static_cast<double>(r.hits) / static_cast<double>(r.column_loads_requested);
  }
  if (r.compute_ops > 0) {
    r.write_ops_saved_ratio = 1.0 - static_cast<double>(r.row_writes + r.column_writes) /
                                        (2.0 * static_cast<double>(r.compute_ops));
  }
  const CostTotals totals = cost_totals(r, config.cost);
  r.total_latency = totals.latency;
  r.total_energy = totals.energy;
  return r;
}

}  // namespace detail

/// Replays `trace` (built from `cg`) through a column-slice array of
/// config.capacity_slices slots. config.order is not consulted here; the
/// trace already fixes the order. `observe` sees every step.
template <typename Observer = NoStepObserver>
SimReport simulate(const CompressedGraph& cg, const AccessTrace& trace, const SimConfig& config,
                   Observer&& observe = {}) {
  if (config.policy == ReplacementPolicy::kLru) {
    return detail::run_trace<LruResidency>(cg, trace, {}, config, observe);
  }
  return detail::run_trace<PriorityResidency>(cg, trace, next_use_positions(trace), config,
                                              observe);
}

/// Builds the trace in config.order and simulates it.
template <typename Observer = NoStepObserver>
SimReport simulate(const CompressedGraph& cg, const SimConfig& config, Observer&& observe = {}) {
  if (config.capacity_slices < 1) throw ConfigError("capacity must be at least one slice");
  return simulate(cg, build_access_trace(cg, config.order), config,
                  std::forward<Observer>(observe));
}

}  // namespace tcim
