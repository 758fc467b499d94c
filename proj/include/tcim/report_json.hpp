#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "tcim/pim_sim.hpp"
#include "tcim/slicing.hpp"

namespace tcim {

inline constexpr std::string_view kToolName = "tcim";
inline constexpr std::string_view kToolVersion = "1.0.0";

// JSON has no infinity; an unbounded capacity is written as null.
inline nlohmann::json capacity_to_json(std::uint64_t capacity) {
  return capacity == kUnboundedCapacity ? nlohmann::json(nullptr) : nlohmann::json(capacity);
}
inline std::uint64_t capacity_from_json(const nlohmann::json& j) {
  return j.is_null() ? kUnboundedCapacity : j.get<std::uint64_t>();
}

inline void to_json(nlohmann::json& j, const SliceConfig& c) {
  j = {{"slice_length", c.slice_length}, {"index_width", c.index_width}};
}
inline void from_json(const nlohmann::json& j, SliceConfig& c) {
  j.at("slice_length").get_to(c.slice_length);
  j.at("index_width").get_to(c.index_width);
}

inline void to_json(nlohmann::json& j, const CostConfig& c) {
  j = {{"source", c.source},
       {"units", {{"latency", "ns"}, {"energy", "pJ"}}},
       {"write_latency", c.write_latency},
       {"write_energy", c.write_energy},
       {"compute_latency", c.compute_latency},
       {"compute_energy", c.compute_energy},
       {"buffer_lookup_cost", c.buffer_lookup_cost}};
}
inline void from_json(const nlohmann::json& j, CostConfig& c) {
  j.at("source").get_to(c.source);
  j.at("write_latency").get_to(c.write_latency);
  j.at("write_energy").get_to(c.write_energy);
  j.at("compute_latency").get_to(c.compute_latency);
  j.at("compute_energy").get_to(c.compute_energy);
  j.at("buffer_lookup_cost").get_to(c.buffer_lookup_cost);
}

inline void to_json(nlohmann::json& j, const SimConfig& c) {
  j = {{"policy", to_string(c.policy)},
       {"capacity_slices", capacity_to_json(c.capacity_slices)},
       {"order", to_string(c.order)},
       {"cost", c.cost}};
}
inline void from_json(const nlohmann::json& j, SimConfig& c) {
  c.policy = parse_policy(j.at("policy").get<std::string>());
  c.capacity_slices = capacity_from_json(j.at("capacity_slices"));
  c.order = parse_row_order(j.at("order").get<std::string>());
  j.at("cost").get_to(c.cost);
}

inline void to_json(nlohmann::json& j, const SimReport& r) {
  j = {{"triangles", r.triangles},
       {"compute_ops", r.compute_ops},
       {"column_loads_requested", r.column_loads_requested},
       {"hits", r.hits},
       {"misses", r.misses},
       {"replacements", r.replacements},
       {"row_writes", r.row_writes},
       {"column_writes", r.column_writes},
       {"lookups", r.lookups},
       {"distinct_column_slices", r.distinct_column_slices},
       {"peak_resident", r.peak_resident},
       {"hit_ratio", r.hit_ratio},
       {"write_ops_saved_ratio", r.write_ops_saved_ratio},
       {"cost_estimate", {{"total_latency_ns", r.total_latency}, {"total_energy_pj", r.total_energy}}}};
}
inline void from_json(const nlohmann::json& j, SimReport& r) {
  j.at("triangles").get_to(r.triangles);
  j.at("compute_ops").get_to(r.compute_ops);
  j.at("column_loads_requested").get_to(r.column_loads_requested);
  j.at("hits").get_to(r.hits);
  j.at("misses").get_to(r.misses);
  j.at("replacements").get_to(r.replacements);
  j.at("row_writes").get_to(r.row_writes);
  j.at("column_writes").get_to(r.column_writes);
  j.at("lookups").get_to(r.lookups);
  j.at("distinct_column_slices").get_to(r.distinct_column_slices);
  j.at("peak_resident").get_to(r.peak_resident);
  j.at("hit_ratio").get_to(r.hit_ratio);
  j.at("write_ops_saved_ratio").get_to(r.write_ops_saved_ratio);
  j.at("cost_estimate").at("total_latency_ns").get_to(r.total_latency);
  j.at("cost_estimate").at("total_energy_pj").get_to(r.total_energy);
}

inline void to_json(nlohmann::json& j, const CompressionMetrics& m) {
  j = {{"alpha", m.alpha},
       {"analytic_cr", m.analytic_cr},
       {"measured_cr", m.measured_cr},
       {"valid_slice_count", m.valid_slice_count},
       {"column_valid_slice_count", m.column_valid_slice_count},
       {"valid_pair_count", m.valid_pair_count},
       {"valid_pair_ratio", m.valid_pair_ratio}};
}

/// 64-bit FNV-1a of the canonical (sorted-key, compact) dump.
inline std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::json provenance(const nlohmann::json& config) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"config_hash", config_hash(config)}};
}

}  // namespace tcim
