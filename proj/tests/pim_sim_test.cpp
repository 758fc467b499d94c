#include <gtest/gtest.h>

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "support/oracles.hpp"
#include "tcim/generators.hpp"
#include "tcim/pim_sim.hpp"

namespace tcim {
namespace {

Graph diamond() { return Graph(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}); }

std::vector<std::pair<VertexId, VertexId>> edges_of(const AccessTrace& trace) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (const Task& t : trace) out.emplace_back(t.row, t.column);
  return out;
}

using EdgeList = std::vector<std::pair<VertexId, VertexId>>;

struct Recorder {
  std::vector<bool> hits;
  std::vector<std::optional<std::size_t>> victims;
  std::vector<std::size_t> resident;
  void operator()(const StepEvent& ev) {
    hits.push_back(ev.hit);
    victims.push_back(ev.victim);
    resident.push_back(ev.resident);
  }
};

TEST(AccessTrace, DiamondSequential) {
  const CompressedGraph cg = compress(orient(diamond()), {4, 32});
  EXPECT_EQ(edges_of(build_access_trace(cg)), (EdgeList{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}));
}

TEST(AccessTrace, DiamondZigzag) {
  const CompressedGraph cg = compress(orient(diamond()), {4, 32});
  EXPECT_EQ(edges_of(build_access_trace(cg, RowOrder::kZigzag)),
            (EdgeList{{0, 1}, {0, 2}, {1, 3}, {1, 2}, {2, 3}}));
}

TEST(AccessTrace, EmptyGraph) {
  EXPECT_TRUE(build_access_trace(compress(orient(Graph(10, {})))).empty());
}

TEST(AccessTrace, MatchesDenseReference) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = gnp_graph(40 + seed, 0.1 + 0.02 * static_cast<double>(seed % 7), seed);
    for (std::uint32_t len : {4U, 16U, 64U}) {
      for (bool zigzag : {false, true}) {
        const CompressedGraph cg = compress(orient(g), {len, 32});
        const AccessTrace trace = build_access_trace(cg, zigzag ? RowOrder::kZigzag : RowOrder::kSequential);
        const auto ref = oracle::reference_trace(g, len, zigzag);
        ASSERT_EQ(trace.size(), ref.size());
        for (std::size_t t = 0; t < ref.size(); ++t) {
          EXPECT_EQ(trace[t].row, ref[t].i);
          EXPECT_EQ(trace[t].column, ref[t].j);
          EXPECT_EQ(trace[t].ordinal, ref[t].k);
        }
      }
    }
  }
}

TEST(Simulate, DiamondWorkedTrace) {
  const CompressedGraph cg = compress(orient(diamond()), {4, 32});
  Recorder rec;
  const SimReport r = simulate(cg, {ReplacementPolicy::kLru, 3, RowOrder::kSequential, {}}, rec);
  EXPECT_EQ(r.triangles, 2U);
  // C1 miss, C2 miss, C2 reused, C3 miss, C3 reused.
  EXPECT_EQ(rec.hits, (std::vector<bool>{false, false, true, false, true}));
  EXPECT_EQ(r.hits, 2U);
  EXPECT_EQ(r.misses, 3U);
  EXPECT_EQ(r.replacements, 0U);
  EXPECT_EQ(r.row_writes, 3U);  // R0, R1 over R0, R2 over R1
  EXPECT_EQ(r.column_writes, 3U);
  EXPECT_EQ(r.compute_ops, 5U);
  EXPECT_DOUBLE_EQ(r.total_latency, 11.0);  // unit placeholder costs
  EXPECT_DOUBLE_EQ(r.hit_ratio, 0.4);
  EXPECT_DOUBLE_EQ(r.write_ops_saved_ratio, 0.4);  // 1 - 6/10

  const SimReport p = simulate(cg, {ReplacementPolicy::kPriority, 3, RowOrder::kSequential, {}});
  EXPECT_EQ(p.hits, 2U);
  EXPECT_EQ(p.misses, 3U);
}

TEST(Simulate, DiamondSingleSliceCapacity) {
  const CompressedGraph cg = compress(orient(diamond()), {4, 32});
  for (auto policy : {ReplacementPolicy::kLru, ReplacementPolicy::kPriority}) {
    const SimReport r = simulate(cg, {policy, 1, RowOrder::kSequential, {}});
    EXPECT_EQ(r.triangles, 2U);
    EXPECT_EQ(r.misses, 3U);  // one per column change
    EXPECT_EQ(r.hits, 2U);
    EXPECT_EQ(r.replacements, 2U);
  }
}

TEST(Simulate, ZeroCapacityIsAConfigError) {
  const CompressedGraph cg = compress(orient(diamond()), {4, 32});
  EXPECT_THROW(simulate(cg, {ReplacementPolicy::kLru, 0, RowOrder::kSequential, {}}), ConfigError);
}

TEST(Simulate, PinnedRandomGraph) {
  // Pinned from oracle::replay over oracle::reference_trace.
  const Graph g = gnp_graph(64, 0.2, 7);
  ASSERT_EQ(g.edge_count(), 417U);
  const CompressedGraph cg = compress(orient(g), {16, 32});
  const SimReport lru = simulate(cg, {ReplacementPolicy::kLru, 4, RowOrder::kSequential, {}});
  const SimReport pri = simulate(cg, {ReplacementPolicy::kPriority, 4, RowOrder::kSequential, {}});
  EXPECT_EQ(lru.triangles, 360U);
  EXPECT_EQ(pri.triangles, 360U);
  EXPECT_EQ(lru.column_loads_requested, 726U);
  EXPECT_EQ(lru.hits, 12U);
  EXPECT_EQ(lru.misses, 714U);
  EXPECT_EQ(lru.replacements, 710U);
  EXPECT_EQ(pri.hits, 102U);
  EXPECT_EQ(pri.misses, 624U);
  EXPECT_EQ(pri.replacements, 620U);

  const CompressedGraph whole = compress(orient(g), {64, 32});
  const SimReport lru64 = simulate(whole, {ReplacementPolicy::kLru, 4, RowOrder::kSequential, {}});
  const SimReport pri64 = simulate(whole, {ReplacementPolicy::kPriority, 4, RowOrder::kSequential, {}});
  EXPECT_EQ(lru64.misses, 403U);
  EXPECT_EQ(lru64.replacements, 399U);
  EXPECT_EQ(pri64.misses, 316U);
  EXPECT_EQ(pri64.replacements, 312U);
}

TEST(Simulate, AgreesWithReferenceReplayStepByStep) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = gnp_graph(30 + seed % 35, 0.08 + 0.03 * static_cast<double>(seed % 9), seed);
    for (std::uint32_t len : {8U, 64U}) {
      const CompressedGraph cg = compress(orient(g), {len, 32});
      const AccessTrace trace = build_access_trace(cg);
      std::map<std::size_t, std::uint64_t> block_of_slot;
      std::vector<std::uint64_t> blocks;
      for (const Task& t : trace) {
        const std::uint64_t block = oracle::column_block({t.row, t.column, t.ordinal});
        block_of_slot[t.column_slot] = block;
        blocks.push_back(block);
      }
      for (std::uint64_t capacity : {1ULL, 2ULL, 3ULL, 8ULL}) {
        for (bool belady : {false, true}) {
          const auto ref = oracle::replay(blocks, capacity, belady);
          Recorder rec;
          const SimReport r = simulate(
              cg, trace,
              {belady ? ReplacementPolicy::kPriority : ReplacementPolicy::kLru, capacity,
               RowOrder::kSequential, {}},
              rec);
          ASSERT_EQ(r.hits, ref.hits);
          ASSERT_EQ(r.misses, ref.misses);
          ASSERT_EQ(r.replacements, ref.replacements);
          for (std::size_t t = 0; t < trace.size(); ++t) {
            ASSERT_EQ(rec.victims[t].has_value(), ref.victims[t].has_value()) << "step " << t;
            if (rec.victims[t]) {
              EXPECT_EQ(block_of_slot.at(*rec.victims[t]), *ref.victims[t]);
            }
          }
        }
      }
    }
  }
}

TEST(EvictLru, OldestFirst) {
  LruResidency lru;
  lru.on_insert(10, kNeverUsed);  // a
  lru.on_insert(11, kNeverUsed);  // b
  lru.on_insert(12, kNeverUsed);  // c
  EXPECT_EQ(lru.evict(), 10U);

  LruResidency touched;
  touched.on_insert(10, kNeverUsed);
  touched.on_insert(11, kNeverUsed);
  touched.on_insert(12, kNeverUsed);
  touched.on_hit(10, kNeverUsed);
  EXPECT_EQ(touched.evict(), 11U);
  EXPECT_EQ(touched.size(), 2U);
  EXPECT_FALSE(touched.contains(11));
}

TEST(EvictLru, EmptyIsAnInternalError) {
  LruResidency lru;
  EXPECT_THROW(lru.evict(), InternalError);
}

TEST(EvictLru, DiamondWithTwoSlotsDropsC1ForC3) {
  const CompressedGraph cg = compress(orient(diamond()), {4, 32});
  Recorder rec;
  simulate(cg, {ReplacementPolicy::kLru, 2, RowOrder::kSequential, {}}, rec);
  // Column slots in (j, k) order: C1 -> 0, C2 -> 1, C3 -> 2.
  ASSERT_TRUE(rec.victims[3].has_value());
  EXPECT_EQ(*rec.victims[3], 0U);
}

TEST(EvictPriority, FarthestNextUse) {
  PriorityResidency p;
  p.on_insert(1, 9);           // x
  p.on_insert(2, 4);           // y
  p.on_insert(3, kNeverUsed);  // z
  EXPECT_EQ(p.evict(), 3U);
  EXPECT_EQ(p.evict(), 1U);
  EXPECT_EQ(p.evict(), 2U);
  EXPECT_THROW(p.evict(), InternalError);
}

TEST(EvictPriority, TieGoesToSmallerId) {
  PriorityResidency p;
  p.on_insert(7, kNeverUsed);
  p.on_insert(4, kNeverUsed);
  p.on_insert(9, kNeverUsed);
  EXPECT_EQ(p.evict(), 4U);
}

TEST(EvictPriority, HitUpdatesNextUse) {
  PriorityResidency p;
  p.on_insert(1, 5);
  p.on_insert(2, 8);
  p.on_hit(1, 20);
  EXPECT_EQ(p.evict(), 1U);
}

// Drives a residency class over a raw id sequence the way the simulator does.
template <typename Residency>
std::vector<std::optional<std::size_t>> drive(const std::vector<std::size_t>& ids, std::size_t capacity) {
  AccessTrace trace;
  for (std::size_t id : ids) trace.push_back({0, 0, 0, 0, id});
  const auto next = next_use_positions(trace);
  Residency array;
  std::vector<std::optional<std::size_t>> victims;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    std::optional<std::size_t> victim;
    if (array.contains(ids[t])) {
      array.on_hit(ids[t], next[t]);
    } else {
      if (array.size() >= capacity) victim = array.evict();
      array.on_insert(ids[t], next[t]);
    }
    victims.push_back(victim);
  }
  return victims;
}

TEST(EvictPriority, SeededTraceVictimsPinned) {
  const std::vector<std::size_t> ids{2, 5, 4, 0, 3, 2, 4, 1, 1, 2, 2, 5, 1, 2, 3,
                                     3, 5, 3, 3, 2, 1, 2, 1, 4, 1, 5, 5, 4, 1, 0};
  // From oracle::replay(ids, 3, farthest_future = true / false).
  const std::vector<int> pri_expected{-1, -1, -1, 5, 0, -1, -1, 4, -1, -1, -1, 3, -1, -1, 1,
                                      -1, -1, -1, -1, -1, 3, -1, -1, 2, -1, -1, -1, -1, -1, 1};
  const std::vector<int> lru_expected{-1, -1, -1, 2, 5, 4, 0, 3, -1, -1, -1, 4, -1, -1, 5,
                                      -1, 1, -1, -1, -1, 5, -1, -1, 3, -1, 2, -1, -1, -1, 5};
  auto as_ints = [](const std::vector<std::optional<std::size_t>>& v) {
    std::vector<int> out;
    for (const auto& x : v) out.push_back(x ? static_cast<int>(*x) : -1);
    return out;
  };
  const auto pri = as_ints(drive<PriorityResidency>(ids, 3));
  const auto lru = as_ints(drive<LruResidency>(ids, 3));
  EXPECT_EQ(pri, pri_expected);
  EXPECT_EQ(lru, lru_expected);
  const auto replacements = [](const std::vector<int>& v) { return std::count_if(v.begin(), v.end(), [](int x) { return x >= 0; }); };
  EXPECT_EQ(replacements(pri), 8);
  EXPECT_EQ(replacements(lru), 12);
}

TEST(CostTotals, Arithmetic) {
  SimReport r;
  r.row_writes = 3;
  r.column_writes = 3;
  r.compute_ops = 5;
  r.lookups = 5;
  CostConfig zero{0, 0, 0, 0, 0, "test"};
  EXPECT_EQ(cost_totals(r, zero).latency, 0.0);
  EXPECT_EQ(cost_totals(r, zero).energy, 0.0);
  CostConfig c{2, 3, 1, 0.5, 0, "test"};
  EXPECT_DOUBLE_EQ(cost_totals(r, c).latency, 17.0);
  EXPECT_DOUBLE_EQ(cost_totals(r, c).energy, 20.5);
  c.buffer_lookup_cost = 0.25;
  EXPECT_DOUBLE_EQ(cost_totals(r, c).latency, 18.25);
}

TEST(CostConfigFile, Parses) {
  std::istringstream in(
      "# units: latency=ns energy=pJ\n"
      "write_latency = 10.5\n"
      "write_energy: 2\n"
      "compute_latency 1.25\n"
      "compute_energy = 0.5\n");
  const CostConfig c = parse_cost_config(in, "mem");
  EXPECT_DOUBLE_EQ(c.write_latency, 10.5);
  EXPECT_DOUBLE_EQ(c.write_energy, 2.0);
  EXPECT_DOUBLE_EQ(c.compute_latency, 1.25);
  EXPECT_DOUBLE_EQ(c.compute_energy, 0.5);
  EXPECT_DOUBLE_EQ(c.buffer_lookup_cost, 0.0);
  EXPECT_EQ(c.source, "mem");
}

TEST(CostConfigFile, Rejects) {
  const char* bad[] = {
      "write_latency = 1\nwrite_energy = 1\ncompute_latency = 1\n",                          // missing
      "write_latency = -1\nwrite_energy = 1\ncompute_latency = 1\ncompute_energy = 1\n",     // negative
      "write_latency = 1\nwrite_energy = 1\ncompute_latency = 1\ncompute_energy = 1\nfoo = 2\n",
      "# units: us nJ\nwrite_latency = 1\nwrite_energy = 1\ncompute_latency = 1\ncompute_energy = 1\n",
      "write_latency = 1\nwrite_latency = 2\nwrite_energy = 1\ncompute_latency = 1\ncompute_energy = 1\n",
      "write_latency = abc\n",
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(parse_cost_config(in), ConfigError) << text;
  }
  EXPECT_THROW(load_cost_config("/nonexistent/cost.cfg"), ConfigError);
}

TEST(Capacity, Presets) {
  EXPECT_EQ(capacity_preset_8mb(), 1048576U);
  EXPECT_EQ(capacity_preset_16mb(), 2097152U);
  EXPECT_EQ(capacity_preset_8mb({128, 32}), 524288U);
  EXPECT_THROW(capacity_slices_from_bytes(4, {64, 32}), ConfigError);
}

TEST(Properties, FlowCorrectnessAndConservation) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Graph g = gnp_graph(20 + seed % 45, 0.05 + 0.03 * static_cast<double>(seed % 12), seed);
    const TriangleCount expected = count_triangles_bitwise(orient(g));
    for (std::uint32_t len : {5U, 32U, 64U}) {
      const CompressedGraph cg = compress(orient(g), {len, 32});
      for (RowOrder order : {RowOrder::kSequential, RowOrder::kZigzag}) {
        const AccessTrace trace = build_access_trace(cg, order);
        std::set<std::size_t> distinct;
        for (const Task& t : trace) distinct.insert(t.column_slot);
        for (std::uint64_t capacity : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{8}, kUnboundedCapacity}) {
          SimReport by_policy[2];
          int p = 0;
          for (auto policy : {ReplacementPolicy::kLru, ReplacementPolicy::kPriority}) {
            Recorder rec;
            const SimConfig cfg{policy, capacity, order, {}};
            const SimReport r = simulate(cg, trace, cfg, rec);
            EXPECT_EQ(r.triangles, expected);
            EXPECT_EQ(r.hits + r.misses, r.column_loads_requested);
            EXPECT_EQ(r.column_writes, r.misses);
            EXPECT_LE(r.replacements, r.misses);
            for (std::size_t resident : rec.resident) EXPECT_LE(resident, capacity);
            if (capacity == kUnboundedCapacity) {
              EXPECT_EQ(r.replacements, 0U);
              EXPECT_EQ(r.misses, distinct.size());
            }
            EXPECT_EQ(simulate(cg, trace, cfg), r);
            by_policy[p++] = r;
          }
          EXPECT_LE(by_policy[1].misses, by_policy[0].misses);
          EXPECT_LE(by_policy[1].replacements, by_policy[0].replacements);
        }
      }
    }
  }
}

}  // namespace
}  // namespace tcim
