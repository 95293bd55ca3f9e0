// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "nocweave/error.hpp"
#include "nocweave/fabric.hpp"
#include "nocweave/pipeline.hpp"
#include "nocweave/report.hpp"

using namespace nocweave;
using fixture::make_graph;

namespace {

NocGraph line() { return make_graph(2, 3, {{0, 2}, {2, 0}, {1, 2}, {2, 1}}); }

const SwitchConfig& switch_at(const ControlTables& c, int node) {
  for (const SwitchConfig& sw : c.switches) {
    if (sw.node == node) return sw;
  }
  throw std::runtime_error("no switch");
}

}  // namespace

TEST(Emit, ControlPointsAtArrivalRow) {
  NocGraph g = line();
  PeriodicSchedule s = fixture::hand_schedule(g, 8, {{0, {{0, 2}, {2, 1}}, {3, 5}}});
  ControlTables c = emit_controls(s, g);
  const SwitchConfig& sw = switch_at(c, 2);
  ASSERT_EQ(sw.din, 1);
  ASSERT_EQ(sw.outputs.size(), 1u);
  EXPECT_EQ(sw.outputs[0].edge, g.find_edge(2, 1));
  for (int slot = 0; slot < 8; ++slot) {
    if (slot == 5) {
      ASSERT_TRUE(sw.outputs[0].control[slot].has_value());
      EXPECT_EQ(*sw.outputs[0].control[slot], (MemoryAddress{3, 1}));
    } else {
      EXPECT_FALSE(sw.outputs[0].control[slot].has_value());
    }
  }
  EXPECT_EQ(sw.pass_through_cells, 0);
  EXPECT_EQ(sw.memory_cells, 8);
}

TEST(Emit, PassThroughCellIsReusable) {
  NocGraph g = line();
  PeriodicSchedule s = fixture::hand_schedule(g, 8, {{0, {{0, 2}, {2, 1}}, {3, 4}}});
  ControlTables c = emit_controls(s, g);
  const SwitchConfig& sw = switch_at(c, 2);
  EXPECT_EQ(sw.pass_through_cells, 1);
  EXPECT_EQ(sw.memory_cells, 8 * sw.din - 1);
}

TEST(Emit, EmptyScheduleIsIdle) {
  NocGraph g = line();
  PeriodicSchedule s;
  ControlTables c = emit_controls(s, g);
  for (const SwitchConfig& sw : c.switches) {
    for (const OutputControl& o : sw.outputs) {
      for (const auto& entry : o.control) EXPECT_FALSE(entry.has_value());
    }
  }
  for (const NiConfig& ni : c.nis) {
    EXPECT_TRUE(ni.outgoing.empty());
    EXPECT_TRUE(ni.incoming.empty());
  }
  SimReport r = simulate(g, c, SteadyTraffic{32});
  EXPECT_EQ(r.utilization(), Rational(0));
  EXPECT_TRUE(r.flits.empty());
  for (const auto& [node, occ] : r.max_occupancy) EXPECT_EQ(occ, 0);
}

TEST(Emit, ControlsJsonRoundTrip) {
  PipelineConfig cfg;
  cfg.topology = MeshSpec{3, 3};
  PipelineResult res = run_pipeline(cfg);
  const std::string first = to_json(res.controls).dump();
  EXPECT_EQ(to_json(controls_from_json(nlohmann::json::parse(first))).dump(), first);
}

TEST(Simulate, OneSessionTwoHops) {
  NocGraph g = line();
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 8)}};
  auto rounded = round_flows(cs, {{0, {g.find_edge(0, 2), g.find_edge(2, 1)}, Rational(1, 8)}}, 8);
  EdgeLoads loads = assign_widths(g, rounded, 8);
  PeriodicSchedule s = allocate_slots(cs, rounded, 8, loads.lanes);
  ControlTables c = emit_controls(s, g);
  SimReport r = simulate(g, c, SteadyTraffic{64});
  ASSERT_EQ(r.flits.size(), 8u);
  const std::int64_t d = predict_latencies(s).at(0);
  for (const FlitRecord& f : r.flits) {
    EXPECT_EQ(f.arrived - f.injected, d);
    EXPECT_GE(f.delivered, f.arrived);
  }
  EXPECT_EQ(r.flits.front().injected, 0);  // no warm-up
  EXPECT_EQ(r.edge_utilization[g.find_edge(0, 2)], Rational(1, 8));
  EXPECT_EQ(r.edge_utilization[g.find_edge(2, 1)], Rational(1, 8));
  EXPECT_EQ(r.utilization(), Rational(1));
  EXPECT_TRUE(r.in_order);
}

TEST(Simulate, SplitSessionIsMergedInInjectionOrder) {
  // Long route PE0 s2 s3 s4 s5 PE1 (D = 6 from slot 0) and short route
  // PE0 s2 s5 PE1 (D = 3 from slot 2): the second flit overtakes the first.
  NocGraph g = make_graph(2, 6, {{0, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}, {2, 5}, {5, 1}, {1, 5}});
  PeriodicSchedule s = fixture::hand_schedule(
      g, 8,
      {{0, {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 1}}, {0, 1, 2, 3, 5}}, {0, {{0, 2}, {2, 5}, {5, 1}}, {2, 3, 4}}});
  ASSERT_EQ(s.sequences[0].delay, 6);
  ASSERT_EQ(s.sequences[1].delay, 3);
  EXPECT_EQ(s.sessions[0].reorder_gaps, (std::vector<std::int64_t>{-1, 9}));
  ScheduleCheck check = validate_schedule(s, g);
  ASSERT_TRUE(check.ok) << check.message;
  ControlTables c = emit_controls(s, g);
  SimReport r = simulate(g, c, SteadyTraffic{40});
  ASSERT_EQ(r.flits.size(), 10u);
  bool overtaken = false;
  for (std::size_t i = 0; i + 1 < r.flits.size(); i += 2) {
    overtaken |= r.flits[i + 1].arrived < r.flits[i].arrived;
    EXPECT_LE(r.flits[i].delivered, r.flits[i + 1].delivered);
  }
  EXPECT_TRUE(overtaken);
  EXPECT_TRUE(r.in_order);
  for (const FlitRecord& f : r.flits) EXPECT_EQ(f.arrived - f.injected, s.sequences[f.sequence].delay);
}

TEST(Simulate, MeshSteadyInvariants) {
  for (std::uint64_t seed : {1u, 2u}) {
    PipelineConfig cfg;
    cfg.topology = MeshSpec{4, 4};
    cfg.seed = seed;
    PipelineResult res = run_pipeline(cfg);
    EXPECT_EQ(res.summary.latency_mismatches, 0);
    EXPECT_EQ(res.summary.delivered, res.summary.flits);
    EXPECT_TRUE(res.summary.in_order);
    for (const SwitchConfig& sw : res.controls.switches) {
      EXPECT_LE(res.sim.max_occupancy.at(sw.node), static_cast<std::int64_t>(cfg.phi) * sw.din);
    }
    for (const Rational& u : res.sim.edge_utilization) {
      EXPECT_GE(u, 0);
      EXPECT_LE(u, 1);
    }
  }
}

TEST(Simulate, BrokenControlsTripTheAssertion) {
  NocGraph g = line();
  PeriodicSchedule s = fixture::hand_schedule(g, 8, {{0, {{0, 2}, {2, 1}}, {0, 1}}});
  ControlTables c = emit_controls(s, g);
  for (SwitchConfig& sw : c.switches) {
    for (OutputControl& o : sw.outputs) {
      for (auto& entry : o.control) entry.reset();
    }
  }
  EXPECT_THROW(simulate(g, c, SteadyTraffic{32}), Error);
}

TEST(Simulate, TcgReplayRunsTasksInOrder) {
  PipelineConfig cfg;
  cfg.topology = MeshSpec{4, 4};
  cfg.traffic = TrafficKind::SyntheticTcg;
  cfg.seed = 4;
  PipelineResult res = run_pipeline(cfg);
  ASSERT_TRUE(res.traffic.tcg.has_value());
  Tcg unrolled = unroll(*res.traffic.tcg, cfg.iterations, *res.traffic.tcg->app_period);
  EXPECT_EQ(res.sim.task_end.size(), unrolled.tasks.size());
  for (const Message& m : unrolled.messages) {
    EXPECT_GE(res.sim.task_end.at(m.dst), res.sim.task_end.at(m.src) + unrolled.task(m.dst).duration);
  }
  EXPECT_LE(res.sim.utilization(), *res.report.utilization_bound);
}
