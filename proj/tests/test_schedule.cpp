// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "nocweave/error.hpp"
#include "nocweave/pipeline.hpp"
#include "nocweave/random.hpp"
#include "nocweave/schedule.hpp"

using namespace nocweave;
using fixture::make_graph;

namespace {

// PE0 -> s2 -> PE1 plus the return arcs.
NocGraph line() { return make_graph(2, 3, {{0, 2}, {2, 0}, {1, 2}, {2, 1}}); }

PeriodicSchedule schedule_for(NocGraph& g, const std::vector<Commodity>& cs, const std::vector<PathFlow>& paths,
                              int phi) {
  auto rounded = round_flows(cs, paths, phi);
  EdgeLoads loads = assign_widths(g, rounded, phi);
  return allocate_slots(cs, rounded, phi, loads.lanes);
}

}  // namespace

TEST(Round, AlreadyOnGrid) {
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 2)}};
  std::vector<PathFlow> paths{{0, {0, 3}, Rational(1, 2)}};
  auto r = round_flows(cs, paths, 8);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].slots_per_period, 4);
  EXPECT_EQ(r[0].amount(8), Rational(1, 2));
}

TEST(Round, ScanDecrementsByRoundedValue) {
  std::vector<Commodity> cs{{0, 0, 1, Rational(3, 10)}};
  std::vector<PathFlow> paths{{0, {0, 3}, Rational(1, 5)}, {0, {1, 2}, Rational(1, 10)}};
  auto r = round_flows(cs, paths, 8);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].amount(8), Rational(1, 4));
  EXPECT_EQ(r[1].amount(8), Rational(1, 8));
  EXPECT_EQ(r[0].amount(8) + r[1].amount(8), Rational(3, 8));
}

TEST(Round, RemainingPathsErased) {
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 4)}};
  std::vector<PathFlow> paths{{0, {0, 3}, Rational(1, 4)}, {0, {1, 2}, Rational(1, 4)}};
  auto r = round_flows(cs, paths, 8);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].path, (std::vector<int>{0, 3}));
  EXPECT_EQ(r[0].slots_per_period, 2);
}

TEST(Round, MissingPathsIsAnError) {
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 4)}};
  EXPECT_THROW(round_flows(cs, {}, 8), Error);
}

TEST(Round, OvershootBelowPathsOverPhi) {
  Rng rng(5);
  for (int round = 0; round < 200; ++round) {
    const int phi = static_cast<int>(rng.between(1, 16));
    const int n = static_cast<int>(rng.between(1, 4));
    Rational demand(0);
    std::vector<PathFlow> paths;
    for (int i = 0; i < n; ++i) {
      Rational a(rng.between(1, 40), rng.between(1, 30));
      paths.push_back({0, {i}, a});
      demand += a;
    }
    std::stable_sort(paths.begin(), paths.end(), [](const PathFlow& a, const PathFlow& b) { return a.amount > b.amount; });
    std::vector<Commodity> cs{{0, 0, 1, demand}};
    auto r = round_flows(cs, paths, phi);
    Rational total(0);
    for (const auto& p : r) {
      EXPECT_GT(p.slots_per_period, 0);
      total += p.amount(phi);
    }
    EXPECT_GE(total, demand);
    EXPECT_LT(total - demand, Rational(static_cast<std::int64_t>(r.size()), phi));
  }
}

TEST(Widths, CeilingOfRoundedLoad) {
  NocGraph g = line();
  const int e = g.find_edge(0, 2);
  for (auto [slots, lanes] : {std::pair{3, 1}, {8, 1}, {9, 2}}) {
    NocGraph sized = g;
    EdgeLoads loads = assign_widths(sized, {{0, {e, g.find_edge(2, 1)}, slots}}, 8);
    EXPECT_EQ(loads.load[e], Rational(slots, 8));
    EXPECT_EQ(loads.lanes[e], lanes);
    EXPECT_EQ(sized.edges()[e].width_bits, 4 * lanes);
    EXPECT_EQ(sized.edges()[g.find_edge(2, 0)].width_bits, 0);
  }
}

TEST(Allocate, TwoHopOnEmptyTemplates) {
  NocGraph g = line();
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 8)}};
  PeriodicSchedule s = schedule_for(g, cs, {{0, {g.find_edge(0, 2), g.find_edge(2, 1)}, Rational(1, 8)}}, 8);
  ASSERT_EQ(s.sequences.size(), 1u);
  EXPECT_EQ(s.sequences[0].hops[0].slot, 0);
  EXPECT_EQ(s.sequences[0].hops[1].slot, 1);
  EXPECT_EQ(s.sequences[0].depart, 0);
  EXPECT_EQ(s.sequences[0].delay, 2);
  EXPECT_TRUE(validate_schedule(s, g).ok);
}

TEST(Allocate, SharedOneLaneEdgeGetsDistinctSlots) {
  NocGraph g = line();
  std::vector<Commodity> cs{{0, 0, 1, Rational(2, 8)}};
  PeriodicSchedule s = schedule_for(g, cs, {{0, {g.find_edge(0, 2), g.find_edge(2, 1)}, Rational(2, 8)}}, 8);
  ASSERT_EQ(s.sequences.size(), 2u);
  EXPECT_EQ(s.sequences[0].hops[0].slot, 0);
  EXPECT_EQ(s.sequences[1].hops[0].slot, 1);
  EXPECT_TRUE(validate_schedule(s, g).ok);
}

TEST(Allocate, FullLoadUsesEverySlot) {
  // PE0, PE1 -> s4 -> s5 -> PE2, PE3: four commodities of one slot each over
  // a four-slot period all cross s4 -> s5.
  NocGraph g = make_graph(4, 6, {{0, 4}, {4, 0}, {1, 4}, {4, 1}, {4, 5}, {5, 4}, {2, 5}, {5, 2}, {3, 5}, {5, 3}});
  const int phi = 4;
  std::vector<Commodity> cs;
  std::vector<PathFlow> paths;
  for (auto [s, d] : {std::pair{0, 2}, {0, 3}, {1, 2}, {1, 3}}) {
    const int id = static_cast<int>(cs.size());
    cs.push_back({id, s, d, Rational(1, phi)});
    paths.push_back({id, {g.find_edge(s, 4), g.find_edge(4, 5), g.find_edge(5, d)}, Rational(1, phi)});
  }
  PeriodicSchedule s = schedule_for(g, cs, paths, phi);
  ScheduleCheck check = validate_schedule(s, g);
  ASSERT_TRUE(check.ok) << check.message;
  const EdgeTemplate* t = s.find_template(g.find_edge(4, 5));
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->lanes, 1);
  for (const auto& row : t->table) EXPECT_NE(row[0], -1);
}

TEST(Allocate, OverloadedEdgeIsInfeasible) {
  NocGraph g = line();
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 2)}};
  std::vector<RoundedPathFlow> rounded{{0, {g.find_edge(0, 2), g.find_edge(2, 1)}, 4}};
  std::vector<int> lanes(g.edge_count(), 0);
  lanes[g.find_edge(0, 2)] = 1;
  lanes[g.find_edge(2, 1)] = 1;
  EXPECT_NO_THROW(allocate_slots(cs, rounded, 8, lanes));
  rounded[0].slots_per_period = 9;
  EXPECT_THROW(allocate_slots(cs, rounded, 8, lanes), Error);
}

TEST(Validate, DetectsDoubleBookingAndPrecedence) {
  NocGraph g = line();
  std::vector<Commodity> cs{{0, 0, 1, Rational(1, 8)}};
  PeriodicSchedule s = schedule_for(g, cs, {{0, {g.find_edge(0, 2), g.find_edge(2, 1)}, Rational(1, 8)}}, 8);
  ASSERT_TRUE(validate_schedule(s, g).ok);

  PeriodicSchedule dup = s;
  dup.templates[0].table[5][0] = dup.templates[0].table[0][0];
  ScheduleCheck c1 = validate_schedule(dup, g);
  EXPECT_FALSE(c1.ok);
  EXPECT_NE(c1.message.find("double-booking"), std::string::npos) << c1.message;

  PeriodicSchedule same = fixture::hand_schedule(g, 8, {{0, {{0, 2}, {2, 1}}, {3, 3}}});
  ScheduleCheck c2 = validate_schedule(same, g);
  EXPECT_FALSE(c2.ok);
  EXPECT_NE(c2.message.find("precedence"), std::string::npos) << c2.message;

  PeriodicSchedule wrong_count = s;
  wrong_count.sessions[0].slots_per_period = 2;
  EXPECT_FALSE(validate_schedule(wrong_count, g).ok);
}

TEST(Predict, HandDelays) {
  NocGraph g = line();
  PeriodicSchedule one = fixture::hand_schedule(g, 8, {{0, {{0, 2}}, {0}}});
  EXPECT_EQ(predict_latencies(one).at(0), 1);
  PeriodicSchedule two = fixture::hand_schedule(g, 8, {{0, {{0, 2}, {2, 1}}, {0, 5}}});
  EXPECT_EQ(predict_latencies(two).at(0), 6);
  PeriodicSchedule k = fixture::hand_schedule(g, 8, {{0, {{0, 2}, {2, 1}}, {3, 4}}});
  EXPECT_EQ(predict_latencies(k).at(0), 2);
}

TEST(Allocate, PipelinePropertiesOnMeshes) {
  for (auto [rows, seed] : {std::pair{4, 1}, {4, 2}, {4, 3}, {6, 4}}) {
    for (ObjectiveKind obj : {ObjectiveKind::MinCost, ObjectiveKind::MinCongestion}) {
      PipelineConfig cfg;
      cfg.topology = MeshSpec{rows, rows};
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.objective = obj;
      NocGraph g = stage_gen(cfg);
      TrafficArtifacts traffic = stage_demands(cfg, g);
      SolveArtifacts solved = stage_solve(cfg, g, traffic.demands);
      RoundArtifacts rounded = stage_round(cfg, g, solved);
      PeriodicSchedule s = stage_schedule(cfg, g, solved, rounded);
      ScheduleCheck check = validate_schedule(s, g);
      ASSERT_TRUE(check.ok) << check.message;
      for (const TokenSequence& ts : s.sequences) {
        EXPECT_LE(ts.delay, static_cast<std::int64_t>(ts.path.size()) * cfg.phi);
        EXPECT_GE(ts.delay, static_cast<std::int64_t>(ts.path.size()));
      }
      for (const Session& ss : s.sessions) {
        std::int64_t sum = 0;
        for (std::int64_t gap : ss.reorder_gaps) sum += gap;
        EXPECT_EQ(sum % cfg.phi, 0);
      }
      const std::string first = to_json(s).dump();
      EXPECT_EQ(to_json(schedule_from_json(nlohmann::json::parse(first))).dump(), first);
      const std::string rj = rounded_to_json(rounded.rounded, cfg.phi).dump();
      EXPECT_EQ(rounded_to_json(rounded_from_json(nlohmann::json::parse(rj)), cfg.phi).dump(), rj);
    }
  }
}
