// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

// Small graphs and hand-built schedules shared by the schedule and fabric
// tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "nocweave/graph.hpp"
#include "nocweave/schedule.hpp"

namespace fixture {

using namespace nocweave;

/// Builds a graph from `pes` PEs followed by switches up to `nodes`, with the
/// listed arcs at unit cost.
inline NocGraph make_graph(int pes, int nodes, const std::vector<std::pair<int, int>>& arcs, int flit_bits = 4) {
  std::vector<Node> ns;
  for (int i = 0; i < nodes; ++i) ns.push_back({i, i < pes ? NodeKind::Pe : NodeKind::Switch, {}});
  std::vector<Edge> es;
  for (auto [a, b] : arcs) es.push_back({a, b, 1.0, 0});
  return NocGraph(flit_bits, "fixture", ns, es);
}

struct HandSequence {
  int commodity = 0;
  std::vector<std::pair<int, int>> hops;  // arcs (src, dst)
  std::vector<std::int64_t> times;        // unrolled hop times
};

/// Schedule with one lane per used edge, sessions and gaps computed from the
/// listed sequences. Sequences are numbered in list order.
inline PeriodicSchedule hand_schedule(const NocGraph& g, int phi, const std::vector<HandSequence>& list) {
  PeriodicSchedule s;
  s.phi = phi;
  std::map<int, EdgeTemplate> templates;
  for (std::size_t i = 0; i < list.size(); ++i) {
    TokenSequence ts;
    ts.id = static_cast<int>(i);
    ts.commodity = list[i].commodity;
    for (std::size_t h = 0; h < list[i].hops.size(); ++h) {
      const int e = g.find_edge(list[i].hops[h].first, list[i].hops[h].second);
      const std::int64_t t = list[i].times[h];
      ts.path.push_back(e);
      ts.hops.push_back(HopSlot{static_cast<int>(t % phi), 0, t});
      auto [it, fresh] = templates.try_emplace(e);
      if (fresh) it->second = EdgeTemplate{e, 1, std::vector<std::vector<int>>(phi, std::vector<int>{-1})};
      it->second.table[t % phi][0] = ts.id;
    }
    ts.depart = ts.hops.front().time;
    ts.delay = ts.hops.back().time + 1 - ts.depart;
    s.sequences.push_back(ts);
  }
  for (auto& [e, t] : templates) s.templates.push_back(t);
  std::map<int, std::vector<int>> by_commodity;
  for (const TokenSequence& ts : s.sequences) by_commodity[ts.commodity].push_back(ts.id);
  for (auto& [c, ids] : by_commodity) {
    std::stable_sort(ids.begin(), ids.end(),
                     [&](int a, int b) { return s.sequences[a].depart < s.sequences[b].depart; });
    Session session;
    session.commodity = c;
    session.src = g.edges()[s.sequences[ids.front()].path.front()].src;
    session.dst = g.edges()[s.sequences[ids.front()].path.back()].dst;
    session.slots_per_period = static_cast<std::int64_t>(ids.size());
    session.sequences = ids;
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const TokenSequence& a = s.sequences[ids[r]];
      const TokenSequence& b = s.sequences[ids[(r + 1) % ids.size()]];
      const std::int64_t wrap = r + 1 == ids.size() ? phi : 0;
      session.reorder_gaps.push_back(b.depart + b.delay + wrap - (a.depart + a.delay));
    }
    s.sessions.push_back(session);
  }
  return s;
}

}  // namespace fixture
