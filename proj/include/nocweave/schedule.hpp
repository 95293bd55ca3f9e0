// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nocweave/graph.hpp"
#include "nocweave/mcf.hpp"
#include "nocweave/rational.hpp"

namespace nocweave {

/// A flow path whose amount is a whole number of slots per period.
struct RoundedPathFlow {
  int commodity = 0;
  std::vector<int> path;
  std::int64_t slots_per_period = 0;

  Rational amount(int phi) const { return Rational(slots_per_period, phi); }
};

/// Rounds each commodity's paths (largest first) up to multiples of 1/phi
/// until the demand is covered; the remaining paths are dropped.
std::vector<RoundedPathFlow> round_flows(const std::vector<Commodity>& commodities,
                                         const std::vector<PathFlow>& path_flows, int phi);

struct EdgeLoads {
  std::vector<Rational> load;  // f'(e), flits per slot after rounding
  std::vector<int> lanes;      // ceil(f'(e))
};

/// Sets every edge width to ceil(f'(e)) flits; unused edges get width 0.
EdgeLoads assign_widths(NocGraph& graph, const std::vector<RoundedPathFlow>& rounded, int phi);

struct HopSlot {
  int slot = 0;            // time mod phi
  int lane = 0;
  std::int64_t time = 0;   // unrolled slot relative to the departure period
};

/// One reserved (slot, lane) per hop; carries one flit per period.
struct TokenSequence {
  int id = 0;
  int commodity = 0;
  std::vector<int> path;
  std::vector<HopSlot> hops;
  std::int64_t depart = 0;  // t_i, slot of the first hop
  std::int64_t delay = 0;   // D_i, last hop time + 1 - t_i
};

/// Per-edge table of phi rows by `lanes` columns; -1 marks an idle entry.
struct EdgeTemplate {
  int edge = 0;
  int lanes = 0;
  std::vector<std::vector<int>> table;
};

struct Session {
  int commodity = 0;
  int src = 0;
  int dst = 0;
  std::int64_t slots_per_period = 0;
  std::vector<int> sequences;  // ids ordered by (depart, id)
  /// Arrival spacing between consecutive sequences in that order; the last
  /// entry wraps around to the first sequence of the next period, so the
  /// gaps sum to phi.
  std::vector<std::int64_t> reorder_gaps;
};

struct PeriodicSchedule {
  int phi = 8;
  std::vector<EdgeTemplate> templates;  // used edges only, ordered by edge
  std::vector<TokenSequence> sequences;  // ordered by id
  std::vector<Session> sessions;         // ordered by commodity

  const EdgeTemplate* find_template(int edge) const;
};

/// Greedy slot allocation. Sequences are taken in (commodity, path, replica)
/// order; each one tries every departure slot, walks its path taking the
/// earliest free (slot, lane) per hop, and keeps the departure with the
/// smallest end-to-end delay. On failure the pass is repeated once with
/// longer paths first.
PeriodicSchedule allocate_slots(const std::vector<Commodity>& commodities,
                                const std::vector<RoundedPathFlow>& rounded, int phi,
                                const std::vector<int>& lanes);

struct ScheduleCheck {
  bool ok = true;
  std::string message;
};

ScheduleCheck validate_schedule(const PeriodicSchedule& schedule, const NocGraph& graph);

/// D_i for every token sequence, recomputed from its hop times.
std::map<int, std::int64_t> predict_latencies(const PeriodicSchedule& schedule);

nlohmann::json to_json(const PeriodicSchedule& schedule);
PeriodicSchedule schedule_from_json(const nlohmann::json& j);

nlohmann::json rounded_to_json(const std::vector<RoundedPathFlow>& rounded, int phi);
std::vector<RoundedPathFlow> rounded_from_json(const nlohmann::json& j);

}  // namespace nocweave
