// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "nocweave/demands.hpp"
#include "nocweave/graph.hpp"
#include "nocweave/rational.hpp"
#include "nocweave/schedule.hpp"
#include "nocweave/tcg.hpp"

namespace nocweave {

/// Memory cell of a switch: row is the arrival slot mod phi, port is 1-based.
struct MemoryAddress {
  int row = 0;
  int port = 1;

  friend bool operator==(const MemoryAddress&, const MemoryAddress&) = default;
};

struct InputPort {
  int edge = 0;
  int lane = 0;
};

struct OutputControl {
  int edge = 0;
  int lane = 0;
  std::vector<std::optional<MemoryAddress>> control;  // indexed by slot
};

struct SwitchConfig {
  int node = 0;
  int din = 0;
  std::vector<InputPort> ports;        // port p is ports[p - 1]
  std::vector<OutputControl> outputs;  // ordered by (edge, lane)
  std::int64_t pass_through_cells = 0; // cells whose flit leaves in the next slot
  std::int64_t memory_cells = 0;       // phi * din minus pass-through cells
};

/// A scheduled injection or ejection at an NI.
struct NiEntry {
  int slot = 0;
  int lane = 0;
  int commodity = 0;
  int rank = 0;      // position of the sequence in its session
  int sequence = 0;
};

struct NiSessionIn {
  int commodity = 0;
  int src = 0;
  std::int64_t first_arrival = 0;         // t + D of rank 0
  std::vector<std::int64_t> reorder_gaps;
};

struct NiSessionOut {
  int commodity = 0;
  int dst = 0;
  std::int64_t slots_per_period = 0;
};

struct NiConfig {
  int pe = 0;
  int injection_edge = 0;
  int ejection_edge = 0;
  std::vector<NiEntry> outgoing;  // ordered by (slot, commodity, rank)
  std::vector<NiEntry> incoming;  // ordered by (slot, lane)
  std::vector<NiSessionOut> sessions_out;
  std::vector<NiSessionIn> sessions_in;
};

struct ControlTables {
  int phi = 8;
  int flit_bits = 4;
  std::vector<SwitchConfig> switches;  // ordered by node
  std::vector<NiConfig> nis;           // ordered by PE
};

ControlTables emit_controls(const PeriodicSchedule& schedule, const NocGraph& graph);

nlohmann::json to_json(const ControlTables& controls);
ControlTables controls_from_json(const nlohmann::json& j);

/// Steady traffic keeps every session backlogged: each period starts by
/// queueing as many flits as the session has slots.
struct SteadyTraffic {
  std::int64_t horizon = 0;
};

struct TcgTraffic {
  const Tcg* tcg = nullptr;  // mapped, possibly unrolled
  std::int64_t horizon = 0;
};

struct FlitRecord {
  int commodity = 0;
  int sequence = 0;
  int message = -1;            // TCG message carried, if any
  std::int64_t injected = 0;   // slot of the first hop
  std::int64_t arrived = -1;   // end of the slot of the last hop
  std::int64_t delivered = -1; // release time after reordering
};

struct SimReport {
  std::int64_t horizon = 0;
  std::int64_t slots_run = 0;
  std::vector<FlitRecord> flits;  // in injection order
  std::vector<std::int64_t> edge_flits;  // transmissions in [0, horizon)
  std::vector<Rational> edge_utilization;
  std::map<int, std::int64_t> max_occupancy;  // switch -> flits
  std::map<int, Rational> task_end;
  std::int64_t scheduled_slots = 0;  // session slots in [0, horizon)
  std::int64_t used_slots = 0;
  bool in_order = true;

  /// Fraction of scheduled session slots that carried a flit.
  Rational utilization() const;
};

/// Slot-by-slot execution driven only by the control tables. Traffic enters
/// during [0, horizon); the run then drains until every injected flit is
/// delivered (and, for a TCG, every task has finished).
SimReport simulate(const NocGraph& graph, const ControlTables& controls, const SteadyTraffic& traffic);
SimReport simulate(const NocGraph& graph, const ControlTables& controls, const TcgTraffic& traffic);

}  // namespace nocweave
