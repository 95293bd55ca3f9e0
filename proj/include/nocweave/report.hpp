// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nocweave/demands.hpp"
#include "nocweave/fabric.hpp"
#include "nocweave/graph.hpp"
#include "nocweave/mcf.hpp"
#include "nocweave/rational.hpp"
#include "nocweave/schedule.hpp"
#include "nocweave/tcg.hpp"

namespace nocweave {

/// Condensed simulation outcome; everything the report needs and nothing
/// per-flit.
struct SimSummary {
  std::int64_t horizon = 0;
  std::int64_t slots_run = 0;
  std::int64_t flits = 0;
  std::int64_t delivered = 0;
  std::int64_t latency_mismatches = 0;  // network latency differs from D of the sequence
  bool in_order = true;
  std::map<std::int64_t, std::int64_t> latency_histogram;  // network latency -> flits
  std::int64_t scheduled_slots = 0;
  std::int64_t used_slots = 0;
  std::map<int, std::int64_t> max_occupancy;  // switch -> flits
  std::vector<std::string> edge_utilization;  // exact, per edge
  std::map<int, Rational> task_end;

  Rational utilization() const;
};

SimSummary summarize(const SimReport& sim, const PeriodicSchedule& schedule);

nlohmann::json to_json(const SimSummary& summary);
SimSummary sim_summary_from_json(const nlohmann::json& j);

struct LagSummary {
  Rational sum_lag;
  Rational max_lag;
  Rational max_abs_slope;  // over per-task lag sequences across iterations
  bool drift = false;
};

/// Lags of every task instance, plus drift of each task's lag across the
/// unrolled iterations (needs at least three).
LagSummary summarize_lags(const Tcg& base, int iterations, const TimingSpec& spec,
                          const std::map<int, Rational>& observed);

struct ReportRow {
  std::string topology;
  int pes = 0;
  double wire_cost = 0;          // sum of length * width in bits
  std::int64_t memory_bits = 0;
  Rational avg_latency;
  std::int64_t max_latency = 0;
  Rational avg_utilization;
  std::optional<Rational> utilization_bound;
  Rational rounding_overhead;    // (rounded - fractional) / fractional
  std::optional<LagSummary> lags;
};

ReportRow make_report(const std::string& topology, const NocGraph& sized_graph, const DemandMatrix& demands,
                      const std::vector<Commodity>& commodities, const std::vector<RoundedPathFlow>& rounded,
                      const ControlTables& controls, const SimSummary& sim, std::optional<LagSummary> lags);

/// Aggregate rounding overhead of a rounded routing against its commodities.
Rational rounding_overhead(const std::vector<Commodity>& commodities, const std::vector<RoundedPathFlow>& rounded,
                           int phi);

std::string report_csv(const std::vector<ReportRow>& rows);
nlohmann::json to_json(const ReportRow& row);

}  // namespace nocweave
