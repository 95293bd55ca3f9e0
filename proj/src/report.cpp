// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "nocweave/error.hpp"

namespace nocweave {

Rational SimSummary::utilization() const {
  if (scheduled_slots == 0) return Rational(0);
  return Rational(used_slots, scheduled_slots);
}

SimSummary summarize(const SimReport& sim, const PeriodicSchedule& schedule) {
  SimSummary s;
  s.horizon = sim.horizon;
  s.slots_run = sim.slots_run;
  s.flits = static_cast<std::int64_t>(sim.flits.size());
  s.in_order = sim.in_order;
  s.scheduled_slots = sim.scheduled_slots;
  s.used_slots = sim.used_slots;
  s.max_occupancy = sim.max_occupancy;
  s.task_end = sim.task_end;
  const auto predicted = predict_latencies(schedule);
  for (const FlitRecord& f : sim.flits) {
    if (f.delivered >= 0) ++s.delivered;
    if (f.arrived < 0) continue;
    const std::int64_t latency = f.arrived - f.injected;
    ++s.latency_histogram[latency];
    auto it = predicted.find(f.sequence);
    if (it == predicted.end() || it->second != latency) ++s.latency_mismatches;
  }
  for (const Rational& u : sim.edge_utilization) s.edge_utilization.push_back(format_rational(u));
  return s;
}

nlohmann::json to_json(const SimSummary& s) {
  nlohmann::json hist = nlohmann::json::array();
  for (auto [latency, count] : s.latency_histogram) hist.push_back({latency, count});
  nlohmann::json occ = nlohmann::json::array();
  for (auto [node, flits] : s.max_occupancy) occ.push_back({node, flits});
  nlohmann::json ends = nlohmann::json::array();
  for (const auto& [task, end] : s.task_end) ends.push_back({task, format_rational(end)});
  return {{"horizon", s.horizon},
          {"slots_run", s.slots_run},
          {"flits", s.flits},
          {"delivered", s.delivered},
          {"latency_mismatches", s.latency_mismatches},
          {"in_order", s.in_order},
          {"latency_histogram", hist},
          {"scheduled_slots", s.scheduled_slots},
          {"used_slots", s.used_slots},
          {"max_occupancy", occ},
          {"edge_utilization", s.edge_utilization},
          {"task_end", ends}};
}

SimSummary sim_summary_from_json(const nlohmann::json& j) {
  SimSummary s;
  s.horizon = j.at("horizon").get<std::int64_t>();
  s.slots_run = j.at("slots_run").get<std::int64_t>();
  s.flits = j.at("flits").get<std::int64_t>();
  s.delivered = j.at("delivered").get<std::int64_t>();
  s.latency_mismatches = j.at("latency_mismatches").get<std::int64_t>();
  s.in_order = j.at("in_order").get<bool>();
  for (const auto& h : j.at("latency_histogram")) s.latency_histogram[h.at(0).get<std::int64_t>()] = h.at(1).get<std::int64_t>();
  s.scheduled_slots = j.at("scheduled_slots").get<std::int64_t>();
  s.used_slots = j.at("used_slots").get<std::int64_t>();
  for (const auto& o : j.at("max_occupancy")) s.max_occupancy[o.at(0).get<int>()] = o.at(1).get<std::int64_t>();
  s.edge_utilization = j.at("edge_utilization").get<std::vector<std::string>>();
  for (const auto& e : j.at("task_end")) s.task_end[e.at(0).get<int>()] = parse_rational(e.at(1).get<std::string>());
  return s;
}

LagSummary summarize_lags(const Tcg& base, int iterations, const TimingSpec& spec,
                          const std::map<int, Rational>& observed) {
  const LagReport lags = compute_lags(spec, observed);
  LagSummary out;
  out.sum_lag = lags.sum_lag;
  out.max_lag = lags.max_lag;
  if (iterations < 3) return out;
  const int stride = unrolled_stride(base);
  for (const Task& t : base.tasks) {
    std::vector<Rational> series;
    for (int i = 0; i < iterations; ++i) series.push_back(lags.lag.at(i * stride + t.id));
    DriftResult d = detect_drift(series);
    Rational magnitude = d.slope < 0 ? Rational(-d.slope) : d.slope;
    out.max_abs_slope = std::max(out.max_abs_slope, magnitude);
    if (d.kind == DriftKind::Drift) out.drift = true;
  }
  return out;
}

Rational rounding_overhead(const std::vector<Commodity>& commodities, const std::vector<RoundedPathFlow>& rounded,
                           int phi) {
  Rational fractional(0);
  Rational whole(0);
  for (const Commodity& c : commodities) fractional += c.demand;
  for (const RoundedPathFlow& r : rounded) whole += r.amount(phi);
  if (fractional == 0) return Rational(0);
  return (whole - fractional) / fractional;
}

ReportRow make_report(const std::string& topology, const NocGraph& sized_graph, const DemandMatrix& demands,
                      const std::vector<Commodity>& commodities, const std::vector<RoundedPathFlow>& rounded,
                      const ControlTables& controls, const SimSummary& sim, std::optional<LagSummary> lags) {
  ReportRow row;
  row.topology = topology;
  row.pes = sized_graph.pe_count();
  for (const Edge& e : sized_graph.edges()) row.wire_cost += e.cost * static_cast<double>(e.width_bits);
  for (const SwitchConfig& sw : controls.switches) row.memory_bits += sw.memory_cells * controls.flit_bits;
  std::int64_t count = 0;
  Rational total(0);
  for (auto [latency, n] : sim.latency_histogram) {
    total += Rational(latency * n);
    count += n;
    row.max_latency = std::max(row.max_latency, latency);
  }
  row.avg_latency = count > 0 ? Rational(total / count) : Rational(0);
  row.avg_utilization = sim.utilization();
  if (!demands.pairs.empty()) row.utilization_bound = utilization_bound(demands);
  row.rounding_overhead = rounding_overhead(commodities, rounded, controls.phi);
  row.lags = std::move(lags);
  return row;
}

namespace {

std::string decimal(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", to_double(r));
  return buf;
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "topology,pes,wire_cost,memory_bits,avg_latency,max_latency,avg_utilization,utilization_bound,"
         "rounding_overhead_pct,sum_lag,max_lag\n";
  for (const ReportRow& r : rows) {
    char wire[64];
    std::snprintf(wire, sizeof wire, "%.6f", r.wire_cost);
    out << r.topology << ',' << r.pes << ',' << wire << ',' << r.memory_bits << ',' << decimal(r.avg_latency) << ','
        << r.max_latency << ',' << decimal(r.avg_utilization) << ','
        << (r.utilization_bound ? decimal(*r.utilization_bound) : "") << ','
        << decimal(r.rounding_overhead * 100) << ',' << (r.lags ? decimal(r.lags->sum_lag) : "") << ','
        << (r.lags ? decimal(r.lags->max_lag) : "") << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ReportRow& r) {
  nlohmann::json j{{"topology", r.topology},
                   {"pes", r.pes},
                   {"wire_cost", r.wire_cost},
                   {"memory_bits", r.memory_bits},
                   {"avg_latency", format_rational(r.avg_latency)},
                   {"max_latency", r.max_latency},
                   {"avg_utilization", format_rational(r.avg_utilization)},
                   {"rounding_overhead", format_rational(r.rounding_overhead)}};
  j["utilization_bound"] = r.utilization_bound ? nlohmann::json(format_rational(*r.utilization_bound)) : nlohmann::json();
  if (r.lags) {
    j["lags"] = {{"sum_lag", format_rational(r.lags->sum_lag)},
                 {"max_lag", format_rational(r.lags->max_lag)},
                 {"max_abs_drift_slope", format_rational(r.lags->max_abs_slope)},
                 {"drift", r.lags->drift}};
  }
  return j;
}

}  // namespace nocweave
