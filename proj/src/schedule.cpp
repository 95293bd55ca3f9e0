// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "nocweave/error.hpp"

namespace nocweave {

std::vector<RoundedPathFlow> round_flows(const std::vector<Commodity>& commodities,
                                         const std::vector<PathFlow>& path_flows, int phi) {
  if (phi < 1) throw Error("period must be at least one slot");
  std::vector<std::vector<const PathFlow*>> by_commodity(commodities.size());
  for (const PathFlow& p : path_flows) {
    if (p.commodity < 0 || p.commodity >= static_cast<int>(commodities.size())) {
      throw Error("path flow for unknown commodity " + std::to_string(p.commodity));
    }
    by_commodity[p.commodity].push_back(&p);
  }
  std::vector<RoundedPathFlow> out;
  for (const Commodity& c : commodities) {
    auto& paths = by_commodity[c.id];
    if (paths.empty() && c.demand > 0) {
      throw Error("commodity " + std::to_string(c.id) + " has demand but no flow paths");
    }
    std::stable_sort(paths.begin(), paths.end(),
                     [](const PathFlow* a, const PathFlow* b) { return a->amount > b->amount; });
    Rational remaining = c.demand;
    for (const PathFlow* p : paths) {
      if (remaining <= 0) break;
      std::int64_t slots = ceil_to_int64(p->amount * phi);
      if (slots == 0) continue;
      out.push_back(RoundedPathFlow{c.id, p->path, slots});
      remaining -= Rational(slots, phi);
    }
    if (remaining > 0) {
      throw Error("paths of commodity " + std::to_string(c.id) + " do not cover its demand");
    }
  }
  return out;
}

EdgeLoads assign_widths(NocGraph& graph, const std::vector<RoundedPathFlow>& rounded, int phi) {
  EdgeLoads loads;
  loads.load.assign(graph.edge_count(), Rational(0));
  loads.lanes.assign(graph.edge_count(), 0);
  for (const RoundedPathFlow& r : rounded) {
    for (int e : r.path) loads.load[e] += r.amount(phi);
  }
  for (int e = 0; e < graph.edge_count(); ++e) {
    loads.lanes[e] = static_cast<int>(ceil_to_int64(loads.load[e]));
    graph.edges()[e].width_bits = static_cast<std::int64_t>(loads.lanes[e]) * graph.flit_bits();
  }
  return loads;
}

const EdgeTemplate* PeriodicSchedule::find_template(int edge) const {
  auto it = std::lower_bound(templates.begin(), templates.end(), edge,
                             [](const EdgeTemplate& t, int e) { return t.edge < e; });
  return it != templates.end() && it->edge == edge ? &*it : nullptr;
}

namespace {

struct PendingSequence {
  int id;
  int commodity;
  const std::vector<int>* path;
};

class SlotTable {
 public:
  SlotTable(int phi, const std::vector<int>& lanes) : phi_(phi), lanes_(lanes), cells_(lanes.size()) {
    for (std::size_t e = 0; e < lanes.size(); ++e) {
      cells_[e].assign(static_cast<std::size_t>(phi) * lanes[e], -1);
    }
  }

  int free_lane(int edge, int slot) const {
    for (int l = 0; l < lanes_[edge]; ++l) {
      if (cells_[edge][slot * lanes_[edge] + l] < 0) return l;
    }
    return -1;
  }

  void take(int edge, int slot, int lane, int id) { cells_[edge][slot * lanes_[edge] + lane] = id; }
  int at(int edge, int slot, int lane) const { return cells_[edge][slot * lanes_[edge] + lane]; }

 private:
  int phi_;
  const std::vector<int>& lanes_;
  std::vector<std::vector<int>> cells_;
};

// Earliest-slot walk for a fixed departure; empty when a hop finds no slot.
std::optional<std::vector<HopSlot>> walk(const SlotTable& table, const std::vector<int>& path, int phi, int depart) {
  std::vector<HopSlot> hops;
  hops.reserve(path.size());
  std::int64_t time = depart;
  for (std::size_t i = 0; i < path.size(); ++i) {
    bool found = false;
    const std::int64_t first = i == 0 ? depart : time + 1;
    const std::int64_t last = i == 0 ? depart : time + phi;
    for (std::int64_t t = first; t <= last; ++t) {
      int slot = static_cast<int>(t % phi);
      int lane = table.free_lane(path[i], slot);
      if (lane >= 0) {
        hops.push_back(HopSlot{slot, lane, t});
        time = t;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return hops;
}

std::optional<std::vector<TokenSequence>> greedy_pass(const std::vector<PendingSequence>& order, int phi,
                                                      const std::vector<int>& lanes, std::string& failure) {
  SlotTable table(phi, lanes);
  std::vector<TokenSequence> placed;
  placed.reserve(order.size());
  for (const PendingSequence& p : order) {
    std::optional<std::vector<HopSlot>> best;
    std::int64_t best_delay = 0;
    for (int depart = 0; depart < phi; ++depart) {
      auto hops = walk(table, *p.path, phi, depart);
      if (!hops) continue;
      std::int64_t delay = hops->back().time + 1 - depart;
      if (!best || delay < best_delay) {
        best = std::move(hops);
        best_delay = delay;
      }
    }
    if (!best) {
      failure = "no free slot for token sequence " + std::to_string(p.id) + " of commodity " +
                std::to_string(p.commodity);
      return std::nullopt;
    }
    for (std::size_t i = 0; i < best->size(); ++i) {
      table.take((*p.path)[i], (*best)[i].slot, (*best)[i].lane, p.id);
    }
    TokenSequence ts;
    ts.id = p.id;
    ts.commodity = p.commodity;
    ts.path = *p.path;
    ts.depart = best->front().time;
    ts.delay = best_delay;
    ts.hops = std::move(*best);
    placed.push_back(std::move(ts));
  }
  return placed;
}

std::vector<std::int64_t> gaps_for(const std::vector<const TokenSequence*>& ordered, int phi) {
  std::vector<std::int64_t> gaps;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const TokenSequence& cur = *ordered[i];
    const TokenSequence& next = *ordered[(i + 1) % ordered.size()];
    std::int64_t wrap = i + 1 == ordered.size() ? phi : 0;
    gaps.push_back(next.depart + next.delay + wrap - (cur.depart + cur.delay));
  }
  return gaps;
}

void build_sessions(PeriodicSchedule& schedule, const std::vector<Commodity>& commodities) {
  std::vector<std::vector<const TokenSequence*>> by_commodity(commodities.size());
  for (const TokenSequence& ts : schedule.sequences) by_commodity.at(ts.commodity).push_back(&ts);
  schedule.sessions.clear();
  for (const Commodity& c : commodities) {
    auto& list = by_commodity[c.id];
    if (list.empty()) continue;
    std::sort(list.begin(), list.end(), [](const TokenSequence* a, const TokenSequence* b) {
      return std::pair(a->depart, a->id) < std::pair(b->depart, b->id);
    });
    Session s;
    s.commodity = c.id;
    s.src = c.src;
    s.dst = c.dst;
    s.slots_per_period = static_cast<std::int64_t>(list.size());
    for (const TokenSequence* ts : list) s.sequences.push_back(ts->id);
    s.reorder_gaps = gaps_for(list, schedule.phi);
    schedule.sessions.push_back(std::move(s));
  }
}

}  // namespace

PeriodicSchedule allocate_slots(const std::vector<Commodity>& commodities,
                                const std::vector<RoundedPathFlow>& rounded, int phi,
                                const std::vector<int>& lanes) {
  if (phi < 1) throw Error("period must be at least one slot");
  std::vector<std::int64_t> demand_on_edge(lanes.size(), 0);
  std::vector<PendingSequence> order;
  std::vector<std::size_t> path_length;
  // Canonical order: rounded flows are grouped by commodity, paths in order.
  std::vector<const RoundedPathFlow*> sorted;
  for (const RoundedPathFlow& r : rounded) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const RoundedPathFlow* a, const RoundedPathFlow* b) {
    return a->commodity < b->commodity;
  });
  for (const RoundedPathFlow* r : sorted) {
    if (r->commodity < 0 || r->commodity >= static_cast<int>(commodities.size())) {
      throw Error("rounded flow for unknown commodity");
    }
    for (int e : r->path) {
      if (e < 0 || e >= static_cast<int>(lanes.size())) throw Error("path edge out of range");
      demand_on_edge[e] += r->slots_per_period;
    }
    for (std::int64_t k = 0; k < r->slots_per_period; ++k) {
      order.push_back(PendingSequence{static_cast<int>(order.size()), r->commodity, &r->path});
    }
  }
  for (std::size_t e = 0; e < lanes.size(); ++e) {
    if (demand_on_edge[e] > static_cast<std::int64_t>(phi) * lanes[e]) {
      throw Error("edge " + std::to_string(e) + " needs " + std::to_string(demand_on_edge[e]) +
                  " slot-lanes but offers " + std::to_string(static_cast<std::int64_t>(phi) * lanes[e]));
    }
  }

  std::string failure;
  auto placed = greedy_pass(order, phi, lanes, failure);
  if (!placed) {
    auto retry = order;
    std::stable_sort(retry.begin(), retry.end(), [](const PendingSequence& a, const PendingSequence& b) {
      return a.path->size() > b.path->size();
    });
    placed = greedy_pass(retry, phi, lanes, failure);
    if (!placed) throw InfeasibleError("scheduling failure: " + failure);
    std::sort(placed->begin(), placed->end(),
              [](const TokenSequence& a, const TokenSequence& b) { return a.id < b.id; });
  }

  PeriodicSchedule schedule;
  schedule.phi = phi;
  schedule.sequences = std::move(*placed);
  for (std::size_t e = 0; e < lanes.size(); ++e) {
    if (lanes[e] == 0) continue;
    EdgeTemplate t;
    t.edge = static_cast<int>(e);
    t.lanes = lanes[e];
    t.table.assign(phi, std::vector<int>(lanes[e], -1));
    schedule.templates.push_back(std::move(t));
  }
  for (const TokenSequence& ts : schedule.sequences) {
    for (std::size_t i = 0; i < ts.path.size(); ++i) {
      auto* t = const_cast<EdgeTemplate*>(schedule.find_template(ts.path[i]));
      t->table[ts.hops[i].slot][ts.hops[i].lane] = ts.id;
    }
  }
  build_sessions(schedule, commodities);
  return schedule;
}

ScheduleCheck validate_schedule(const PeriodicSchedule& schedule, const NocGraph& graph) {
  auto fail = [](std::string msg) { return ScheduleCheck{false, std::move(msg)}; };
  const int phi = schedule.phi;
  if (phi < 1) return fail("period must be positive");
  for (std::size_t i = 0; i < schedule.templates.size(); ++i) {
    const EdgeTemplate& t = schedule.templates[i];
    if (t.edge < 0 || t.edge >= graph.edge_count()) return fail("template for unknown edge");
    if (i > 0 && schedule.templates[i - 1].edge >= t.edge) return fail("templates not ordered by edge");
    if (static_cast<int>(t.table.size()) != phi) return fail("template of edge " + std::to_string(t.edge) + " is not phi rows");
    for (const auto& row : t.table) {
      if (static_cast<int>(row.size()) != t.lanes) return fail("template row width differs from lane count");
    }
    const std::int64_t width = graph.edges()[t.edge].width_bits;
    if (width != 0 && width != static_cast<std::int64_t>(t.lanes) * graph.flit_bits()) {
      return fail("lanes of edge " + std::to_string(t.edge) + " disagree with its width");
    }
  }
  std::map<int, std::int64_t> per_commodity;
  std::vector<std::int64_t> per_edge(graph.edge_count(), 0);
  for (std::size_t i = 0; i < schedule.sequences.size(); ++i) {
    const TokenSequence& ts = schedule.sequences[i];
    const std::string name = "token sequence " + std::to_string(ts.id);
    if (ts.id != static_cast<int>(i)) return fail("sequence ids must be dense and ordered");
    if (ts.path.empty() || ts.hops.size() != ts.path.size()) return fail(name + " has mismatched hops");
    for (std::size_t h = 0; h < ts.hops.size(); ++h) {
      const HopSlot& hop = ts.hops[h];
      if (hop.time < 0 || hop.slot != hop.time % phi) return fail(name + " hop slot disagrees with its time");
      if (h > 0) {
        std::int64_t step = hop.time - ts.hops[h - 1].time;
        if (step < 1) return fail("precedence violation in " + name + " at hop " + std::to_string(h));
        if (step > phi) return fail(name + " waits longer than a period at hop " + std::to_string(h));
        if (graph.edges()[ts.path[h - 1]].dst != graph.edges()[ts.path[h]].src) {
          return fail(name + " path is not contiguous");
        }
      }
    }
    if (ts.depart != ts.hops.front().time || ts.depart >= phi) return fail(name + " departure slot is inconsistent");
    if (ts.delay != ts.hops.back().time + 1 - ts.depart) return fail(name + " delay is inconsistent");
    for (std::size_t h = 0; h < ts.hops.size(); ++h) {
      const EdgeTemplate* t = schedule.find_template(ts.path[h]);
      if (t == nullptr || ts.hops[h].lane < 0 || ts.hops[h].lane >= t->lanes) {
        return fail(name + " uses a lane its edge does not have");
      }
      int owner = t->table[ts.hops[h].slot][ts.hops[h].lane];
      if (owner != ts.id) {
        return fail("double-booking on edge " + std::to_string(ts.path[h]) + " slot " +
                    std::to_string(ts.hops[h].slot) + " lane " + std::to_string(ts.hops[h].lane));
      }
      ++per_edge[ts.path[h]];
    }
    ++per_commodity[ts.commodity];
  }
  // Every template entry is owned by exactly one hop.
  for (const EdgeTemplate& t : schedule.templates) {
    std::int64_t used = 0;
    for (const auto& row : t.table) {
      for (int id : row) {
        if (id < 0) continue;
        if (id >= static_cast<int>(schedule.sequences.size())) return fail("template names an unknown sequence");
        ++used;
      }
    }
    if (used != per_edge[t.edge]) {
      return fail("double-booking in template of edge " + std::to_string(t.edge));
    }
    if (per_edge[t.edge] > static_cast<std::int64_t>(phi) * t.lanes) {
      return fail("congestion exceeded on edge " + std::to_string(t.edge));
    }
  }
  for (int e = 0; e < graph.edge_count(); ++e) {
    if (per_edge[e] > 0 && schedule.find_template(e) == nullptr) return fail("edge without template carries traffic");
  }
  for (const Session& s : schedule.sessions) {
    auto it = per_commodity.find(s.commodity);
    std::int64_t count = it == per_commodity.end() ? 0 : it->second;
    if (count != s.slots_per_period || static_cast<std::int64_t>(s.sequences.size()) != count) {
      return fail("commodity " + std::to_string(s.commodity) + " has " + std::to_string(count) +
                  " token sequences, expected " + std::to_string(s.slots_per_period));
    }
    std::vector<const TokenSequence*> ordered;
    for (int id : s.sequences) {
      if (id < 0 || id >= static_cast<int>(schedule.sequences.size())) return fail("session names an unknown sequence");
      const TokenSequence& ts = schedule.sequences[id];
      if (ts.commodity != s.commodity) return fail("session lists a foreign sequence");
      if (graph.edges()[ts.path.front()].src != s.src || graph.edges()[ts.path.back()].dst != s.dst) {
        return fail("sequence " + std::to_string(id) + " does not connect its session endpoints");
      }
      if (!ordered.empty() && std::pair(ordered.back()->depart, ordered.back()->id) > std::pair(ts.depart, ts.id)) {
        return fail("session sequences not ordered by departure");
      }
      ordered.push_back(&ts);
    }
    if (gaps_for(ordered, phi) != s.reorder_gaps) {
      return fail("reorder gaps of commodity " + std::to_string(s.commodity) + " are inconsistent");
    }
    per_commodity.erase(s.commodity);
  }
  if (!per_commodity.empty()) return fail("token sequences for a commodity without a session");
  return {};
}

std::map<int, std::int64_t> predict_latencies(const PeriodicSchedule& schedule) {
  std::map<int, std::int64_t> out;
  for (const TokenSequence& ts : schedule.sequences) {
    if (ts.hops.empty()) continue;
    out[ts.id] = ts.hops.back().time + 1 - ts.hops.front().time;
  }
  return out;
}

nlohmann::json to_json(const PeriodicSchedule& schedule) {
  nlohmann::json edges = nlohmann::json::array();
  for (const EdgeTemplate& t : schedule.templates) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.table) {
      nlohmann::json cells = nlohmann::json::array();
      for (int id : row) cells.push_back(id < 0 ? nlohmann::json(nullptr) : nlohmann::json(id));
      rows.push_back(std::move(cells));
    }
    edges.push_back({{"edge", t.edge}, {"lanes", t.lanes}, {"template", rows}});
  }
  nlohmann::json sequences = nlohmann::json::array();
  for (const TokenSequence& ts : schedule.sequences) {
    nlohmann::json hops = nlohmann::json::array();
    for (const HopSlot& h : ts.hops) hops.push_back({{"slot", h.slot}, {"lane", h.lane}, {"time", h.time}});
    sequences.push_back({{"id", ts.id},
                         {"commodity", ts.commodity},
                         {"path", ts.path},
                         {"hops", hops},
                         {"t", ts.depart},
                         {"D", ts.delay}});
  }
  nlohmann::json sessions = nlohmann::json::array();
  nlohmann::json gaps = nlohmann::json::object();
  for (const Session& s : schedule.sessions) {
    sessions.push_back({{"commodity", s.commodity},
                        {"src", s.src},
                        {"dst", s.dst},
                        {"slots_per_period", s.slots_per_period},
                        {"sequences", s.sequences}});
    gaps[std::to_string(s.commodity)] = s.reorder_gaps;
  }
  return {{"phi", schedule.phi},
          {"edges", edges},
          {"sequences", sequences},
          {"sessions", sessions},
          {"reorder_gaps", gaps}};
}

PeriodicSchedule schedule_from_json(const nlohmann::json& j) {
  PeriodicSchedule s;
  s.phi = j.at("phi").get<int>();
  for (const auto& je : j.at("edges")) {
    EdgeTemplate t;
    t.edge = je.at("edge").get<int>();
    t.lanes = je.at("lanes").get<int>();
    for (const auto& row : je.at("template")) {
      std::vector<int> cells;
      for (const auto& cell : row) cells.push_back(cell.is_null() ? -1 : cell.get<int>());
      t.table.push_back(std::move(cells));
    }
    s.templates.push_back(std::move(t));
  }
  for (const auto& jt : j.at("sequences")) {
    TokenSequence ts;
    ts.id = jt.at("id").get<int>();
    ts.commodity = jt.at("commodity").get<int>();
    ts.path = jt.at("path").get<std::vector<int>>();
    for (const auto& jh : jt.at("hops")) {
      ts.hops.push_back(HopSlot{jh.at("slot").get<int>(), jh.at("lane").get<int>(), jh.at("time").get<std::int64_t>()});
    }
    ts.depart = jt.at("t").get<std::int64_t>();
    ts.delay = jt.at("D").get<std::int64_t>();
    s.sequences.push_back(std::move(ts));
  }
  const auto& gaps = j.at("reorder_gaps");
  for (const auto& js : j.at("sessions")) {
    Session session;
    session.commodity = js.at("commodity").get<int>();
    session.src = js.at("src").get<int>();
    session.dst = js.at("dst").get<int>();
    session.slots_per_period = js.at("slots_per_period").get<std::int64_t>();
    session.sequences = js.at("sequences").get<std::vector<int>>();
    session.reorder_gaps = gaps.at(std::to_string(session.commodity)).get<std::vector<std::int64_t>>();
    s.sessions.push_back(std::move(session));
  }
  return s;
}

nlohmann::json rounded_to_json(const std::vector<RoundedPathFlow>& rounded, int phi) {
  nlohmann::json paths = nlohmann::json::array();
  for (const RoundedPathFlow& r : rounded) {
    paths.push_back({{"commodity", r.commodity},
                     {"path", r.path},
                     {"slots_per_period", r.slots_per_period},
                     {"amount", format_rational(r.amount(phi))}});
  }
  return {{"phi", phi}, {"paths", paths}};
}

std::vector<RoundedPathFlow> rounded_from_json(const nlohmann::json& j) {
  std::vector<RoundedPathFlow> out;
  for (const auto& jp : j.at("paths")) {
    out.push_back(RoundedPathFlow{jp.at("commodity").get<int>(), jp.at("path").get<std::vector<int>>(),
                                  jp.at("slots_per_period").get<std::int64_t>()});
  }
  return out;
}

}  // namespace nocweave
