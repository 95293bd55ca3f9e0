// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/fabric.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <string>

#include "nocweave/error.hpp"

namespace nocweave {

ControlTables emit_controls(const PeriodicSchedule& schedule, const NocGraph& graph) {
  const int phi = schedule.phi;
  ControlTables out;
  out.phi = phi;
  out.flit_bits = graph.flit_bits();

  std::vector<int> lanes(graph.edge_count(), 0);
  for (const EdgeTemplate& t : schedule.templates) lanes.at(t.edge) = t.lanes;

  // Per switch: port numbering and output slots.
  std::map<int, std::size_t> switch_index;
  std::map<std::pair<int, int>, int> port_of;  // (edge, lane) -> 1-based port at the edge's head
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> output_of;  // (edge, lane) -> (switch, output)
  for (const Node& n : graph.nodes()) {
    if (n.kind == NodeKind::Pe) continue;
    SwitchConfig sw;
    sw.node = n.id;
    std::vector<int> in(graph.in_edges(n.id).begin(), graph.in_edges(n.id).end());
    std::sort(in.begin(), in.end());
    for (int e : in) {
      for (int l = 0; l < lanes[e]; ++l) {
        sw.ports.push_back(InputPort{e, l});
        port_of[{e, l}] = static_cast<int>(sw.ports.size());
      }
    }
    sw.din = static_cast<int>(sw.ports.size());
    std::vector<int> outs(graph.out_edges(n.id).begin(), graph.out_edges(n.id).end());
    std::sort(outs.begin(), outs.end());
    for (int e : outs) {
      for (int l = 0; l < lanes[e]; ++l) {
        output_of[{e, l}] = {out.switches.size(), sw.outputs.size()};
        sw.outputs.push_back(OutputControl{e, l, std::vector<std::optional<MemoryAddress>>(phi)});
      }
    }
    switch_index[n.id] = out.switches.size();
    out.switches.push_back(std::move(sw));
  }

  std::map<int, std::map<int, int>> rank_of;  // commodity -> sequence -> rank
  for (const Session& s : schedule.sessions) {
    for (std::size_t r = 0; r < s.sequences.size(); ++r) rank_of[s.commodity][s.sequences[r]] = static_cast<int>(r);
  }

  std::vector<std::set<std::pair<int, int>>> cells_used(out.switches.size());
  for (const TokenSequence& ts : schedule.sequences) {
    for (std::size_t h = 1; h < ts.path.size(); ++h) {
      const int in_edge = ts.path[h - 1];
      const int node = graph.edges()[in_edge].dst;
      auto sw_it = switch_index.find(node);
      if (sw_it == switch_index.end()) throw Error("token sequence " + std::to_string(ts.id) + " passes through a PE");
      auto port_it = port_of.find({in_edge, ts.hops[h - 1].lane});
      auto out_it = output_of.find({ts.path[h], ts.hops[h].lane});
      if (port_it == port_of.end() || out_it == output_of.end()) {
        throw Error("token sequence " + std::to_string(ts.id) + " uses a lane without template");
      }
      MemoryAddress addr{ts.hops[h - 1].slot, port_it->second};
      SwitchConfig& sw = out.switches[out_it->second.first];
      auto& entry = sw.outputs[out_it->second.second].control[ts.hops[h].slot];
      if (entry) {
        throw Error("control conflict at switch " + std::to_string(node) + " edge " + std::to_string(ts.path[h]) +
                    " slot " + std::to_string(ts.hops[h].slot));
      }
      if (!cells_used[sw_it->second].insert({addr.row, addr.port}).second) {
        throw Error("memory cell (" + std::to_string(addr.row) + "," + std::to_string(addr.port) + ") of switch " +
                    std::to_string(node) + " is shared by two token sequences");
      }
      entry = addr;
      if (ts.hops[h].time - ts.hops[h - 1].time == 1) ++sw.pass_through_cells;
    }
  }
  for (SwitchConfig& sw : out.switches) {
    sw.memory_cells = static_cast<std::int64_t>(phi) * sw.din - sw.pass_through_cells;
  }

  for (int p = 0; p < graph.pe_count(); ++p) {
    NiConfig ni;
    ni.pe = p;
    ni.injection_edge = graph.injection_edge(p);
    ni.ejection_edge = graph.ejection_edge(p);
    out.nis.push_back(std::move(ni));
  }
  for (const TokenSequence& ts : schedule.sequences) {
    const int rank = rank_of.at(ts.commodity).at(ts.id);
    const int src = graph.edges()[ts.path.front()].src;
    const int dst = graph.edges()[ts.path.back()].dst;
    out.nis.at(src).outgoing.push_back(NiEntry{ts.hops.front().slot, ts.hops.front().lane, ts.commodity, rank, ts.id});
    out.nis.at(dst).incoming.push_back(NiEntry{ts.hops.back().slot, ts.hops.back().lane, ts.commodity, rank, ts.id});
  }
  for (const Session& s : schedule.sessions) {
    out.nis.at(s.src).sessions_out.push_back(NiSessionOut{s.commodity, s.dst, s.slots_per_period});
    const TokenSequence& first = schedule.sequences.at(s.sequences.front());
    out.nis.at(s.dst).sessions_in.push_back(
        NiSessionIn{s.commodity, s.src, first.depart + first.delay, s.reorder_gaps});
  }
  for (NiConfig& ni : out.nis) {
    std::sort(ni.outgoing.begin(), ni.outgoing.end(), [](const NiEntry& a, const NiEntry& b) {
      return std::tie(a.slot, a.commodity, a.rank) < std::tie(b.slot, b.commodity, b.rank);
    });
    std::sort(ni.incoming.begin(), ni.incoming.end(),
              [](const NiEntry& a, const NiEntry& b) { return std::tie(a.slot, a.lane) < std::tie(b.slot, b.lane); });
  }
  return out;
}

nlohmann::json to_json(const ControlTables& controls) {
  nlohmann::json switches = nlohmann::json::array();
  for (const SwitchConfig& sw : controls.switches) {
    nlohmann::json ports = nlohmann::json::array();
    for (const InputPort& p : sw.ports) ports.push_back({{"edge", p.edge}, {"lane", p.lane}});
    nlohmann::json outputs = nlohmann::json::array();
    for (const OutputControl& o : sw.outputs) {
      nlohmann::json f = nlohmann::json::array();
      for (const auto& a : o.control) {
        f.push_back(a ? nlohmann::json::array({a->row, a->port}) : nlohmann::json(nullptr));
      }
      outputs.push_back({{"edge", o.edge}, {"lane", o.lane}, {"f", f}});
    }
    switches.push_back({{"node", sw.node},
                        {"din", sw.din},
                        {"memory_shape", {controls.phi, sw.din}},
                        {"memory_cells", sw.memory_cells},
                        {"ports", ports},
                        {"outputs", outputs}});
  }
  auto entries = [](const std::vector<NiEntry>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const NiEntry& e : list) {
      out.push_back({{"slot", e.slot}, {"lane", e.lane}, {"commodity", e.commodity}, {"rank", e.rank},
                      {"sequence", e.sequence}});
    }
    return out;
  };
  nlohmann::json nis = nlohmann::json::array();
  for (const NiConfig& ni : controls.nis) {
    nlohmann::json in = nlohmann::json::array();
    for (const NiSessionIn& s : ni.sessions_in) {
      in.push_back({{"commodity", s.commodity},
                    {"src", s.src},
                    {"first_arrival", s.first_arrival},
                    {"reorder_gaps", s.reorder_gaps}});
    }
    nlohmann::json outs = nlohmann::json::array();
    for (const NiSessionOut& s : ni.sessions_out) {
      outs.push_back({{"commodity", s.commodity}, {"dst", s.dst}, {"slots_per_period", s.slots_per_period}});
    }
    nis.push_back({{"pe", ni.pe},
                   {"injection_edge", ni.injection_edge},
                   {"ejection_edge", ni.ejection_edge},
                   {"sessions_out", outs},
                   {"outgoing", entries(ni.outgoing)},
                   {"sessions_in", in},
                   {"incoming", entries(ni.incoming)}});
  }
  return {{"phi", controls.phi}, {"flit_bits", controls.flit_bits}, {"switches", switches}, {"nis", nis}};
}

ControlTables controls_from_json(const nlohmann::json& j) {
  ControlTables c;
  c.phi = j.at("phi").get<int>();
  c.flit_bits = j.at("flit_bits").get<int>();
  for (const auto& js : j.at("switches")) {
    SwitchConfig sw;
    sw.node = js.at("node").get<int>();
    sw.din = js.at("din").get<int>();
    sw.memory_cells = js.at("memory_cells").get<std::int64_t>();
    sw.pass_through_cells = static_cast<std::int64_t>(c.phi) * sw.din - sw.memory_cells;
    for (const auto& jp : js.at("ports")) sw.ports.push_back(InputPort{jp.at("edge").get<int>(), jp.at("lane").get<int>()});
    for (const auto& jo : js.at("outputs")) {
      OutputControl o{jo.at("edge").get<int>(), jo.at("lane").get<int>(), {}};
      for (const auto& a : jo.at("f")) {
        if (a.is_null()) {
          o.control.emplace_back();
        } else {
          o.control.emplace_back(MemoryAddress{a.at(0).get<int>(), a.at(1).get<int>()});
        }
      }
      if (static_cast<int>(o.control.size()) != c.phi) throw Error("control function must have phi entries");
      sw.outputs.push_back(std::move(o));
    }
    if (static_cast<int>(sw.ports.size()) != sw.din) throw Error("switch port list disagrees with din");
    c.switches.push_back(std::move(sw));
  }
  auto entries = [](const nlohmann::json& list) {
    std::vector<NiEntry> out;
    for (const auto& je : list) {
      out.push_back(NiEntry{je.at("slot").get<int>(), je.at("lane").get<int>(), je.at("commodity").get<int>(),
                            je.at("rank").get<int>(), je.at("sequence").get<int>()});
    }
    return out;
  };
  for (const auto& jn : j.at("nis")) {
    NiConfig ni;
    ni.pe = jn.at("pe").get<int>();
    ni.injection_edge = jn.at("injection_edge").get<int>();
    ni.ejection_edge = jn.at("ejection_edge").get<int>();
    ni.outgoing = entries(jn.at("outgoing"));
    ni.incoming = entries(jn.at("incoming"));
    for (const auto& jo : jn.at("sessions_out")) {
      ni.sessions_out.push_back(NiSessionOut{jo.at("commodity").get<int>(), jo.at("dst").get<int>(),
                                             jo.at("slots_per_period").get<std::int64_t>()});
    }
    for (const auto& ji : jn.at("sessions_in")) {
      ni.sessions_in.push_back(NiSessionIn{ji.at("commodity").get<int>(), ji.at("src").get<int>(),
                                           ji.at("first_arrival").get<std::int64_t>(),
                                           ji.at("reorder_gaps").get<std::vector<std::int64_t>>()});
    }
    c.nis.push_back(std::move(ni));
  }
  return c;
}

Rational SimReport::utilization() const {
  if (scheduled_slots == 0) return Rational(0);
  return Rational(used_slots, scheduled_slots);
}

namespace {

// Flits carry only an opaque payload; here it indexes the harness's records.
using Payload = std::int64_t;

struct SwitchState {
  const SwitchConfig* config = nullptr;
  std::vector<std::optional<Payload>> memory;  // row * din + port - 1
  std::vector<char> consumed;
};

struct RxSession {
  const NiSessionIn* config = nullptr;
  std::vector<std::int64_t> base;  // arrival time of each rank in period 0
  std::int64_t cursor = 0;         // next position in injection order
  std::int64_t expected = 0;       // its arrival time
  std::map<std::int64_t, Payload> buffer;
  Payload last = -1;
};

class Engine {
 public:
  Engine(const NocGraph& graph, const ControlTables& controls, std::int64_t horizon)
      : graph_(graph), controls_(controls), phi_(controls.phi) {
    if (phi_ < 1) throw Error("period must be positive");
    if (horizon < 2 * phi_ || horizon % phi_ != 0) {
      throw Error("horizon must be a multiple of the period and at least two periods");
    }
    if (static_cast<int>(controls.nis.size()) != graph.pe_count()) throw Error("control tables do not match the graph");
    report_.horizon = horizon;
    report_.edge_flits.assign(graph.edge_count(), 0);
    lanes_.assign(graph.edge_count(), 0);
    for (const SwitchConfig& sw : controls.switches) {
      SwitchState st;
      st.config = &sw;
      st.memory.assign(static_cast<std::size_t>(phi_) * sw.din, std::nullopt);
      st.consumed.assign(st.memory.size(), 1);
      switch_at_[sw.node] = switches_.size();
      switches_.push_back(std::move(st));
      for (const OutputControl& o : sw.outputs) lanes_[o.edge] = std::max(lanes_[o.edge], o.lane + 1);
      report_.max_occupancy[sw.node] = 0;
    }
    out_by_slot_.resize(controls.nis.size());
    in_by_slot_.resize(controls.nis.size());
    rx_.resize(controls.nis.size());
    for (const NiConfig& ni : controls.nis) {
      auto& out = out_by_slot_[ni.pe];
      out.resize(phi_);
      for (const NiEntry& e : ni.outgoing) {
        out.at(e.slot).push_back(&e);
        lanes_[ni.injection_edge] = std::max(lanes_[ni.injection_edge], e.lane + 1);
      }
      auto& in = in_by_slot_[ni.pe];
      for (const NiEntry& e : ni.incoming) {
        in[{e.slot, e.lane}] = &e;
        lanes_[ni.ejection_edge] = std::max(lanes_[ni.ejection_edge], e.lane + 1);
      }
      for (const NiSessionOut& s : ni.sessions_out) {
        session_of_[{ni.pe, s.dst}] = s.commodity;
        queues_[s.commodity];
        slots_of_[s.commodity] = s.slots_per_period;
      }
      for (const NiSessionIn& s : ni.sessions_in) {
        RxSession rx;
        rx.config = &s;
        std::int64_t t = s.first_arrival;
        for (std::int64_t g : s.reorder_gaps) {
          rx.base.push_back(t);
          t += g;
        }
        if (rx.base.empty() || t - s.first_arrival != phi_) throw Error("reorder gaps must sum to the period");
        rx.expected = s.first_arrival;
        rx_[ni.pe][s.commodity] = std::move(rx);
      }
      report_.scheduled_slots += static_cast<std::int64_t>(ni.outgoing.size()) * (horizon / phi_);
    }
    for (int e = 0; e < graph.edge_count(); ++e) {
      const std::int64_t width = graph.edges()[e].width_bits;
      if (width > 0) lanes_[e] = static_cast<int>(width / graph.flit_bits());
    }
  }

  std::int64_t horizon() const { return report_.horizon; }
  int phi() const { return phi_; }
  const std::map<int, std::int64_t>& slots_of() const { return slots_of_; }

  int session(int src_pe, int dst_pe) const {
    auto it = session_of_.find({src_pe, dst_pe});
    if (it == session_of_.end()) {
      throw Error("no session from PE " + std::to_string(src_pe) + " to PE " + std::to_string(dst_pe));
    }
    return it->second;
  }

  void enqueue(int commodity, int message) {
    queues_.at(commodity).push_back(static_cast<Payload>(pending_.size()));
    pending_.push_back(message);
  }

  bool idle() const {
    if (delivered_ != static_cast<std::int64_t>(report_.flits.size())) return false;
    return std::all_of(queues_.begin(), queues_.end(), [](const auto& q) { return q.second.empty(); });
  }

  // Runs slot s; returns the messages whose last flit was released.
  std::vector<int> step(std::int64_t s) {
    const int slot = static_cast<int>(s % phi_);
    sent_.clear();
    for (const NiConfig& ni : controls_.nis) {
      for (const NiEntry* e : out_by_slot_[ni.pe][slot]) {
        auto& q = queues_.at(e->commodity);
        if (q.empty()) continue;
        q.pop_front();
        Payload p = static_cast<Payload>(report_.flits.size());
        FlitRecord rec;
        rec.commodity = e->commodity;
        rec.sequence = e->sequence;
        rec.message = pending_[report_.flits.size()];
        rec.injected = s;
        report_.flits.push_back(rec);
        if (s < report_.horizon) ++report_.used_slots;
        sent_.push_back({ni.injection_edge, e->lane, p});
      }
    }
    for (SwitchState& st : switches_) {
      const int din = st.config->din;
      for (const OutputControl& o : st.config->outputs) {
        const auto& addr = o.control[slot];
        if (!addr) continue;
        std::size_t cell = static_cast<std::size_t>(addr->row) * din + (addr->port - 1);
        if (!st.memory[cell] || st.consumed[cell]) continue;
        st.consumed[cell] = 1;
        sent_.push_back({o.edge, o.lane, *st.memory[cell]});
      }
      std::int64_t occupancy = 0;
      for (std::size_t c = 0; c < st.memory.size(); ++c) {
        if (st.memory[c] && !st.consumed[c]) ++occupancy;
      }
      auto& best = report_.max_occupancy[st.config->node];
      best = std::max(best, occupancy);
    }

    // Write phase: row `slot` of every switch is overwritten.
    for (SwitchState& st : switches_) {
      const int din = st.config->din;
      for (int port = 0; port < din; ++port) {
        std::size_t cell = static_cast<std::size_t>(slot) * din + port;
        if (st.memory[cell] && !st.consumed[cell]) {
          throw Error("simulation assertion: flit in switch " + std::to_string(st.config->node) +
                      " overwritten before it was forwarded");
        }
        st.memory[cell].reset();
        st.consumed[cell] = 1;
      }
    }
    const std::int64_t now = s + 1;
    for (const Transfer& t : sent_) {
      if (s < report_.horizon) ++report_.edge_flits[t.edge];
      const int head = graph_.edges()[t.edge].dst;
      if (graph_.is_pe(head)) {
        receive(head, slot, t, now);
        continue;
      }
      SwitchState& st = switches_[switch_at_.at(head)];
      int port = port_index(st, t.edge, t.lane);
      std::size_t cell = static_cast<std::size_t>(slot) * st.config->din + port;
      st.memory[cell] = t.payload;
      st.consumed[cell] = 0;
    }
    return release(now);
  }

  SimReport finish(std::int64_t slots_run) {
    report_.slots_run = slots_run;
    report_.edge_utilization.assign(graph_.edge_count(), Rational(0));
    for (int e = 0; e < graph_.edge_count(); ++e) {
      if (lanes_[e] > 0) {
        report_.edge_utilization[e] = Rational(report_.edge_flits[e], lanes_[e] * report_.horizon);
      }
    }
    return std::move(report_);
  }

  SimReport& report() { return report_; }

 private:
  struct Transfer {
    int edge;
    int lane;
    Payload payload;
  };

  int port_index(const SwitchState& st, int edge, int lane) const {
    const auto& ports = st.config->ports;
    for (std::size_t p = 0; p < ports.size(); ++p) {
      if (ports[p].edge == edge && ports[p].lane == lane) return static_cast<int>(p);
    }
    throw Error("flit arrived on an unconfigured port of switch " + std::to_string(st.config->node));
  }

  void receive(int pe, int slot, const Transfer& t, std::int64_t now) {
    auto it = in_by_slot_[pe].find({slot, t.lane});
    if (it == in_by_slot_[pe].end()) throw Error("flit ejected at PE " + std::to_string(pe) + " in an idle slot");
    const NiEntry& e = *it->second;
    RxSession& rx = rx_[pe].at(e.commodity);
    const std::int64_t offset = now - rx.base.at(e.rank);
    if (offset < 0 || offset % phi_ != 0) throw Error("flit arrived off its schedule at PE " + std::to_string(pe));
    const std::int64_t position = offset / phi_ * static_cast<std::int64_t>(rx.base.size()) + e.rank;
    rx.buffer.emplace(position, t.payload);
    report_.flits[t.payload].arrived = now;
  }

  std::vector<int> release(std::int64_t now) {
    std::vector<int> done;
    for (auto& per_pe : rx_) {
      for (auto& [commodity, rx] : per_pe) {
        while (rx.expected <= now) {
          const std::size_t rank = static_cast<std::size_t>(rx.cursor % static_cast<std::int64_t>(rx.base.size()));
          auto it = rx.buffer.find(rx.cursor);
          if (it != rx.buffer.end()) {
            FlitRecord& rec = report_.flits[it->second];
            rec.delivered = now;
            if (it->second < rx.last) report_.in_order = false;
            rx.last = it->second;
            ++delivered_;
            if (rec.message >= 0) done.push_back(rec.message);
            rx.buffer.erase(it);
          }
          rx.expected += rx.config->reorder_gaps[rank];
          ++rx.cursor;
        }
      }
    }
    return done;
  }

  const NocGraph& graph_;
  const ControlTables& controls_;
  int phi_;
  SimReport report_;
  std::vector<int> lanes_;
  std::vector<SwitchState> switches_;
  std::map<int, std::size_t> switch_at_;
  std::vector<std::vector<std::vector<const NiEntry*>>> out_by_slot_;
  std::vector<std::map<std::pair<int, int>, const NiEntry*>> in_by_slot_;
  std::vector<std::map<int, RxSession>> rx_;
  std::map<std::pair<int, int>, int> session_of_;
  std::map<int, std::int64_t> slots_of_;
  std::map<int, std::deque<Payload>> queues_;
  std::vector<int> pending_;  // message of every queued payload
  std::vector<Transfer> sent_;
  std::int64_t delivered_ = 0;
};

std::int64_t drain_limit(const NocGraph& graph, const ControlTables& controls) {
  // Any flit is delivered within (hops + 1) periods of entering its queue's head.
  return static_cast<std::int64_t>(controls.phi) * (graph.node_count() + 2);
}

}  // namespace

SimReport simulate(const NocGraph& graph, const ControlTables& controls, const SteadyTraffic& traffic) {
  Engine engine(graph, controls, traffic.horizon);
  const std::int64_t limit = traffic.horizon + drain_limit(graph, controls);
  std::int64_t s = 0;
  for (;; ++s) {
    if (s < traffic.horizon && s % engine.phi() == 0) {
      for (const auto& [commodity, slots] : engine.slots_of()) {
        for (std::int64_t i = 0; i < slots; ++i) engine.enqueue(commodity, -1);
      }
    }
    engine.step(s);
    if (s + 1 >= traffic.horizon && engine.idle()) break;
    if (s >= limit) throw Error("simulation did not drain");
  }
  return engine.finish(s + 1);
}

SimReport simulate(const NocGraph& graph, const ControlTables& controls, const TcgTraffic& traffic) {
  if (traffic.tcg == nullptr) throw Error("no task graph to replay");
  const Tcg& tcg = *traffic.tcg;
  Engine engine(graph, controls, traffic.horizon);
  const int flit_bits = controls.flit_bits;

  const std::vector<int> order = tcg.topological_order();
  std::map<int, std::size_t> index_of;  // task id -> position in `tasks`
  for (std::size_t i = 0; i < tcg.tasks.size(); ++i) index_of[tcg.tasks[i].id] = i;
  const std::size_t n = tcg.tasks.size();
  std::vector<int> topo_rank(n);
  for (std::size_t r = 0; r < order.size(); ++r) topo_rank[index_of.at(order[r])] = static_cast<int>(r);
  std::vector<int> pe(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = tcg.mapping.find(tcg.tasks[i].id);
    if (it == tcg.mapping.end()) throw Error("task " + std::to_string(tcg.tasks[i].id) + " is not mapped to a PE");
    if (it->second < 0 || it->second >= graph.pe_count()) throw Error("task mapped to an unknown PE");
    pe[i] = it->second;
  }
  std::vector<int> waiting(n, 0);
  std::vector<char> is_source(n, 1);
  std::vector<std::vector<int>> outgoing(n);
  for (std::size_t m = 0; m < tcg.messages.size(); ++m) {
    ++waiting[index_of.at(tcg.messages[m].dst)];
    is_source[index_of.at(tcg.messages[m].dst)] = 0;
    outgoing[index_of.at(tcg.messages[m].src)].push_back(static_cast<int>(m));
  }
  std::vector<std::int64_t> flits_left(tcg.messages.size());
  for (std::size_t m = 0; m < tcg.messages.size(); ++m) {
    flits_left[m] = (tcg.messages[m].bits + flit_bits - 1) / flit_bits;
  }
  // Per PE, tasks in topological order.
  std::vector<std::vector<std::size_t>> by_pe(graph.pe_count());
  for (int id : order) by_pe[pe[index_of.at(id)]].push_back(index_of.at(id));
  std::vector<char> started(n, 0);
  std::vector<char> finished(n, 0);
  std::vector<std::int64_t> end(n, 0);
  std::vector<int> running(graph.pe_count(), -1);
  std::size_t finished_count = 0;

  auto deliver = [&](int m) { --waiting[index_of.at(tcg.messages[m].dst)]; };

  auto advance_tasks = [&](std::int64_t now) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int p = 0; p < graph.pe_count(); ++p) {
        int r = running[p];
        if (r >= 0 && end[r] == now) {
          finished[r] = 1;
          ++finished_count;
          running[p] = -1;
          engine.report().task_end[tcg.tasks[r].id] = Rational(now);
          for (int m : outgoing[r]) {
            const Message& msg = tcg.messages[m];
            const int dst_pe = pe[index_of.at(msg.dst)];
            if (dst_pe == p) {
              deliver(m);
              continue;
            }
            const int commodity = engine.session(p, dst_pe);
            for (std::int64_t f = 0; f < flits_left[m]; ++f) engine.enqueue(commodity, m);
          }
          changed = true;
        }
        if (running[p] >= 0) continue;
        for (std::size_t i : by_pe[p]) {
          if (started[i] || waiting[i] > 0) continue;
          const Task& t = tcg.tasks[i];
          if (is_source[i] && t.arrival && *t.arrival > now) continue;
          started[i] = 1;
          end[i] = now + t.duration;
          running[p] = static_cast<int>(i);
          changed = true;
          break;
        }
      }
    }
  };

  const std::int64_t limit = 2 * traffic.horizon + drain_limit(graph, controls);
  std::int64_t s = 0;
  for (;; ++s) {
    advance_tasks(s);
    for (int m : engine.step(s)) {
      if (--flits_left[m] == 0) deliver(m);
    }
    if (s + 1 >= traffic.horizon && finished_count == n && engine.idle()) break;
    if (s >= limit) throw Error("task graph replay did not complete");
  }
  return engine.finish(s + 1);
}

}  // namespace nocweave
