// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/mcf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "nocweave/error.hpp"

namespace nocweave {

std::vector<Commodity> make_commodities(const DemandMatrix& dm) {
  std::vector<Commodity> out;
  for (const auto& [pair, d] : dm.pairs) {
    if (d.max_rate <= 0) continue;
    out.push_back(Commodity{static_cast<int>(out.size()), pair.first, pair.second, d.max_rate});
  }
  return out;
}

std::vector<int> path_nodes(const NocGraph& graph, const std::vector<int>& path) {
  std::vector<int> nodes;
  if (path.empty()) return nodes;
  nodes.push_back(graph.edges()[path.front()].src);
  for (int e : path) nodes.push_back(graph.edges()[e].dst);
  return nodes;
}

namespace {

void check_commodities(const NocGraph& graph, const std::vector<Commodity>& commodities) {
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    const Commodity& c = commodities[i];
    if (c.id != static_cast<int>(i)) throw Error("commodity ids must match their positions");
    if (c.src == c.dst) throw Error("commodity with equal endpoints");
    if (c.src < 0 || c.dst < 0 || c.src >= graph.pe_count() || c.dst >= graph.pe_count()) {
      throw Error("commodity endpoint is not a PE");
    }
    if (c.demand <= 0) throw Error("commodity demand must be positive");
  }
}

std::string commodity_name(const Commodity& c) {
  return "commodity " + std::to_string(c.id) + " (PE" + std::to_string(c.src) + "->PE" + std::to_string(c.dst) + ")";
}

// A node may be entered when it is a switch or the commodity's destination.
bool enterable(const NocGraph& g, int node, int dst) { return !g.is_pe(node) || node == dst; }

// Exact distances to `dst` with at most `hops` edges (or unlimited), used to
// walk out the lexicographically smallest optimal path.
class ExactDistanceTable {
 public:
  ExactDistanceTable(const NocGraph& g, const std::vector<Rational>& cost, int dst, std::optional<int> hop_limit)
      : g_(g), cost_(cost), dst_(dst), hop_limit_(hop_limit) {
    if (hop_limit_) {
      layered();
    } else {
      dijkstra();
    }
  }

  std::optional<std::vector<int>> path_from(int src) const {
    const int budget = hop_limit_.value_or(0);
    const auto* start = at(src, budget);
    if (start == nullptr) return std::nullopt;
    std::vector<int> path;
    int u = src;
    int left = budget;
    Rational remaining = *start;
    while (u != dst_) {
      int chosen = -1;
      for (int e : g_.out_edges(u)) {
        int w = g_.edges()[e].dst;
        if (!enterable(g_, w, dst_)) continue;
        const auto* dw = at(w, left - 1);
        if (dw != nullptr && cost_[e] + *dw == remaining) {
          chosen = e;
          break;
        }
      }
      if (chosen < 0) throw Error("internal: shortest path walk lost its way");
      path.push_back(chosen);
      remaining -= cost_[chosen];
      u = g_.edges()[chosen].dst;
      --left;
    }
    return path;
  }

 private:
  const Rational* at(int node, int hops) const {
    if (hop_limit_) {
      if (hops < 0) return nullptr;
      return layers_[hops][node] ? &*layers_[hops][node] : nullptr;
    }
    return dist_[node] ? &*dist_[node] : nullptr;
  }

  void dijkstra() {
    dist_.assign(g_.node_count(), std::nullopt);
    using Item = std::pair<Rational, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist_[dst_] = Rational(0);
    queue.emplace(Rational(0), dst_);
    std::vector<bool> done(g_.node_count(), false);
    while (!queue.empty()) {
      auto [d, w] = queue.top();
      queue.pop();
      if (done[w]) continue;
      done[w] = true;
      // PEs other than the destination are path endpoints only.
      if (g_.is_pe(w) && w != dst_) continue;
      for (int e : g_.in_edges(w)) {
        int v = g_.edges()[e].src;
        Rational nd = d + cost_[e];
        if (!dist_[v] || nd < *dist_[v]) {
          dist_[v] = nd;
          queue.emplace(nd, v);
        }
      }
    }
  }

  void layered() {
    const int h_max = *hop_limit_;
    layers_.assign(h_max + 1, std::vector<std::optional<Rational>>(g_.node_count()));
    layers_[0][dst_] = Rational(0);
    for (int h = 1; h <= h_max; ++h) {
      layers_[h] = layers_[h - 1];
      for (int e = 0; e < g_.edge_count(); ++e) {
        const Edge& edge = g_.edges()[e];
        if (!enterable(g_, edge.dst, dst_)) continue;
        const auto& dw = layers_[h - 1][edge.dst];
        if (!dw) continue;
        Rational nd = *dw + cost_[e];
        auto& dv = layers_[h][edge.src];
        if (!dv || nd < *dv) dv = nd;
      }
    }
  }

  const NocGraph& g_;
  const std::vector<Rational>& cost_;
  int dst_;
  std::optional<int> hop_limit_;
  std::vector<std::optional<Rational>> dist_;
  std::vector<std::vector<std::optional<Rational>>> layers_;
};

void accumulate_edge_flow(FlowAssignment& flow, int edge_count) {
  flow.edge_flow.assign(edge_count, Rational(0));
  for (const auto& per : flow.commodity_flow) {
    for (const auto& [e, f] : per) flow.edge_flow[e] += f;
  }
}

}  // namespace

FlowAssignment solve_min_cost(const NocGraph& graph, const std::vector<Commodity>& commodities,
                              std::optional<int> hop_limit) {
  check_commodities(graph, commodities);
  if (hop_limit && *hop_limit < 1) throw Error("hop limit must be positive");
  std::vector<Rational> cost;
  cost.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) cost.push_back(rational_from_double(e.cost));

  FlowAssignment flow;
  flow.objective = ObjectiveKind::MinCost;
  flow.hop_limit = hop_limit;
  flow.commodity_flow.resize(commodities.size());

  std::map<int, std::vector<const Commodity*>> by_dst;
  for (const Commodity& c : commodities) by_dst[c.dst].push_back(&c);
  for (const auto& [dst, list] : by_dst) {
    ExactDistanceTable table(graph, cost, dst, hop_limit);
    for (const Commodity* c : list) {
      auto path = table.path_from(c->src);
      if (!path) {
        throw InfeasibleError("no path for " + commodity_name(*c) +
                              (hop_limit ? " within " + std::to_string(*hop_limit) + " hops" : std::string{}));
      }
      for (int e : *path) flow.commodity_flow[c->id][e] += c->demand;
    }
  }
  accumulate_edge_flow(flow, graph.edge_count());
  flow.value = Rational(0);
  for (int e = 0; e < graph.edge_count(); ++e) flow.value += cost[e] * flow.edge_flow[e];
  return flow;
}

namespace {

// Shortest paths from one source under floating-point lengths.
class LengthTree {
 public:
  LengthTree(const NocGraph& g, const std::vector<double>& length, int src, std::optional<int> hop_limit)
      : g_(g), src_(src), hop_limit_(hop_limit) {
    if (hop_limit_) {
      layered(length);
    } else {
      dijkstra(length);
    }
  }

  double distance(int dst) const {
    if (!hop_limit_) return dist_[dst];
    double best = kInf;
    for (const auto& layer : layer_dist_) best = std::min(best, layer[dst]);
    return best;
  }

  std::vector<int> path_to(int dst) const {
    std::vector<int> path;
    if (!hop_limit_) {
      for (int v = dst; v != src_;) {
        int e = pred_[v];
        path.push_back(e);
        v = g_.edges()[e].src;
      }
    } else {
      int h = -1;
      double best = kInf;
      for (int i = 0; i < static_cast<int>(layer_dist_.size()); ++i) {
        if (layer_dist_[i][dst] < best) {
          best = layer_dist_[i][dst];
          h = i;
        }
      }
      for (int v = dst; v != src_; --h) {
        int e = layer_pred_[h][v];
        path.push_back(e);
        v = g_.edges()[e].src;
      }
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  bool expandable(int node) const { return !g_.is_pe(node) || node == src_; }

  void dijkstra(const std::vector<double>& length) {
    dist_.assign(g_.node_count(), kInf);
    pred_.assign(g_.node_count(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist_[src_] = 0.0;
    queue.emplace(0.0, src_);
    while (!queue.empty()) {
      auto [d, v] = queue.top();
      queue.pop();
      if (d > dist_[v] || !expandable(v)) continue;
      for (int e : g_.out_edges(v)) {
        int w = g_.edges()[e].dst;
        double nd = d + length[e];
        if (nd < dist_[w]) {
          dist_[w] = nd;
          pred_[w] = e;
          queue.emplace(nd, w);
        }
      }
    }
  }

  void layered(const std::vector<double>& length) {
    const int h_max = *hop_limit_;
    layer_dist_.assign(h_max + 1, std::vector<double>(g_.node_count(), kInf));
    layer_pred_.assign(h_max + 1, std::vector<int>(g_.node_count(), -1));
    layer_dist_[0][src_] = 0.0;
    for (int h = 1; h <= h_max; ++h) {
      for (int e = 0; e < g_.edge_count(); ++e) {
        const Edge& edge = g_.edges()[e];
        double d = layer_dist_[h - 1][edge.src];
        if (d == kInf || !expandable(edge.src)) continue;
        double nd = d + length[e];
        if (nd < layer_dist_[h][edge.dst]) {
          layer_dist_[h][edge.dst] = nd;
          layer_pred_[h][edge.dst] = e;
        }
      }
    }
  }

  const NocGraph& g_;
  int src_;
  std::optional<int> hop_limit_;
  std::vector<double> dist_;
  std::vector<int> pred_;
  std::vector<std::vector<double>> layer_dist_;
  std::vector<std::vector<int>> layer_pred_;
};

}  // namespace

FlowAssignment solve_min_congestion(const NocGraph& graph, const std::vector<Commodity>& commodities,
                                    const std::vector<Rational>& capacities, const CongestionOptions& options) {
  check_commodities(graph, commodities);
  if (static_cast<int>(capacities.size()) != graph.edge_count()) throw Error("one capacity per edge required");
  if (!(options.epsilon > 0.0 && options.epsilon <= 0.1)) throw Error("epsilon must lie in (0, 0.1]");
  if (options.hop_limit && *options.hop_limit < 1) throw Error("hop limit must be positive");
  for (const Rational& u : capacities) {
    if (u <= 0) throw Error("capacities must be positive");
  }

  FlowAssignment flow;
  flow.objective = ObjectiveKind::MinCongestion;
  flow.hop_limit = options.hop_limit;
  flow.commodity_flow.resize(commodities.size());
  if (commodities.empty()) {
    flow.edge_flow.assign(graph.edge_count(), Rational(0));
    flow.value = Rational(0);
    flow.lambda_lower_bound = Rational(0);
    return flow;
  }

  const int m = graph.edge_count();
  std::vector<double> cap(m);
  for (int e = 0; e < m; ++e) cap[e] = to_double(capacities[e]);
  std::vector<double> demand(commodities.size());
  for (const Commodity& c : commodities) demand[c.id] = to_double(c.demand);

  std::map<int, std::vector<int>> by_src;
  for (const Commodity& c : commodities) by_src[c.src].push_back(c.id);

  // Reachability check up front so a disconnected pair fails fast.
  {
    std::vector<double> unit(m, 1.0);
    for (const auto& [src, ids] : by_src) {
      LengthTree tree(graph, unit, src, options.hop_limit);
      for (int id : ids) {
        if (tree.distance(commodities[id].dst) == LengthTree::kInf) {
          throw InfeasibleError("no path for " + commodity_name(commodities[id]) +
                                (options.hop_limit ? " within the hop limit" : std::string{}));
        }
      }
    }
  }

  const double step = options.epsilon;
  const double target = options.epsilon / 2.0;
  std::vector<double> y(m);
  for (int e = 0; e < m; ++e) y[e] = 1.0 / cap[e];
  std::vector<double> total(m, 0.0);
  std::vector<std::map<std::vector<int>, double>> path_sum(commodities.size());
  double best_lower = 0.0;
  int phases = 0;

  auto lower_bound = [&]() {
    // Any flow with congestion lambda satisfies
    //   sum_j d_j dist_y(j) <= sum_e f(e) y(e) <= lambda sum_e u(e) y(e).
    double volume = 0.0;
    for (int e = 0; e < m; ++e) volume += cap[e] * y[e];
    double routed = 0.0;
    for (const auto& [src, ids] : by_src) {
      LengthTree tree(graph, y, src, options.hop_limit);
      for (int id : ids) routed += demand[id] * tree.distance(commodities[id].dst);
    }
    return routed / volume;
  };

  while (phases < options.max_phases) {
    for (const auto& [src, ids] : by_src) {
      std::vector<double> remaining(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) remaining[i] = demand[ids[i]];
      for (long guard = 0;; ++guard) {
        if (guard > 10'000'000) throw Error("internal: congestion solver failed to route a phase");
        LengthTree tree(graph, y, src, options.hop_limit);
        std::vector<std::vector<int>> paths(ids.size());
        std::vector<double> load(m, 0.0);
        bool any = false;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (remaining[i] <= 0.0) continue;
          any = true;
          paths[i] = tree.path_to(commodities[ids[i]].dst);
          for (int e : paths[i]) load[e] += remaining[i];
        }
        if (!any) break;
        double scale = 1.0;
        for (int e = 0; e < m; ++e) {
          if (load[e] > cap[e]) scale = std::min(scale, cap[e] / load[e]);
        }
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (remaining[i] <= 0.0) continue;
          double amount = scale * remaining[i];
          path_sum[ids[i]][paths[i]] += amount;
          remaining[i] = scale >= 1.0 ? 0.0 : remaining[i] - amount;
        }
        for (int e = 0; e < m; ++e) {
          if (load[e] == 0.0) continue;
          total[e] += scale * load[e];
          y[e] *= 1.0 + step * scale * load[e] / cap[e];
        }
      }
    }
    ++phases;
    double peak = *std::max_element(y.begin(), y.end());
    for (double& v : y) v /= peak;

    double lambda = 0.0;
    for (int e = 0; e < m; ++e) lambda = std::max(lambda, total[e] / phases / cap[e]);
    best_lower = std::max(best_lower, lower_bound());
    if (lambda <= (1.0 + target) * best_lower) break;
  }

  // Snap path shares to multiples of 2^-20 summing to exactly one (largest
  // remainder), so every amount is demand * w / 2^20.
  const std::int64_t grid = std::int64_t{1} << 20;
  for (const Commodity& c : commodities) {
    const auto& paths = path_sum[c.id];
    double sum = 0.0;
    for (const auto& [p, q] : paths) sum += q;
    std::vector<const std::vector<int>*> keys;
    std::vector<std::int64_t> weights;
    std::vector<double> remainder;
    std::int64_t assigned = 0;
    for (const auto& [p, q] : paths) {
      double exact = q / sum * static_cast<double>(grid);
      auto w = static_cast<std::int64_t>(std::floor(exact));
      keys.push_back(&p);
      weights.push_back(w);
      remainder.push_back(exact - static_cast<double>(w));
      assigned += w;
    }
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < grid; i = (i + 1) % order.size(), ++assigned) ++weights[order[i]];
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (weights[i] == 0) continue;
      Rational amount = c.demand * Rational(weights[i], grid);
      for (int e : *keys[i]) flow.commodity_flow[c.id][e] += amount;
    }
  }
  accumulate_edge_flow(flow, m);
  flow.value = Rational(0);
  for (int e = 0; e < m; ++e) flow.value = std::max(flow.value, Rational(flow.edge_flow[e] / capacities[e]));
  flow.lambda_lower_bound = rational_from_double(best_lower);
  return flow;
}

namespace {

// Net outflow minus inflow of one commodity at every node.
std::vector<Rational> net_outflow(const NocGraph& graph, const std::map<int, Rational>& per) {
  std::vector<Rational> net(graph.node_count(), Rational(0));
  for (const auto& [e, f] : per) {
    net[graph.edges()[e].src] += f;
    net[graph.edges()[e].dst] -= f;
  }
  return net;
}

void cancel_cycles(const NocGraph& graph, std::map<int, Rational>& per) {
  while (true) {
    std::vector<std::vector<int>> adj(graph.node_count());
    for (const auto& [e, f] : per) {
      if (f > 0) adj[graph.edges()[e].src].push_back(e);
    }
    // Iterative DFS looking for a back edge.
    std::vector<int> state(graph.node_count(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<int> via(graph.node_count(), -1);
    std::vector<int> cycle;
    for (int root = 0; root < graph.node_count() && cycle.empty(); ++root) {
      if (state[root] != 0) continue;
      std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
      state[root] = 1;
      while (!stack.empty() && cycle.empty()) {
        auto& [v, next] = stack.back();
        if (next == adj[v].size()) {
          state[v] = 2;
          stack.pop_back();
          continue;
        }
        int e = adj[v][next++];
        int w = graph.edges()[e].dst;
        if (state[w] == 0) {
          state[w] = 1;
          via[w] = e;
          stack.emplace_back(w, 0);
        } else if (state[w] == 1) {
          cycle.push_back(e);
          for (int u = v; u != w;) {
            cycle.push_back(via[u]);
            u = graph.edges()[via[u]].src;
          }
        }
      }
    }
    if (cycle.empty()) return;
    Rational bottleneck = per.at(cycle.front());
    for (int e : cycle) bottleneck = std::min(bottleneck, per.at(e));
    for (int e : cycle) {
      per[e] -= bottleneck;
      if (per[e] == 0) per.erase(e);
    }
  }
}

}  // namespace

std::vector<PathFlow> decompose(const NocGraph& graph, const std::vector<Commodity>& commodities,
                                const FlowAssignment& flow) {
  if (flow.commodity_flow.size() != commodities.size()) throw Error("flow does not match the commodity list");
  std::vector<PathFlow> out;
  for (const Commodity& c : commodities) {
    std::map<int, Rational> per;
    for (const auto& [e, f] : flow.commodity_flow[c.id]) {
      if (f < 0) throw Error("negative flow for " + commodity_name(c));
      if (f > 0) per.emplace(e, f);
    }
    auto net = net_outflow(graph, per);
    for (int v = 0; v < graph.node_count(); ++v) {
      Rational expected = v == c.src ? c.demand : v == c.dst ? Rational(-c.demand) : Rational(0);
      if (net[v] != expected) {
        throw Error("flow conservation violated at node " + std::to_string(v) + " for " + commodity_name(c));
      }
    }
    cancel_cycles(graph, per);

    std::vector<PathFlow> mine;
    while (!per.empty()) {
      std::vector<std::vector<std::pair<int, int>>> adj(graph.node_count());  // (next node, edge)
      for (const auto& [e, f] : per) adj[graph.edges()[e].src].emplace_back(graph.edges()[e].dst, e);
      for (auto& list : adj) std::sort(list.begin(), list.end());
      // Widest bottleneck to the sink over the (acyclic) support.
      std::vector<std::optional<Rational>> width(graph.node_count());
      std::vector<int> order;
      std::vector<int> state(graph.node_count(), 0);
      std::function<void(int)> visit = [&](int v) {
        state[v] = 1;
        for (auto [w, e] : adj[v]) {
          if (state[w] == 0) visit(w);
        }
        order.push_back(v);
      };
      visit(c.src);
      for (int v : order) {  // post-order: successors first
        if (v == c.dst) continue;
        for (auto [w, e] : adj[v]) {
          if (w != c.dst && !width[w]) continue;
          Rational through = w == c.dst ? per.at(e) : std::min(per.at(e), *width[w]);
          if (!width[v] || through > *width[v]) width[v] = through;
        }
      }
      if (!width[c.src]) throw Error("flow for " + commodity_name(c) + " does not reach its destination");
      const Rational bottleneck = *width[c.src];
      PathFlow pf{c.id, {}, bottleneck};
      for (int v = c.src; v != c.dst;) {
        bool moved = false;
        for (auto [w, e] : adj[v]) {
          if (per.at(e) < bottleneck) continue;
          if (w != c.dst && (!width[w] || *width[w] < bottleneck)) continue;
          pf.path.push_back(e);
          v = w;
          moved = true;
          break;
        }
        if (!moved) throw Error("internal: widest path walk failed");
      }
      for (int e : pf.path) {
        per[e] -= bottleneck;
        if (per[e] == 0) per.erase(e);
      }
      mine.push_back(std::move(pf));
    }
    std::stable_sort(mine.begin(), mine.end(), [&](const PathFlow& a, const PathFlow& b) {
      if (a.amount != b.amount) return a.amount > b.amount;
      return path_nodes(graph, a.path) < path_nodes(graph, b.path);
    });
    out.insert(out.end(), mine.begin(), mine.end());
  }
  return out;
}

FlowCheck verify_flow(const NocGraph& graph, const std::vector<Commodity>& commodities, const FlowAssignment& flow) {
  auto fail = [](std::string msg) { return FlowCheck{false, std::move(msg)}; };
  if (flow.commodity_flow.size() != commodities.size()) return fail("flow does not match the commodity list");
  std::vector<Rational> sum(graph.edge_count(), Rational(0));
  for (const Commodity& c : commodities) {
    const auto& per = flow.commodity_flow[c.id];
    for (const auto& [e, f] : per) {
      if (e < 0 || e >= graph.edge_count()) return fail("edge index out of range for " + commodity_name(c));
      if (f < 0) return fail("negative flow on edge " + std::to_string(e) + " for " + commodity_name(c));
      const int head = graph.edges()[e].dst;
      if (f > 0 && graph.is_pe(head) && head != c.dst) {
        return fail("flow enters PE " + std::to_string(head) + " for " + commodity_name(c));
      }
      sum[e] += f;
    }
    auto net = net_outflow(graph, per);
    for (int v = 0; v < graph.node_count(); ++v) {
      if (v == c.src || v == c.dst) continue;
      if (net[v] != 0) return fail("conservation failure at node " + std::to_string(v) + " for " + commodity_name(c));
    }
    if (net[c.src] != c.demand || net[c.dst] != -c.demand) {
      return fail("demand not satisfied for " + commodity_name(c) + ": routed " + format_rational(net[c.src]) +
                  " of " + format_rational(c.demand));
    }
  }
  if (flow.edge_flow.size() != sum.size()) return fail("total edge flow has the wrong size");
  for (int e = 0; e < graph.edge_count(); ++e) {
    if (flow.edge_flow[e] != sum[e]) return fail("total flow mismatch on edge " + std::to_string(e));
  }
  if (flow.hop_limit) {
    for (const PathFlow& p : decompose(graph, commodities, flow)) {
      if (static_cast<int>(p.path.size()) > *flow.hop_limit) {
        return fail("path of " + std::to_string(p.path.size()) + " hops exceeds the limit for " +
                    commodity_name(commodities[p.commodity]));
      }
    }
  }
  return {};
}

nlohmann::json flow_to_json(const std::vector<Commodity>& commodities, const std::vector<PathFlow>& paths,
                            const FlowAssignment& flow) {
  std::vector<nlohmann::json> per(commodities.size());
  for (const Commodity& c : commodities) {
    per[c.id] = {{"id", c.id},
                 {"src", c.src},
                 {"dst", c.dst},
                 {"demand", format_rational(c.demand)},
                 {"paths", nlohmann::json::array()}};
  }
  for (const PathFlow& p : paths) {
    per[p.commodity]["paths"].push_back({{"path", p.path}, {"amount", format_rational(p.amount)}});
  }
  nlohmann::json j{{"commodities", per}};
  if (flow.objective == ObjectiveKind::MinCost) {
    j["objective"] = "mincost";
    j["cost"] = format_rational(flow.value);
  } else {
    j["objective"] = "mincong";
    j["lambda"] = format_rational(flow.value);
    if (flow.lambda_lower_bound) j["lambda_lower_bound"] = format_rational(*flow.lambda_lower_bound);
  }
  if (flow.hop_limit) j["hop_limit"] = *flow.hop_limit;
  return j;
}

StoredFlow flow_from_json(const nlohmann::json& j) {
  StoredFlow out;
  for (const auto& jc : j.at("commodities")) {
    Commodity c{jc.at("id").get<int>(), jc.at("src").get<int>(), jc.at("dst").get<int>(),
                parse_rational(jc.at("demand").get<std::string>())};
    if (c.id != static_cast<int>(out.commodities.size())) throw Error("commodities must be listed by id");
    for (const auto& jp : jc.at("paths")) {
      out.paths.push_back(
          PathFlow{c.id, jp.at("path").get<std::vector<int>>(), parse_rational(jp.at("amount").get<std::string>())});
    }
    out.commodities.push_back(c);
  }
  const auto objective = j.value("objective", std::string{"mincost"});
  out.objective = objective == "mincong" ? ObjectiveKind::MinCongestion : ObjectiveKind::MinCost;
  out.value = parse_rational(j.at(out.objective == ObjectiveKind::MinCost ? "cost" : "lambda").get<std::string>());
  return out;
}

}  // namespace nocweave
