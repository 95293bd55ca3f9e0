// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <utility>

#include "nocweave/error.hpp"
#include "nocweave/random.hpp"

namespace nocweave {

NocGraph::NocGraph(int flit_bits, std::string family, std::vector<Node> nodes,
                   std::vector<Edge> edges)
    : flit_bits_(flit_bits), family_(std::move(family)), nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  if (flit_bits_ <= 0) throw Error("flit size must be positive");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<int>(i)) throw Error("node ids must be dense and ordered");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.src < 0 || e.dst < 0 || e.src >= node_count() || e.dst >= node_count()) {
      throw Error("edge endpoint out of range");
    }
    if (e.src == e.dst) throw Error("self-loop at node " + std::to_string(e.src));
    if (e.cost < 0) throw Error("negative edge cost");
    if (i > 0 && edges_[i - 1].src == e.src && edges_[i - 1].dst == e.dst) {
      throw Error("parallel edge " + std::to_string(e.src) + "->" + std::to_string(e.dst));
    }
  }
  index();
}

void NocGraph::index() {
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  pe_count_ = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out_[edges_[i].src].push_back(static_cast<int>(i));
    in_[edges_[i].dst].push_back(static_cast<int>(i));
  }
  for (const Node& n : nodes_) {
    if (n.kind != NodeKind::Pe) continue;
    if (n.id != pe_count_) throw Error("PEs must be numbered before switches");
    ++pe_count_;
    if (out_[n.id].size() != 1 || in_[n.id].size() != 1) {
      throw Error("PE " + std::to_string(n.id) + " must have exactly one injection and one ejection link");
    }
    if (is_pe(edges_[out_[n.id][0]].dst) || is_pe(edges_[in_[n.id][0]].src)) {
      throw Error("PE " + std::to_string(n.id) + " must attach to a switch");
    }
  }
}

int NocGraph::injection_edge(int pe) const { return out_[pe].front(); }
int NocGraph::ejection_edge(int pe) const { return in_[pe].front(); }

int NocGraph::find_edge(int src, int dst) const {
  for (int e : out_[src]) {
    if (edges_[e].dst == dst) return e;
  }
  return -1;
}

namespace {

std::vector<int> bfs_hops(const NocGraph& g, int from) {
  std::vector<int> dist(g.node_count(), -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int e : g.out_edges(v)) {
      int w = g.edges()[e].dst;
      // PEs are endpoints only; never route through one.
      if (dist[w] >= 0) continue;
      dist[w] = dist[v] + 1;
      if (!g.is_pe(w)) queue.push_back(w);
    }
  }
  return dist;
}

}  // namespace

bool NocGraph::pes_strongly_connected() const {
  for (int p = 0; p < pe_count_; ++p) {
    auto dist = bfs_hops(*this, p);
    for (int q = 0; q < pe_count_; ++q) {
      if (dist[q] < 0) return false;
    }
  }
  return true;
}

int NocGraph::pe_diameter() const {
  int diameter = 0;
  for (int p = 0; p < pe_count_; ++p) {
    auto dist = bfs_hops(*this, p);
    for (int q = 0; q < pe_count_; ++q) {
      if (q != p) diameter = std::max(diameter, dist[q]);
    }
  }
  return diameter;
}

namespace {

class Builder {
 public:
  int add(NodeKind kind) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{id, kind, std::nullopt});
    return id;
  }
  void link(int a, int b) { edges_.push_back(Edge{a, b, 1.0, 0}); }
  void bilink(int a, int b) {
    link(a, b);
    link(b, a);
  }
  std::vector<Node>& nodes() { return nodes_; }
  NocGraph finish(int flit_bits, std::string family) {
    return NocGraph(flit_bits, std::move(family), std::move(nodes_), std::move(edges_));
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

NocGraph make_mesh(const MeshSpec& s, int flit_bits) {
  if (s.rows <= 0 || s.cols <= 0) throw Error("mesh dimensions must be positive");
  if (s.rows * s.cols < 2) throw Error("mesh needs at least two PEs");
  Builder b;
  const int count = s.rows * s.cols;
  for (int i = 0; i < count; ++i) b.add(NodeKind::Pe);
  for (int i = 0; i < count; ++i) b.add(NodeKind::Switch);
  for (int i = 0; i < count; ++i) {
    Point p{static_cast<double>(i % s.cols), static_cast<double>(i / s.cols)};
    b.nodes()[i].pos = p;
    b.nodes()[count + i].pos = p;
  }
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      int pe = r * s.cols + c;
      int sw = count + pe;
      b.bilink(pe, sw);
      if (c + 1 < s.cols) b.bilink(sw, sw + 1);
      if (r + 1 < s.rows) b.bilink(sw, sw + s.cols);
    }
  }
  return b.finish(flit_bits, "mesh");
}

NocGraph make_clos3(const Clos3Spec& s, int flit_bits) {
  if (s.m <= 0 || s.n <= 0 || s.r <= 0) throw Error("Clos parameters must be positive");
  if (s.n * s.r < 2) throw Error("Clos network needs at least two PEs");
  if (s.r > 1 && s.m < 1) throw Error("Clos network needs middle switches");
  Builder b;
  for (int i = 0; i < s.n * s.r; ++i) b.add(NodeKind::Pe);
  const int edge_base = s.n * s.r;
  for (int i = 0; i < s.r; ++i) b.add(NodeKind::Switch);
  const int middle_base = edge_base + s.r;
  for (int i = 0; i < s.m; ++i) b.add(NodeKind::Switch);
  for (int p = 0; p < s.n * s.r; ++p) b.bilink(p, edge_base + p / s.n);
  for (int i = 0; i < s.r; ++i) {
    for (int j = 0; j < s.m; ++j) b.bilink(edge_base + i, middle_base + j);
  }
  return b.finish(flit_bits, "clos3");
}

int exact_log2(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return (1 << bits) == n ? bits : -1;
}

NocGraph make_benes(const BenesSpec& s, int flit_bits) {
  const int levels = exact_log2(s.n);
  if (s.n < 2 || levels < 0) throw Error("Beneš size must be a power of two >= 2");
  const int stages = 2 * levels - 1;
  const int per_stage = s.n / 2;
  Builder b;
  for (int i = 0; i < s.n; ++i) b.add(NodeKind::Pe);
  const int base = s.n;
  for (int i = 0; i < stages * per_stage; ++i) b.add(NodeKind::Switch);
  auto sw = [&](int stage, int j) { return base + stage * per_stage + j; };
  for (int p = 0; p < s.n; ++p) {
    b.link(p, sw(0, p / 2));
    b.link(sw(stages - 1, p / 2), p);
  }
  // Butterfly on the way in (high bit first), mirrored on the way out.
  for (int stage = 0; stage + 1 < stages; ++stage) {
    int bit = stage < levels - 1 ? levels - 2 - stage : stage - (levels - 1);
    for (int j = 0; j < per_stage; ++j) {
      b.link(sw(stage, j), sw(stage + 1, j));
      b.link(sw(stage, j), sw(stage + 1, j ^ (1 << bit)));
    }
  }
  return b.finish(flit_bits, "benes");
}

NocGraph make_kary_nfly(const KaryNflySpec& s, int flit_bits) {
  if (s.k < 2 || s.n < 1) throw Error("k-ary n-fly needs k >= 2 and n >= 1");
  int pes = 1;
  for (int i = 0; i < s.n; ++i) pes *= s.k;
  const int per_stage = pes / s.k;
  Builder b;
  for (int i = 0; i < pes; ++i) b.add(NodeKind::Pe);
  const int base = pes;
  for (int i = 0; i < s.n * per_stage; ++i) b.add(NodeKind::Switch);
  auto sw = [&](int stage, int j) { return base + stage * per_stage + j; };
  for (int p = 0; p < pes; ++p) {
    b.link(p, sw(0, p / s.k));
    b.link(sw(s.n - 1, p / s.k), p);
  }
  // Stage s resolves base-k digit (n - 2 - s) of the switch index.
  for (int stage = 0; stage + 1 < s.n; ++stage) {
    int place = 1;
    for (int i = 0; i < s.n - 2 - stage; ++i) place *= s.k;
    for (int j = 0; j < per_stage; ++j) {
      int digit = (j / place) % s.k;
      for (int d = 0; d < s.k; ++d) b.link(sw(stage, j), sw(stage + 1, j + (d - digit) * place));
    }
  }
  return b.finish(flit_bits, "kary_nfly");
}

using UndirectedEdge = std::pair<int, int>;

std::vector<int> components(int n, const std::set<UndirectedEdge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> comp(n, -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::deque<int> queue{s};
    comp[s] = next;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = next;
          queue.push_back(w);
        }
      }
    }
    ++next;
  }
  return comp;
}

// Smallest edge of component `c` whose removal keeps its endpoints connected.
std::optional<UndirectedEdge> cycle_edge(int n, const std::set<UndirectedEdge>& edges,
                                         const std::vector<int>& comp, int c) {
  for (const auto& e : edges) {
    if (comp[e.first] != c) continue;
    auto without = edges;
    without.erase(e);
    auto after = components(n, without);
    if (after[e.first] == after[e.second]) return e;
  }
  return std::nullopt;
}

NocGraph make_random_matchings(const RandomMatchingsSpec& s, int flit_bits) {
  if (s.n < 2 || s.n % 2 != 0) throw Error("random matching graph needs an even number of PEs >= 2");
  Rng rng(s.seed);
  std::set<UndirectedEdge> links;
  for (int round = 0; round < 2; ++round) {
    std::vector<int> perm(s.n);
    for (int i = 0; i < s.n; ++i) perm[i] = i;
    rng.shuffle(std::span<int>(perm));
    for (int i = 0; i < s.n; i += 2) {
      links.insert(std::minmax(perm[i], perm[i + 1]));
    }
  }
  // Merge components pairwise: swap one cycle edge from each when possible
  // (degrees preserved), otherwise add a bridging edge.
  while (true) {
    auto comp = components(s.n, links);
    int other = -1;
    for (int v = 0; v < s.n; ++v) {
      if (comp[v] != comp[0]) {
        other = v;
        break;
      }
    }
    if (other < 0) break;
    auto ea = cycle_edge(s.n, links, comp, comp[0]);
    auto eb = cycle_edge(s.n, links, comp, comp[other]);
    if (ea && eb) {
      links.erase(*ea);
      links.erase(*eb);
      links.insert(std::minmax(ea->first, eb->first));
      links.insert(std::minmax(ea->second, eb->second));
    } else {
      links.insert(std::minmax(0, other));
    }
  }
  Builder b;
  for (int i = 0; i < s.n; ++i) b.add(NodeKind::Pe);
  for (int i = 0; i < s.n; ++i) b.add(NodeKind::Switch);
  for (int p = 0; p < s.n; ++p) b.bilink(p, s.n + p);
  for (auto [x, y] : links) b.bilink(s.n + x, s.n + y);
  return b.finish(flit_bits, "random");
}

}  // namespace

NocGraph generate_topology(const TopologySpec& spec, int flit_bits) {
  if (flit_bits <= 0) throw Error("flit size must be positive");
  NocGraph g = std::visit(
      [&](const auto& s) -> NocGraph {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MeshSpec>) return make_mesh(s, flit_bits);
        if constexpr (std::is_same_v<T, Clos3Spec>) return make_clos3(s, flit_bits);
        if constexpr (std::is_same_v<T, BenesSpec>) return make_benes(s, flit_bits);
        if constexpr (std::is_same_v<T, KaryNflySpec>) return make_kary_nfly(s, flit_bits);
        if constexpr (std::is_same_v<T, RandomMatchingsSpec>) return make_random_matchings(s, flit_bits);
      },
      spec);
  if (!g.pes_strongly_connected()) throw Error("generated topology is not connected: " + topology_name(spec));
  return g;
}

std::string topology_name(const TopologySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MeshSpec>) {
          return "mesh" + std::to_string(s.rows) + "x" + std::to_string(s.cols);
        } else if constexpr (std::is_same_v<T, Clos3Spec>) {
          return "clos3(" + std::to_string(s.m) + "," + std::to_string(s.n) + "," + std::to_string(s.r) + ")";
        } else if constexpr (std::is_same_v<T, BenesSpec>) {
          return "benes" + std::to_string(s.n);
        } else if constexpr (std::is_same_v<T, KaryNflySpec>) {
          return std::to_string(s.k) + "-ary-" + std::to_string(s.n) + "-fly";
        } else {
          return "random" + std::to_string(s.n);
        }
      },
      spec);
}

Placement floorplan(NocGraph& graph) {
  if (graph.family() == "mesh") {
    // Mesh: unit-length links, switches sit on their PE's grid point.
    Placement placement;
    placement.position.resize(graph.node_count());
    for (const Node& n : graph.nodes()) placement.position[n.id] = n.pos.value_or(Point{});
    for (Edge& e : graph.edges()) e.cost = 1.0;
    return placement;
  }
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(graph.pe_count()))));
  std::vector<Point> anchors(graph.pe_count());
  for (int p = 0; p < graph.pe_count(); ++p) {
    anchors[p] = Point{static_cast<double>(p % side), static_cast<double>(p / side)};
  }
  return floorplan(graph, anchors);
}

Placement floorplan(NocGraph& graph, std::span<const Point> pe_positions) {
  if (static_cast<int>(pe_positions.size()) != graph.pe_count()) {
    throw Error("floorplan needs one anchor per PE");
  }
  const int n = graph.node_count();
  std::vector<std::vector<int>> neighbours(n);
  for (const Edge& e : graph.edges()) {
    neighbours[e.src].push_back(e.dst);
    neighbours[e.dst].push_back(e.src);
  }
  for (auto& list : neighbours) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  Placement placement;
  placement.position.assign(n, Point{});
  Point centroid;
  for (int p = 0; p < graph.pe_count(); ++p) {
    placement.position[p] = pe_positions[p];
    centroid.x += pe_positions[p].x / graph.pe_count();
    centroid.y += pe_positions[p].y / graph.pe_count();
  }
  for (int v = graph.pe_count(); v < n; ++v) placement.position[v] = centroid;

  constexpr double kTolerance = 1e-6;
  constexpr int kMaxIterations = 1000;
  for (int it = 0; it < kMaxIterations; ++it) {
    double moved = 0.0;
    for (int v = graph.pe_count(); v < n; ++v) {
      if (neighbours[v].empty()) continue;
      Point mean;
      for (int w : neighbours[v]) {
        mean.x += placement.position[w].x;
        mean.y += placement.position[w].y;
      }
      mean.x /= static_cast<double>(neighbours[v].size());
      mean.y /= static_cast<double>(neighbours[v].size());
      moved = std::max(moved, std::hypot(mean.x - placement.position[v].x, mean.y - placement.position[v].y));
      placement.position[v] = mean;
    }
    placement.iterations = it + 1;
    if (moved < kTolerance) break;
  }

  for (Node& node : graph.nodes()) node.pos = placement.position[node.id];
  for (Edge& e : graph.edges()) {
    const Point& a = placement.position[e.src];
    const Point& b = placement.position[e.dst];
    e.cost = std::hypot(a.x - b.x, a.y - b.y);
  }
  return placement;
}

nlohmann::json to_json(const NocGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : graph.nodes()) {
    nlohmann::json jn{{"id", n.id}, {"kind", n.kind == NodeKind::Pe ? "pe" : "switch"}};
    if (n.pos) jn["pos"] = {n.pos->x, n.pos->y};
    nodes.push_back(std::move(jn));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"cost", e.cost}, {"width_bits", e.width_bits}});
  }
  return {{"flit_bits", graph.flit_bits()}, {"topology", graph.family()}, {"nodes", nodes}, {"edges", edges}};
}

NocGraph graph_from_json(const nlohmann::json& j) {
  std::vector<Node> nodes;
  for (const auto& jn : j.at("nodes")) {
    Node n;
    n.id = jn.at("id").get<int>();
    const auto kind = jn.at("kind").get<std::string>();
    if (kind == "pe") {
      n.kind = NodeKind::Pe;
    } else if (kind == "switch") {
      n.kind = NodeKind::Switch;
    } else {
      throw Error("unknown node kind: " + kind);
    }
    if (jn.contains("pos")) n.pos = Point{jn["pos"].at(0).get<double>(), jn["pos"].at(1).get<double>()};
    nodes.push_back(n);
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  std::vector<Edge> edges;
  for (const auto& je : j.at("edges")) {
    edges.push_back(Edge{je.at("src").get<int>(), je.at("dst").get<int>(), je.at("cost").get<double>(),
                         je.value("width_bits", std::int64_t{0})});
  }
  return NocGraph(j.at("flit_bits").get<int>(), j.value("topology", std::string{}), std::move(nodes),
                  std::move(edges));
}

}  // namespace nocweave
