// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nocweave {

enum class NodeKind { Pe, Switch };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Switch;
  std::optional<Point> pos;
};

/// Directed interconnection. `cost` is a length estimate; `width_bits` is 0
/// until widths are assigned, then a multiple of the flit size.
struct Edge {
  int src = 0;
  int dst = 0;
  double cost = 1.0;
  std::int64_t width_bits = 0;
};

/// The NoC graph: PEs and switches joined by directed edges.
///
/// Node ids are dense, and every generator numbers the PEs first so that a PE
/// index doubles as its node id. Edges are kept sorted by (src, dst) and an
/// edge is referred to by its position in that order. Each PE has exactly one
/// outgoing (injection) and one incoming (ejection) network interface link.
class NocGraph {
 public:
  NocGraph() = default;
  NocGraph(int flit_bits, std::string family, std::vector<Node> nodes, std::vector<Edge> edges);

  int flit_bits() const { return flit_bits_; }
  const std::string& family() const { return family_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<Node>& nodes() { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<Edge>& edges() { return edges_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int pe_count() const { return pe_count_; }
  bool is_pe(int node) const { return nodes_[node].kind == NodeKind::Pe; }

  std::span<const int> out_edges(int node) const { return out_[node]; }
  std::span<const int> in_edges(int node) const { return in_[node]; }

  /// Edge leaving / entering the given PE through its network interface.
  int injection_edge(int pe) const;
  int ejection_edge(int pe) const;

  /// Index of edge (src, dst), or -1.
  int find_edge(int src, int dst) const;

  /// Every PE can reach every other PE.
  bool pes_strongly_connected() const;

  /// Hop diameter over PE pairs (NI links included).
  int pe_diameter() const;

 private:
  void index();

  int flit_bits_ = 4;
  std::string family_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  int pe_count_ = 0;
};

struct MeshSpec {
  int rows = 0;
  int cols = 0;
};
/// Folded three-level Clos: `r` edge switches with `n` PEs each, fully
/// connected to `m` middle switches.
struct Clos3Spec {
  int m = 0;
  int n = 0;
  int r = 0;
};
/// Beneš network over `n` PEs (power of two): 2 log2(n) - 1 stages of 2x2 switches.
struct BenesSpec {
  int n = 0;
};
/// k-ary n-fly: k^n PEs, n stages of k^(n-1) switches of radix k.
struct KaryNflySpec {
  int k = 0;
  int n = 0;
};
/// One switch per PE; switch graph is the union of two random perfect
/// matchings, rewired until connected.
struct RandomMatchingsSpec {
  int n = 0;
  std::uint64_t seed = 0;
};

using TopologySpec = std::variant<MeshSpec, Clos3Spec, BenesSpec, KaryNflySpec, RandomMatchingsSpec>;

NocGraph generate_topology(const TopologySpec& spec, int flit_bits);

std::string topology_name(const TopologySpec& spec);

struct Placement {
  std::vector<Point> position;  // per node id
  int iterations = 0;
};

/// Places PEs on a square grid and relaxes each switch to the mean of its
/// neighbours; edge cost becomes the Euclidean length. Mesh graphs keep their
/// unit costs and grid placement.
Placement floorplan(NocGraph& graph);

/// Same relaxation with caller-supplied PE anchors (indexed by PE id).
Placement floorplan(NocGraph& graph, std::span<const Point> pe_positions);

nlohmann::json to_json(const NocGraph& graph);
NocGraph graph_from_json(const nlohmann::json& j);

}  // namespace nocweave
