// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

// Fixed suite of tiny routing instances (at most 6 nodes, 3 commodities).

#pragma once

#include <optional>
#include <set>
#include <vector>

#include "nocweave/graph.hpp"
#include "nocweave/mcf.hpp"
#include "nocweave/random.hpp"
#include "oracle/paths.hpp"

namespace oracle {

struct SmallInstance {
  NocGraph graph;
  std::vector<Commodity> commodities;
  std::vector<Rational> capacity;
  std::optional<int> hop_limit;
};

inline std::vector<SmallInstance> small_suite(int count = 48) {
  std::vector<SmallInstance> out;
  for (int seed = 0; seed < count; ++seed) {
    nocweave::Rng rng(1000 + seed);
    const int switches = 2 + seed % 3;
    const int pes = static_cast<int>(rng.between(2, 6 - switches));
    std::vector<nocweave::Node> nodes;
    for (int i = 0; i < pes; ++i) nodes.push_back({i, nocweave::NodeKind::Pe, std::nullopt});
    for (int i = 0; i < switches; ++i) nodes.push_back({pes + i, nocweave::NodeKind::Switch, std::nullopt});
    std::set<std::pair<int, int>> arcs;
    for (int i = 0; i < pes; ++i) {
      int sw = pes + static_cast<int>(rng.below(switches));
      arcs.insert({i, sw});
      arcs.insert({sw, i});
    }
    // Directed ring keeps the switches strongly connected; extra arcs add choice.
    for (int i = 0; i < switches; ++i) arcs.insert({pes + i, pes + (i + 1) % switches});
    for (int a = 0; a < switches; ++a) {
      for (int b = 0; b < switches; ++b) {
        if (a != b && rng.below(2) == 0) arcs.insert({pes + a, pes + b});
      }
    }
    std::vector<nocweave::Edge> edges;
    for (auto [a, b] : arcs) edges.push_back({a, b, static_cast<double>(rng.between(1, 6)) / 2.0, 0});
    SmallInstance inst{NocGraph(4, "small", nodes, edges), {}, {}, std::nullopt};
    for (int e = 0; e < inst.graph.edge_count(); ++e) inst.capacity.emplace_back(rng.between(1, 3));
    const int k = static_cast<int>(rng.between(1, 3));
    std::set<std::pair<int, int>> pairs;
    for (int tries = 0; static_cast<int>(pairs.size()) < k && tries < 50; ++tries) {
      int s = static_cast<int>(rng.below(pes));
      int d = static_cast<int>(rng.below(pes));
      if (s != d) pairs.insert({s, d});
    }
    for (auto [s, d] : pairs) {
      inst.commodities.push_back(
          {static_cast<int>(inst.commodities.size()), s, d, Rational(rng.between(1, 8), 4)});
    }
    if (seed % 3 == 2) {
      int need = 0;
      for (const Commodity& c : inst.commodities) {
        int shortest = 1 << 20;
        for (const auto& p : simple_paths(inst.graph, c.src, c.dst)) shortest = std::min<int>(shortest, p.size());
        need = std::max(need, shortest);
      }
      inst.hop_limit = need + static_cast<int>(rng.below(2));
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace oracle
