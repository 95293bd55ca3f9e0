// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force routing oracles: simple-path enumeration, min-congestion LP over
// all paths, and Edmonds-Karp max-flow.

#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "nocweave/graph.hpp"
#include "nocweave/mcf.hpp"
#include "nocweave/rational.hpp"
#include "oracle/simplex.hpp"

namespace oracle {

using nocweave::Commodity;
using nocweave::NocGraph;
using nocweave::Rational;

/// Every simple path from src to dst whose interior avoids PEs.
inline std::vector<std::vector<int>> simple_paths(const NocGraph& g, int src, int dst,
                                                  std::optional<int> hop_limit = std::nullopt) {
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<char> seen(g.node_count(), 0);
  std::function<void(int)> dfs = [&](int v) {
    if (v == dst) {
      out.push_back(path);
      return;
    }
    if (v != src && g.is_pe(v)) return;
    if (hop_limit && static_cast<int>(path.size()) >= *hop_limit) return;
    seen[v] = 1;
    for (int e : g.out_edges(v)) {
      int w = g.edges()[e].dst;
      if (seen[w]) continue;
      path.push_back(e);
      dfs(w);
      path.pop_back();
    }
    seen[v] = 0;
  };
  dfs(src);
  return out;
}

inline Rational path_cost(const NocGraph& g, const std::vector<int>& path) {
  Rational c(0);
  for (int e : path) c += nocweave::rational_from_double(g.edges()[e].cost);
  return c;
}

/// Shortest src-dst distance by enumeration; nullopt when unreachable.
inline std::optional<Rational> brute_distance(const NocGraph& g, int src, int dst,
                                              std::optional<int> hop_limit = std::nullopt) {
  std::optional<Rational> best;
  for (const auto& p : simple_paths(g, src, dst, hop_limit)) {
    Rational c = path_cost(g, p);
    if (!best || c < *best) best = c;
  }
  return best;
}

/// Optimal congestion over path flows, by an exact LP over all simple paths.
inline std::optional<Rational> brute_lambda(const NocGraph& g, const std::vector<Commodity>& commodities,
                                            const std::vector<Rational>& capacity,
                                            std::optional<int> hop_limit = std::nullopt) {
  std::vector<std::pair<int, std::vector<int>>> columns;  // (commodity, path)
  for (const Commodity& c : commodities) {
    for (auto& p : simple_paths(g, c.src, c.dst, hop_limit)) columns.emplace_back(c.id, std::move(p));
  }
  const std::size_t n_paths = columns.size();
  const std::size_t m_edges = static_cast<std::size_t>(g.edge_count());
  // Variables: x_p, lambda, slack_e.
  const std::size_t n = n_paths + 1 + m_edges;
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (const Commodity& c : commodities) {
    std::vector<Rational> row(n, Rational(0));
    for (std::size_t p = 0; p < n_paths; ++p) {
      if (columns[p].first == c.id) row[p] = 1;
    }
    a.push_back(row);
    b.push_back(c.demand);
  }
  for (std::size_t e = 0; e < m_edges; ++e) {
    std::vector<Rational> row(n, Rational(0));
    for (std::size_t p = 0; p < n_paths; ++p) {
      if (std::count(columns[p].second.begin(), columns[p].second.end(), static_cast<int>(e))) row[p] = 1;
    }
    row[n_paths] = -capacity[e];
    row[n_paths + 1 + e] = 1;
    a.push_back(row);
    b.push_back(Rational(0));
  }
  std::vector<Rational> cost(n, Rational(0));
  cost[n_paths] = 1;
  return Simplex(a, b, cost).minimize();
}

/// Maximum src-dst flow with the given capacities (PEs other than the
/// endpoints are not traversed).
inline Rational max_flow(const NocGraph& g, const std::vector<Rational>& capacity, int src, int dst) {
  const int n = g.node_count();
  std::vector<std::vector<Rational>> res(n, std::vector<Rational>(n, Rational(0)));
  for (int e = 0; e < g.edge_count(); ++e) res[g.edges()[e].src][g.edges()[e].dst] += capacity[e];
  Rational total(0);
  while (true) {
    std::vector<int> prev(n, -1);
    prev[src] = src;
    std::deque<int> q{src};
    while (!q.empty() && prev[dst] < 0) {
      int v = q.front();
      q.pop_front();
      if (v != src && g.is_pe(v)) continue;
      for (int w = 0; w < n; ++w) {
        if (prev[w] < 0 && res[v][w] > 0) {
          prev[w] = v;
          q.push_back(w);
        }
      }
    }
    if (prev[dst] < 0) return total;
    Rational push = res[prev[dst]][dst];
    for (int v = dst; v != src; v = prev[v]) push = std::min(push, res[prev[v]][v]);
    for (int v = dst; v != src; v = prev[v]) {
      res[prev[v]][v] -= push;
      res[v][prev[v]] += push;
    }
    total += push;
  }
}

}  // namespace oracle
