// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nocweave/demands.hpp"
#include "nocweave/graph.hpp"
#include "nocweave/rational.hpp"

namespace nocweave {

/// One ordered PE pair to be routed. `id` equals the commodity's position in
/// the commodity list.
struct Commodity {
  int id = 0;
  int src = 0;
  int dst = 0;
  Rational demand;  // flits per slot
};

/// Commodities for every non-zero pair of the matrix, in (src, dst) order,
/// with the peak rate as the demand.
std::vector<Commodity> make_commodities(const DemandMatrix& dm);

enum class ObjectiveKind { MinCost, MinCongestion };

struct FlowAssignment {
  ObjectiveKind objective = ObjectiveKind::MinCost;
  std::vector<std::map<int, Rational>> commodity_flow;  // per commodity: edge -> flow
  std::vector<Rational> edge_flow;                      // f(e)
  Rational value;                                       // total cost, or lambda
  std::optional<Rational> lambda_lower_bound;           // certified bound on the optimum lambda
  std::optional<int> hop_limit;
};

/// Routes every commodity on its lexicographically smallest minimum-cost path
/// (at most `hop_limit` edges when set). Costs are the exact edge lengths.
FlowAssignment solve_min_cost(const NocGraph& graph, const std::vector<Commodity>& commodities,
                              std::optional<int> hop_limit = std::nullopt);

struct CongestionOptions {
  double epsilon = 0.02;
  std::optional<int> hop_limit;
  int max_phases = 20000;
};

/// Fractional routing minimising lambda subject to f(e) <= lambda * u(e).
/// Multiplicative-weights over shortest paths, stopped once the averaged flow
/// is within (1 + epsilon) of a dual lower bound; the result is rescaled in
/// exact arithmetic so every demand is met exactly.
FlowAssignment solve_min_congestion(const NocGraph& graph, const std::vector<Commodity>& commodities,
                                    const std::vector<Rational>& capacities, const CongestionOptions& options);

struct PathFlow {
  int commodity = 0;
  std::vector<int> path;  // edge indices from src to dst
  Rational amount;
};

/// Cancels flow cycles, then repeatedly strips the widest source-to-sink path
/// (ties broken by node sequence). Output is ordered per commodity by amount
/// descending, then by path.
std::vector<PathFlow> decompose(const NocGraph& graph, const std::vector<Commodity>& commodities,
                                const FlowAssignment& flow);

struct FlowCheck {
  bool ok = true;
  std::string message;
};

FlowCheck verify_flow(const NocGraph& graph, const std::vector<Commodity>& commodities, const FlowAssignment& flow);

/// Node sequence of an edge path.
std::vector<int> path_nodes(const NocGraph& graph, const std::vector<int>& path);

/// Flow JSON: decomposed paths per commodity plus the objective value.
nlohmann::json flow_to_json(const std::vector<Commodity>& commodities, const std::vector<PathFlow>& paths,
                            const FlowAssignment& flow);

struct StoredFlow {
  std::vector<Commodity> commodities;
  std::vector<PathFlow> paths;
  ObjectiveKind objective = ObjectiveKind::MinCost;
  Rational value;
};
StoredFlow flow_from_json(const nlohmann::json& j);

}  // namespace nocweave
