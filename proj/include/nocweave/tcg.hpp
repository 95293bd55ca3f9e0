// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "nocweave/rational.hpp"

namespace nocweave {

struct Task {
  int id = 0;
  std::int64_t duration = 0;
  std::optional<std::int64_t> arrival;   // sources only
  std::optional<std::int64_t> deadline;  // sinks only
};

struct Message {
  int src = 0;
  int dst = 0;
  std::int64_t bits = 0;
};

/// Task communication graph: a DAG of tasks whose arcs carry messages, plus
/// the task-to-PE mapping.
struct Tcg {
  std::vector<Task> tasks;
  std::vector<Message> messages;
  std::map<int, int> mapping;  // task id -> PE id
  std::optional<std::int64_t> app_period;

  const Task& task(int id) const;
  /// Task ids in a deterministic topological order (Kahn, smallest id first).
  /// Throws on a cycle.
  std::vector<int> topological_order() const;
};

/// Message delay bound parameters: a message of |m| bits is allowed
/// latency + |m| / alpha slots. An empty alpha means infinite width.
struct RtParams {
  std::int64_t latency = 0;
  std::optional<Rational> alpha;

  Rational message_delay(std::int64_t bits) const;
};

struct TimingSpec {
  std::map<int, Rational> end;  // task id -> specified completion slot
  Rational makespan() const;
};

TimingSpec compute_spec(const Tcg& tcg, const RtParams& params);

struct LagReport {
  std::map<int, Rational> lag;
  Rational sum_lag;
  Rational max_lag;
};

LagReport compute_lags(const TimingSpec& spec, const std::map<int, Rational>& observed);

enum class DriftKind { None, Bounded, Drift };

struct DriftResult {
  DriftKind kind = DriftKind::None;
  Rational slope;
};

/// Least-squares slope of lag against instance index. Slopes within
/// 0.01 slots per instance are not drifts.
DriftResult detect_drift(std::span<const Rational> lags);

/// Repeats the graph `iterations` times; instance i of task t gets id
/// i * stride + t with stride = max id + 1, and sources arrive app_period
/// later per iteration.
Tcg unroll(const Tcg& tcg, int iterations, std::int64_t app_period);
int unrolled_stride(const Tcg& tcg);

struct SyntheticTcgOptions {
  int tasks = 24;
  int pes = 16;
  int layers = 5;
  std::int64_t max_duration = 6;
  int max_message_flits = 8;
  int flit_bits = 4;
};

/// Random layered DAG mapped onto PEs. Tasks that share a PE are chained by
/// local messages so that each PE's tasks are totally ordered.
Tcg generate_synthetic_tcg(const SyntheticTcgOptions& options, std::uint64_t seed);

nlohmann::json to_json(const Tcg& tcg);
Tcg tcg_from_json(const nlohmann::json& j);

}  // namespace nocweave
