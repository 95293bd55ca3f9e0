// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nocweave/demands.hpp"
#include "nocweave/fabric.hpp"
#include "nocweave/graph.hpp"
#include "nocweave/mcf.hpp"
#include "nocweave/report.hpp"
#include "nocweave/schedule.hpp"
#include "nocweave/tcg.hpp"

namespace nocweave {

enum class TrafficKind { Random, TcgFile, SyntheticTcg };

struct PipelineConfig {
  TopologySpec topology = MeshSpec{4, 4};
  int phi = 8;
  int flit_bits = 4;
  ObjectiveKind objective = ObjectiveKind::MinCost;
  double epsilon = 0.02;
  std::optional<int> hop_limit;
  std::optional<std::int64_t> latency;  // L; defaults to phi * PE diameter
  std::optional<Rational> alpha;        // defaults to flit_bits
  bool alpha_infinite = false;
  std::uint64_t seed = 1;
  int periods = 8;                      // steady-traffic horizon
  TrafficKind traffic = TrafficKind::Random;
  std::filesystem::path tcg_file;
  SyntheticTcgOptions synthetic;        // pes and flit_bits come from the network
  int iterations = 5;                   // application periods replayed
};

/// Parses a JSON configuration; relative paths are resolved against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PipelineConfig& config);

/// Rejects invalid settings with ConfigError before any stage runs.
void validate_config(const PipelineConfig& config);

RtParams rt_params(const PipelineConfig& config, const NocGraph& graph);

std::string objective_name(ObjectiveKind kind);
ObjectiveKind parse_objective(const std::string& name);

struct TrafficArtifacts {
  DemandMatrix demands;
  std::optional<Tcg> tcg;  // one application period, app_period set
};

struct SolveArtifacts {
  std::vector<Commodity> commodities;
  std::vector<PathFlow> paths;
  ObjectiveKind objective = ObjectiveKind::MinCost;
  Rational value;
  std::optional<Rational> lambda_lower_bound;
};

struct RoundArtifacts {
  std::vector<RoundedPathFlow> rounded;
  EdgeLoads loads;
};

NocGraph stage_gen(const PipelineConfig& config);
TrafficArtifacts stage_demands(const PipelineConfig& config, const NocGraph& graph);
SolveArtifacts stage_solve(const PipelineConfig& config, const NocGraph& graph, const DemandMatrix& demands);
/// Rounds the paths and writes the widths into `graph`.
RoundArtifacts stage_round(const PipelineConfig& config, NocGraph& graph, const SolveArtifacts& solved);
PeriodicSchedule stage_schedule(const PipelineConfig& config, const NocGraph& sized, const SolveArtifacts& solved,
                                const RoundArtifacts& rounded);
ControlTables stage_emit(const PeriodicSchedule& schedule, const NocGraph& sized);
SimReport stage_sim(const PipelineConfig& config, const NocGraph& sized, const ControlTables& controls,
                    const TrafficArtifacts& traffic);
ReportRow stage_report(const PipelineConfig& config, const NocGraph& sized, const TrafficArtifacts& traffic,
                       const SolveArtifacts& solved, const RoundArtifacts& rounded, const ControlTables& controls,
                       const SimSummary& sim);

struct PipelineResult {
  NocGraph graph;  // sized
  TrafficArtifacts traffic;
  SolveArtifacts solved;
  RoundArtifacts rounded;
  PeriodicSchedule schedule;
  ControlTables controls;
  SimReport sim;
  SimSummary summary;
  ReportRow report;
};

/// Runs every stage in memory.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Stage names in pipeline order.
const std::vector<std::string>& stage_names();

/// Runs one stage, reading its inputs from and writing its outputs to
/// `out_dir`.
void run_stage(const std::string& stage, const PipelineConfig& config, const std::filesystem::path& out_dir);

/// Runs every stage through the artifact files.
void run_all(const PipelineConfig& config, const std::filesystem::path& out_dir);

}  // namespace nocweave
