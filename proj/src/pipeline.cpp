// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "nocweave/error.hpp"

namespace nocweave {

std::string objective_name(ObjectiveKind kind) { return kind == ObjectiveKind::MinCost ? "mincost" : "mincong"; }

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "mincost") return ObjectiveKind::MinCost;
  if (name == "mincong") return ObjectiveKind::MinCongestion;
  throw ConfigError("unknown objective '" + name + "' (expected mincost or mincong)");
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

TopologySpec topology_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "mesh") {
    check_keys(j, {"kind", "rows", "cols"}, "topology");
    return MeshSpec{j.at("rows").get<int>(), j.at("cols").get<int>()};
  }
  if (kind == "clos3") {
    check_keys(j, {"kind", "m", "n", "r"}, "topology");
    return Clos3Spec{j.at("m").get<int>(), j.at("n").get<int>(), j.at("r").get<int>()};
  }
  if (kind == "benes") {
    check_keys(j, {"kind", "n"}, "topology");
    return BenesSpec{j.at("n").get<int>()};
  }
  if (kind == "kary_nfly") {
    check_keys(j, {"kind", "k", "n"}, "topology");
    return KaryNflySpec{j.at("k").get<int>(), j.at("n").get<int>()};
  }
  if (kind == "random") {
    check_keys(j, {"kind", "n", "seed"}, "topology");
    return RandomMatchingsSpec{j.at("n").get<int>(), j.value("seed", std::uint64_t{0})};
  }
  throw ConfigError("unknown topology kind '" + kind + "'");
}

nlohmann::json topology_to_json(const TopologySpec& spec) {
  return std::visit(
      [](const auto& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MeshSpec>) {
          return {{"kind", "mesh"}, {"rows", s.rows}, {"cols", s.cols}};
        } else if constexpr (std::is_same_v<T, Clos3Spec>) {
          return {{"kind", "clos3"}, {"m", s.m}, {"n", s.n}, {"r", s.r}};
        } else if constexpr (std::is_same_v<T, BenesSpec>) {
          return {{"kind", "benes"}, {"n", s.n}};
        } else if constexpr (std::is_same_v<T, KaryNflySpec>) {
          return {{"kind", "kary_nfly"}, {"k", s.k}, {"n", s.n}};
        } else {
          return {{"kind", "random"}, {"n", s.n}, {"seed", s.seed}};
        }
      },
      spec);
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"topology", "phi", "flit_bits", "objective", "epsilon", "hop_limit", "L", "alpha", "seed", "periods",
                 "traffic"},
             "configuration");
  PipelineConfig c;
  try {
    if (j.contains("topology")) c.topology = topology_from_json(j["topology"]);
    c.phi = j.value("phi", c.phi);
    c.flit_bits = j.value("flit_bits", c.flit_bits);
    if (j.contains("objective")) c.objective = parse_objective(j["objective"].get<std::string>());
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("hop_limit") && !j["hop_limit"].is_null()) c.hop_limit = j["hop_limit"].get<int>();
    if (j.contains("L") && !j["L"].is_null()) c.latency = j["L"].get<std::int64_t>();
    if (j.contains("alpha") && !j["alpha"].is_null()) {
      const auto& a = j["alpha"];
      std::string text = a.is_string() ? a.get<std::string>() : a.dump();
      if (text == "inf") {
        c.alpha_infinite = true;
      } else {
        c.alpha = parse_rational(text);
      }
    }
    c.seed = j.value("seed", c.seed);
    c.periods = j.value("periods", c.periods);
    if (j.contains("traffic")) {
      const auto& t = j["traffic"];
      const std::string kind = t.at("kind").get<std::string>();
      if (kind == "random") {
        check_keys(t, {"kind"}, "traffic");
        c.traffic = TrafficKind::Random;
      } else if (kind == "tcg") {
        check_keys(t, {"kind", "file", "iterations"}, "traffic");
        c.traffic = TrafficKind::TcgFile;
        std::filesystem::path file = t.at("file").get<std::string>();
        c.tcg_file = file.is_relative() && !base_dir.empty() ? base_dir / file : file;
        c.iterations = t.value("iterations", c.iterations);
      } else if (kind == "synthetic_tcg") {
        check_keys(t, {"kind", "tasks", "layers", "max_duration", "max_message_flits", "iterations"}, "traffic");
        c.traffic = TrafficKind::SyntheticTcg;
        c.synthetic.tasks = t.value("tasks", c.synthetic.tasks);
        c.synthetic.layers = t.value("layers", c.synthetic.layers);
        c.synthetic.max_duration = t.value("max_duration", c.synthetic.max_duration);
        c.synthetic.max_message_flits = t.value("max_message_flits", c.synthetic.max_message_flits);
        c.iterations = t.value("iterations", c.iterations);
      } else {
        throw ConfigError("unknown traffic kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j{{"topology", topology_to_json(c.topology)},
                   {"phi", c.phi},
                   {"flit_bits", c.flit_bits},
                   {"objective", objective_name(c.objective)},
                   {"epsilon", c.epsilon},
                   {"seed", c.seed},
                   {"periods", c.periods}};
  j["hop_limit"] = c.hop_limit ? nlohmann::json(*c.hop_limit) : nlohmann::json();
  j["L"] = c.latency ? nlohmann::json(*c.latency) : nlohmann::json();
  if (c.alpha_infinite) {
    j["alpha"] = "inf";
  } else {
    j["alpha"] = c.alpha ? nlohmann::json(format_rational(*c.alpha)) : nlohmann::json();
  }
  switch (c.traffic) {
    case TrafficKind::Random:
      j["traffic"] = {{"kind", "random"}};
      break;
    case TrafficKind::TcgFile:
      j["traffic"] = {{"kind", "tcg"}, {"file", c.tcg_file.string()}, {"iterations", c.iterations}};
      break;
    case TrafficKind::SyntheticTcg:
      j["traffic"] = {{"kind", "synthetic_tcg"},
                      {"tasks", c.synthetic.tasks},
                      {"layers", c.synthetic.layers},
                      {"max_duration", c.synthetic.max_duration},
                      {"max_message_flits", c.synthetic.max_message_flits},
                      {"iterations", c.iterations}};
      break;
  }
  return j;
}

void validate_config(const PipelineConfig& c) {
  if (c.phi < 1) throw ConfigError("phi must be at least 1");
  if (c.flit_bits < 1) throw ConfigError("flit_bits must be at least 1");
  if (!(c.epsilon > 0 && c.epsilon < 1)) throw ConfigError("epsilon must lie in (0, 1)");
  if (c.hop_limit && *c.hop_limit < 1) throw ConfigError("hop_limit must be positive");
  if (c.latency && *c.latency < 0) throw ConfigError("L must be non-negative");
  if (c.alpha && *c.alpha <= 0) throw ConfigError("alpha must be positive");
  if (c.periods < 2) throw ConfigError("periods must be at least 2");
  if (c.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (c.traffic != TrafficKind::Random && c.alpha_infinite) {
    throw ConfigError("task graph traffic needs a finite alpha");
  }
  if (c.traffic == TrafficKind::TcgFile && !std::filesystem::exists(c.tcg_file)) {
    throw ConfigError("task graph file not found: " + c.tcg_file.string());
  }
}

RtParams rt_params(const PipelineConfig& config, const NocGraph& graph) {
  RtParams p;
  p.latency = config.latency ? *config.latency : static_cast<std::int64_t>(config.phi) * graph.pe_diameter();
  if (!config.alpha_infinite) p.alpha = config.alpha ? *config.alpha : Rational(config.flit_bits);
  return p;
}

NocGraph stage_gen(const PipelineConfig& config) {
  NocGraph graph = generate_topology(config.topology, config.flit_bits);
  floorplan(graph);
  return graph;
}

TrafficArtifacts stage_demands(const PipelineConfig& config, const NocGraph& graph) {
  TrafficArtifacts out;
  if (config.traffic == TrafficKind::Random) {
    out.demands = gen_random_demands(graph.pe_count(), config.seed, config.phi);
    return out;
  }
  Tcg tcg;
  if (config.traffic == TrafficKind::TcgFile) {
    std::ifstream in(config.tcg_file);
    if (!in) throw Error("cannot read " + config.tcg_file.string());
    tcg = tcg_from_json(nlohmann::json::parse(in));
  } else {
    SyntheticTcgOptions options = config.synthetic;
    options.pes = graph.pe_count();
    options.flit_bits = config.flit_bits;
    tcg = generate_synthetic_tcg(options, config.seed);
  }
  const RtParams params = rt_params(config, graph);
  const TimingSpec spec = compute_spec(tcg, params);
  out.demands = reduce_tcg(tcg, params, spec, config.flit_bits, config.phi).matrix;
  if (!tcg.app_period) {
    // Whole periods covering the makespan, plus one so iterations never overlap.
    const std::int64_t periods = ceil_to_int64(spec.makespan() / config.phi) + 1;
    tcg.app_period = periods * config.phi;
  }
  if (*tcg.app_period <= 0 || *tcg.app_period % config.phi != 0) {
    throw Error("application period must be a positive multiple of phi");
  }
  out.tcg = std::move(tcg);
  return out;
}

SolveArtifacts stage_solve(const PipelineConfig& config, const NocGraph& graph, const DemandMatrix& demands) {
  SolveArtifacts out;
  out.commodities = make_commodities(demands);
  out.objective = config.objective;
  FlowAssignment flow;
  if (config.objective == ObjectiveKind::MinCost) {
    flow = solve_min_cost(graph, out.commodities, config.hop_limit);
  } else {
    CongestionOptions options;
    options.epsilon = config.epsilon;
    options.hop_limit = config.hop_limit;
    std::vector<Rational> capacities(graph.edge_count(), Rational(1));
    flow = solve_min_congestion(graph, out.commodities, capacities, options);
  }
  const FlowCheck check = verify_flow(graph, out.commodities, flow);
  if (!check.ok) throw Error("flow verification failed: " + check.message);
  out.paths = decompose(graph, out.commodities, flow);
  out.value = flow.value;
  out.lambda_lower_bound = flow.lambda_lower_bound;
  return out;
}

RoundArtifacts stage_round(const PipelineConfig& config, NocGraph& graph, const SolveArtifacts& solved) {
  RoundArtifacts out;
  out.rounded = round_flows(solved.commodities, solved.paths, config.phi);
  out.loads = assign_widths(graph, out.rounded, config.phi);
  return out;
}

PeriodicSchedule stage_schedule(const PipelineConfig& config, const NocGraph& sized, const SolveArtifacts& solved,
                                const RoundArtifacts& rounded) {
  PeriodicSchedule schedule = allocate_slots(solved.commodities, rounded.rounded, config.phi, rounded.loads.lanes);
  const ScheduleCheck check = validate_schedule(schedule, sized);
  if (!check.ok) throw Error("schedule validation failed: " + check.message);
  return schedule;
}

ControlTables stage_emit(const PeriodicSchedule& schedule, const NocGraph& sized) {
  return emit_controls(schedule, sized);
}

SimReport stage_sim(const PipelineConfig& config, const NocGraph& sized, const ControlTables& controls,
                    const TrafficArtifacts& traffic) {
  if (!traffic.tcg) {
    return simulate(sized, controls, SteadyTraffic{static_cast<std::int64_t>(config.periods) * config.phi});
  }
  const Tcg unrolled = unroll(*traffic.tcg, config.iterations, *traffic.tcg->app_period);
  return simulate(sized, controls, TcgTraffic{&unrolled, config.iterations * *traffic.tcg->app_period});
}

ReportRow stage_report(const PipelineConfig& config, const NocGraph& sized, const TrafficArtifacts& traffic,
                       const SolveArtifacts& solved, const RoundArtifacts& rounded, const ControlTables& controls,
                       const SimSummary& sim) {
  std::optional<LagSummary> lags;
  if (traffic.tcg) {
    const Tcg unrolled = unroll(*traffic.tcg, config.iterations, *traffic.tcg->app_period);
    const TimingSpec spec = compute_spec(unrolled, rt_params(config, sized));
    lags = summarize_lags(*traffic.tcg, config.iterations, spec, sim.task_end);
  }
  return make_report(topology_name(config.topology), sized, traffic.demands, solved.commodities, rounded.rounded,
                     controls, sim, lags);
}

namespace {

template <class F>
auto in_stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(name + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(name + ": malformed artifact: " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  validate_config(config);
  PipelineResult r{in_stage("gen", [&] { return stage_gen(config); }), {}, {}, {}, {}, {}, {}, {}, {}};
  r.traffic = in_stage("demands", [&] { return stage_demands(config, r.graph); });
  r.solved = in_stage("solve", [&] { return stage_solve(config, r.graph, r.traffic.demands); });
  r.rounded = in_stage("round", [&] { return stage_round(config, r.graph, r.solved); });
  r.schedule = in_stage("schedule", [&] { return stage_schedule(config, r.graph, r.solved, r.rounded); });
  r.controls = in_stage("emit", [&] { return stage_emit(r.schedule, r.graph); });
  r.sim = in_stage("sim", [&] { return stage_sim(config, r.graph, r.controls, r.traffic); });
  r.summary = summarize(r.sim, r.schedule);
  r.report = in_stage("report", [&] {
    return stage_report(config, r.graph, r.traffic, r.solved, r.rounded, r.controls, r.summary);
  });
  return r;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"gen", "demands", "solve", "round", "schedule", "emit", "sim", "report"};
  return names;
}

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing artifact " + path.filename().string() + " (run the earlier stages first)");
  return nlohmann::json::parse(in);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(1) + "\n"); }

nlohmann::json widths_to_json(const NocGraph& graph, const EdgeLoads& loads) {
  nlohmann::json edges = nlohmann::json::array();
  for (int e = 0; e < graph.edge_count(); ++e) {
    edges.push_back({{"edge", e},
                     {"load", format_rational(loads.load[e])},
                     {"lanes", loads.lanes[e]},
                     {"width_bits", graph.edges()[e].width_bits}});
  }
  return {{"edges", edges}};
}

EdgeLoads apply_widths(NocGraph& graph, const nlohmann::json& j) {
  EdgeLoads loads;
  loads.load.assign(graph.edge_count(), Rational(0));
  loads.lanes.assign(graph.edge_count(), 0);
  const auto& edges = j.at("edges");
  if (static_cast<int>(edges.size()) != graph.edge_count()) throw Error("widths do not match the topology");
  for (const auto& je : edges) {
    const int e = je.at("edge").get<int>();
    if (e < 0 || e >= graph.edge_count()) throw Error("width for unknown edge");
    loads.load[e] = parse_rational(je.at("load").get<std::string>());
    loads.lanes[e] = je.at("lanes").get<int>();
    graph.edges()[e].width_bits = je.at("width_bits").get<std::int64_t>();
  }
  return loads;
}

struct Loaded {
  const std::filesystem::path& dir;

  NocGraph graph() const { return graph_from_json(read_json(dir / "topology.json")); }

  NocGraph sized(EdgeLoads* loads = nullptr) const {
    NocGraph g = graph();
    EdgeLoads l = apply_widths(g, read_json(dir / "widths.json"));
    if (loads) *loads = std::move(l);
    return g;
  }

  TrafficArtifacts traffic() const {
    TrafficArtifacts t;
    t.demands = demands_from_json(read_json(dir / "demands.json"));
    if (std::filesystem::exists(dir / "tcg.json")) t.tcg = tcg_from_json(read_json(dir / "tcg.json"));
    return t;
  }

  SolveArtifacts solved() const {
    StoredFlow f = flow_from_json(read_json(dir / "flow.json"));
    SolveArtifacts s;
    s.commodities = std::move(f.commodities);
    s.paths = std::move(f.paths);
    s.objective = f.objective;
    s.value = f.value;
    return s;
  }

  RoundArtifacts rounded() const {
    RoundArtifacts r;
    r.rounded = rounded_from_json(read_json(dir / "rounded.json"));
    sized(&r.loads);
    return r;
  }
};

}  // namespace

void run_stage(const std::string& stage, const PipelineConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config);
  std::filesystem::create_directories(out_dir);
  const Loaded load{out_dir};
  in_stage(stage, [&] {
    if (stage == "gen") {
      write_json(out_dir / "config.json", to_json(config));
      write_json(out_dir / "topology.json", to_json(stage_gen(config)));
    } else if (stage == "demands") {
      TrafficArtifacts t = stage_demands(config, load.graph());
      write_json(out_dir / "demands.json", to_json(t.demands));
      if (t.tcg) {
        write_json(out_dir / "tcg.json", to_json(*t.tcg));
      } else {
        std::filesystem::remove(out_dir / "tcg.json");
      }
    } else if (stage == "solve") {
      const NocGraph graph = load.graph();
      const TrafficArtifacts t = load.traffic();
      SolveArtifacts s = stage_solve(config, graph, t.demands);
      FlowAssignment summary;
      summary.objective = s.objective;
      summary.value = s.value;
      summary.lambda_lower_bound = s.lambda_lower_bound;
      summary.hop_limit = config.hop_limit;
      write_json(out_dir / "flow.json", flow_to_json(s.commodities, s.paths, summary));
    } else if (stage == "round") {
      NocGraph graph = load.graph();
      RoundArtifacts r = stage_round(config, graph, load.solved());
      write_json(out_dir / "rounded.json", rounded_to_json(r.rounded, config.phi));
      write_json(out_dir / "widths.json", widths_to_json(graph, r.loads));
    } else if (stage == "schedule") {
      const NocGraph sized = load.sized();
      write_json(out_dir / "schedule.json", to_json(stage_schedule(config, sized, load.solved(), load.rounded())));
    } else if (stage == "emit") {
      const NocGraph sized = load.sized();
      const PeriodicSchedule schedule = schedule_from_json(read_json(out_dir / "schedule.json"));
      const ScheduleCheck check = validate_schedule(schedule, sized);
      if (!check.ok) throw Error("schedule validation failed: " + check.message);
      write_json(out_dir / "controls.json", to_json(stage_emit(schedule, sized)));
    } else if (stage == "sim") {
      const NocGraph sized = load.sized();
      const ControlTables controls = controls_from_json(read_json(out_dir / "controls.json"));
      const PeriodicSchedule schedule = schedule_from_json(read_json(out_dir / "schedule.json"));
      const SimReport sim = stage_sim(config, sized, controls, load.traffic());
      write_json(out_dir / "sim.json", to_json(summarize(sim, schedule)));
    } else if (stage == "report") {
      const NocGraph sized = load.sized();
      const ControlTables controls = controls_from_json(read_json(out_dir / "controls.json"));
      const SimSummary sim = sim_summary_from_json(read_json(out_dir / "sim.json"));
      const ReportRow row =
          stage_report(config, sized, load.traffic(), load.solved(), load.rounded(), controls, sim);
      write_text(out_dir / "report.csv", report_csv({row}));
      write_json(out_dir / "report.json", to_json(row));
    } else {
      throw ConfigError("unknown stage '" + stage + "'");
    }
    return 0;
  });
}

void run_all(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config);
  for (const std::string& stage : stage_names()) run_stage(stage, config, out_dir);
}

}  // namespace nocweave
