// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

// nocweave: topology -> routing -> TDM schedule -> control tables -> simulation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nocweave/error.hpp"
#include "nocweave/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> phi;
  std::optional<std::string> objective;
  std::optional<int> hop_limit;
  std::optional<std::int64_t> latency;
  std::optional<std::string> alpha;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "artifact directory");
  cmd->add_option("--seed", o.seed, "seed for every random choice");
  cmd->add_option("--phi", o.phi, "schedule period in slots");
  cmd->add_option("--objective", o.objective, "mincost or mincong");
  cmd->add_option("--hop-limit", o.hop_limit, "maximum path length in edges");
  cmd->add_option("--L", o.latency, "latency parameter of the message delay bound");
  cmd->add_option("--alpha", o.alpha, "bits per slot of the delay bound, or inf");
}

nocweave::PipelineConfig load_config(const Overrides& o) {
  std::ifstream in(o.config);
  if (!in) throw nocweave::ConfigError("cannot read " + o.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw nocweave::ConfigError(std::string("malformed configuration: ") + e.what());
  }
  nocweave::PipelineConfig c = nocweave::config_from_json(j, std::filesystem::path(o.config).parent_path());
  if (o.seed) c.seed = *o.seed;
  if (o.phi) c.phi = *o.phi;
  if (o.objective) c.objective = nocweave::parse_objective(*o.objective);
  if (o.hop_limit) c.hop_limit = *o.hop_limit;
  if (o.latency) c.latency = *o.latency;
  if (o.alpha) {
    if (*o.alpha == "inf") {
      c.alpha_infinite = true;
      c.alpha.reset();
    } else {
      try {
        c.alpha = nocweave::parse_rational(*o.alpha);
      } catch (const nocweave::Error& e) {
        throw nocweave::ConfigError(std::string("bad --alpha: ") + e.what());
      }
      c.alpha_infinite = false;
    }
  }
  nocweave::validate_config(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NoC design flow: widths, multi-path routing and header-free TDM schedules"};
  app.require_subcommand(1);
  Overrides o;
  std::string chosen;
  for (const std::string& stage : nocweave::stage_names()) {
    CLI::App* cmd = app.add_subcommand(stage, "run the " + stage + " stage");
    add_common(cmd, o);
    cmd->callback([&chosen, stage] { chosen = stage; });
  }
  CLI::App* all = app.add_subcommand("all", "run every stage");
  add_common(all, o);
  all->callback([&chosen] { chosen = "all"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const nocweave::PipelineConfig config = load_config(o);
    if (chosen == "all") {
      nocweave::run_all(config, o.out);
      std::ifstream report(std::filesystem::path(o.out) / "report.csv");
      std::cout << report.rdbuf();
    } else {
      nocweave::run_stage(chosen, config, o.out);
    }
  } catch (const nocweave::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
