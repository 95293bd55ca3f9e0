// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "nocweave/error.hpp"
#include "nocweave/pipeline.hpp"

using namespace nocweave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nocweave_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  fs::path p = dir / "config.in.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NOCWEAVE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, RejectsBadValues) {
  nlohmann::json zero_phi{{"phi", 0}};
  EXPECT_THROW(validate_config(config_from_json(zero_phi)), ConfigError);
  nlohmann::json unknown{{"phy", 8}};
  EXPECT_THROW(config_from_json(unknown), ConfigError);
  nlohmann::json bad_topology{{"topology", {{"kind", "torus"}}}};
  EXPECT_THROW(config_from_json(bad_topology), ConfigError);
  nlohmann::json bad_objective{{"objective", "fastest"}};
  EXPECT_THROW(config_from_json(bad_objective), Error);
}

TEST(Config, RoundTripAndDefaults) {
  PipelineConfig c;
  c.topology = Clos3Spec{2, 2, 3};
  c.alpha_infinite = true;
  c.hop_limit = 6;
  EXPECT_EQ(to_json(config_from_json(to_json(c))).dump(), to_json(c).dump());
  NocGraph g = stage_gen(PipelineConfig{});
  RtParams rt = rt_params(PipelineConfig{}, g);
  EXPECT_EQ(rt.latency, 8 * g.pe_diameter());
  EXPECT_EQ(*rt.alpha, Rational(4));
}

TEST(Pipeline, FileStagesMatchInMemoryRun) {
  PipelineConfig c;
  c.topology = MeshSpec{3, 3};
  c.seed = 11;
  fs::path dir = scratch("stages");
  for (const std::string& stage : stage_names()) run_stage(stage, c, dir);
  PipelineResult mem = run_pipeline(c);
  EXPECT_EQ(slurp(dir / "schedule.json"), to_json(mem.schedule).dump(1) + "\n");
  EXPECT_EQ(slurp(dir / "controls.json"), to_json(mem.controls).dump(1) + "\n");
  EXPECT_EQ(slurp(dir / "report.csv"), report_csv({mem.report}));
}

TEST(Pipeline, RepeatedRunsAreBitIdentical) {
  PipelineConfig c;
  c.topology = MeshSpec{4, 4};
  c.objective = ObjectiveKind::MinCongestion;
  c.seed = 3;
  fs::path a = scratch("det_a");
  fs::path b = scratch("det_b");
  run_all(c, a);
  run_all(c, b);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
  }
}

TEST(Pipeline, MissingInputNamesTheStage) {
  fs::path dir = scratch("missing");
  try {
    run_stage("schedule", PipelineConfig{}, dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("schedule"), std::string::npos) << e.what();
  }
}

TEST(Cli, ExitCodes) {
  fs::path dir = scratch("cli");
  fs::path ok = write_config(dir, {{"topology", {{"kind", "mesh"}, {"rows", 2}, {"cols", 2}}}});
  EXPECT_EQ(run_cli("all --config " + ok.string() + " --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "report.csv"));
  // A hop limit below the PE diameter cannot route every pair.
  EXPECT_EQ(run_cli("all --config " + ok.string() + " --out " + (dir / "inf").string() + " --hop-limit 2"), 2);
  EXPECT_EQ(run_cli("all --config " + ok.string() + " --out " + (dir / "bad").string() + " --phi 0"), 1);
  EXPECT_EQ(run_cli("all --config " + (dir / "absent.json").string() + " --out " + (dir / "x").string()), 1);
  EXPECT_EQ(run_cli("gen --config " + ok.string() + " --out " + (dir / "step").string()), 0);
  EXPECT_EQ(run_cli("demands --config " + ok.string() + " --out " + (dir / "step").string()), 0);
  EXPECT_EQ(run_cli("schedule --config " + ok.string() + " --out " + (dir / "step").string()), 1);
}
