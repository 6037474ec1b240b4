// Copyright 2026 The Infralidar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// infralidar: simulate | pipeline | evaluate | compare | experiment
//
// Exit codes: 0 success, 1 stage failure, 2 input validation failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "infralidar/csv.h"
#include "infralidar/experiment.h"
#include "infralidar/pipeline.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace infralidar;

namespace {

constexpr int kExitStage = 1;
constexpr int kExitInput = 2;

json LoadJson(const fs::path& path) {
  if (!fs::exists(path)) {
    throw ValidationError(path.string() + " does not exist");
  }
  try {
    return json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed JSON: " + e.what());
  }
}

struct NoiseFlags {
  std::optional<double> point_sigma, pos_sigma, rot_sigma;

  void Add(CLI::App* app) {
    app->add_option("--point-sigma", point_sigma, "point noise std [m]");
    app->add_option("--pos-sigma", pos_sigma, "sensor position noise std [m]");
    app->add_option("--rot-sigma", rot_sigma,
                    "sensor rotation noise std [rad]");
  }
  void Apply(NoiseSpec& n) const {
    if (point_sigma) n.point_sigma = *point_sigma;
    if (pos_sigma) n.pos_sigma = *pos_sigma;
    if (rot_sigma) n.rot_sigma = *rot_sigma;
    n.Validate();
  }
};

// Scenario config plus its raw JSON (for the noise block).
std::pair<ScenarioConfig, json> LoadScenario(const fs::path& path,
                                             std::optional<std::uint64_t> seed) {
  ScenarioConfig config = LoadScenarioConfig(path);
  json raw = json::parse(ReadFile(path));
  if (seed) config.seed = *seed;
  return {config, raw};
}

void PrintCompare(const std::vector<CompareRow>& rows) {
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string("n/a");
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  std::printf("%-40s %12s %12s %12s\n", "metric", "single", "fused", "delta");
  for (const CompareRow& r : rows) {
    std::printf("%-40s %12s %12s %12s\n", r.metric.c_str(),
                cell(r.single).c_str(), cell(r.fused).c_str(),
                cell(r.delta()).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infrastructure LiDAR simulation, tracking and evaluation"};
  app.require_subcommand(1);

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "simulate a dataset");
  fs::path sim_config, sim_out;
  std::string sim_variant;
  std::optional<std::uint64_t> sim_seed;
  NoiseFlags sim_noise;
  sim->add_option("--config", sim_config, "scenario config (JSON)")->required();
  sim->add_option("--variant", sim_variant, "dataset variant tag, e.g. n-f")
      ->required();
  sim->add_option("--out", sim_out, "dataset directory")->required();
  sim->add_option("--seed", sim_seed, "overrides the config seed");
  sim_noise.Add(sim);

  // pipeline
  CLI::App* pipe = app.add_subcommand("pipeline", "run the staged pipeline");
  fs::path pipe_manifest, pipe_out, pipe_params;
  std::optional<std::string> pipe_mode, pipe_variant;
  std::optional<std::uint32_t> pipe_sensor;
  std::optional<std::uint64_t> pipe_seed;
  std::string pipe_from = "preprocess";
  pipe->add_option("--manifest", pipe_manifest, "dataset manifest.json")
      ->required();
  pipe->add_option("--out", pipe_out, "root directory for run directories")
      ->required();
  pipe->add_option("--mode", pipe_mode, "single or fused")
      ->check(CLI::IsMember({"single", "fused"}));
  pipe->add_option("--sensor", pipe_sensor, "sensor id for single mode");
  pipe->add_option("--variant", pipe_variant, "variant tag, e.g. n-s");
  pipe->add_option("--params", pipe_params, "stage parameter file (JSON)");
  pipe->add_option("--seed", pipe_seed, "ground downsampling seed");
  pipe->add_option("--from-stage", pipe_from,
                   "preprocess, detect, track or refine");

  // evaluate
  CLI::App* eval = app.add_subcommand("evaluate", "evaluate a run");
  fs::path eval_run, eval_refined, eval_detections, eval_gt, eval_out,
      eval_params;
  std::string eval_variant = "b-f";
  double eval_rate = 20.0;
  eval->add_option("--run", eval_run, "run directory written by pipeline");
  eval->add_option("--refined", eval_refined, "refined trajectories CSV");
  eval->add_option("--detections", eval_detections, "detections CSV");
  eval->add_option("--gt", eval_gt, "ground truth CSV");
  eval->add_option("--rate", eval_rate, "frame rate [Hz]");
  eval->add_option("--variant", eval_variant, "variant tag for defaults");
  eval->add_option("--params", eval_params, "stage parameter file (JSON)");
  eval->add_option("--out", eval_out, "report directory")->required();

  // compare
  CLI::App* cmp = app.add_subcommand("compare", "single vs fused delta table");
  fs::path cmp_single, cmp_fused, cmp_out;
  cmp->add_option("--single", cmp_single, "single-sensor report.json")
      ->required();
  cmp->add_option("--fused", cmp_fused, "fused report.json")->required();
  cmp->add_option("--out", cmp_out, "CSV output path");

  // experiment
  CLI::App* exp = app.add_subcommand(
      "experiment", "in-memory fused run plus every single-sensor run");
  fs::path exp_config, exp_out, exp_params;
  std::string exp_family = "n";
  std::optional<std::uint64_t> exp_seed;
  std::vector<std::uint32_t> exp_sensors;
  NoiseFlags exp_noise;
  exp->add_option("--config", exp_config, "scenario config (JSON)")->required();
  exp->add_option("--family", exp_family, "b, n or t")
      ->check(CLI::IsMember({"b", "n", "t"}));
  exp->add_option("--sensors", exp_sensors, "single-sensor lanes (default all)");
  exp->add_option("--params", exp_params, "stage parameter file (JSON)");
  exp->add_option("--seed", exp_seed, "overrides the config seed");
  exp->add_option("--out", exp_out, "report directory")->required();
  exp_noise.Add(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (sim->parsed()) {
      const VariantTag variant = VariantTag::Parse(sim_variant);
      auto [config, raw] = LoadScenario(sim_config, sim_seed);
      NoiseSpec noise = ParseNoise(raw.value("noise", json()), config.seed);
      sim_noise.Apply(noise);
      const DatasetManifest m = Simulate(config, variant, noise, sim_out);
      std::printf("%s: %lld frames x %zu sensors\n",
                  (sim_out / "manifest.json").string().c_str(),
                  static_cast<long long>(m.frames), m.sensors.size());
    } else if (pipe->parsed()) {
      const DatasetManifest manifest = DatasetManifest::Load(pipe_manifest);
      const VariantTag data = VariantTag::Parse(manifest.variant);
      PipelineOptions opts;
      if (pipe_variant) {
        opts.variant = VariantTag::Parse(*pipe_variant);
        if (pipe_mode && (*pipe_mode == "fused") != opts.variant.fused) {
          throw ValidationError("--mode " + *pipe_mode +
                                " contradicts --variant " + *pipe_variant);
        }
      } else {
        opts.variant = {data.family, !pipe_mode || *pipe_mode == "fused"};
      }
      opts.sensor = pipe_sensor;
      opts.params = DefaultStageParams(opts.variant, manifest.rate);
      if (!pipe_params.empty()) ApplyParams(LoadJson(pipe_params), opts.params);
      if (pipe_seed) opts.params.preprocess.seed = *pipe_seed;
      opts.out_root = pipe_out;
      opts.from_stage = ParseStage(pipe_from);
      const fs::path run = RunPipeline(manifest, opts);
      std::printf("%s\n", run.string().c_str());
    } else if (eval->parsed()) {
      EvaluateInputs in;
      if (!eval_run.empty()) {
        in = EvaluateInputsFromRun(eval_run);
      } else {
        if (eval_refined.empty() || eval_gt.empty()) {
          throw ValidationError("evaluate needs --run or --refined and --gt");
        }
        in.refined = eval_refined;
        in.gt = eval_gt;
        if (!eval_detections.empty()) in.detections = eval_detections;
        in.rate = eval_rate;
        in.params = DefaultStageParams(VariantTag::Parse(eval_variant), in.rate);
      }
      if (!eval_params.empty()) ApplyParams(LoadJson(eval_params), in.params);
      const json report = EvaluateRun(in, eval_out);
      std::printf("%s\n", report.dump(2).c_str());
    } else if (cmp->parsed()) {
      const auto rows = CompareReports(LoadJson(cmp_single), LoadJson(cmp_fused));
      PrintCompare(rows);
      if (!cmp_out.empty()) WriteFile(cmp_out, CompareTableCsv(rows));
    } else if (exp->parsed()) {
      auto [scenario, raw] = LoadScenario(exp_config, exp_seed);
      ExperimentConfig config =
          MakeExperimentConfig(scenario, exp_family.front());
      config.noise = ParseNoise(raw.value("noise", json()), scenario.seed);
      exp_noise.Apply(config.noise);
      if (!exp_params.empty()) ApplyParams(LoadJson(exp_params), config.params);
      config.single_sensors = exp_sensors;
      const ExperimentResult result = RunExperiment(
          config, [](std::int64_t done, std::int64_t total) {
            if (done % 100 == 0 || done == total) {
              std::fprintf(stderr, "frame %lld/%lld\n",
                           static_cast<long long>(done),
                           static_cast<long long>(total));
            }
          });
      json summary = json::object();
      for (const LaneResult& lane : result.lanes) {
        const fs::path dir = exp_out / lane.name;
        fs::create_directories(dir);
        const json report = ToJson(lane.report);
        WriteFile(dir / "report.json", report.dump(2) + "\n");
        WriteRefinedCsv(dir / "refined.csv", lane.trajectories);
        lane.point_counts.WriteCsv(dir / "heatmap_points.csv");
        lane.coverage.width.WriteCsv(dir / "heatmap_width_ratio.csv");
        lane.coverage.length.WriteCsv(dir / "heatmap_length_ratio.csv");
        lane.coverage.height.WriteCsv(dir / "heatmap_height_ratio.csv");
        summary[lane.name] = report;
        const DeviationGroup& d = lane.report.deviation.all;
        std::printf("%-10s dets %7zu  tracks %6zu  trajs %4zu  MOTA %7.3f  "
                    "dT pos %s  vel %s  acc %s  (%zu trajs, %zu frames)\n",
                    lane.name.c_str(), lane.detections.size(),
                    lane.tracks.size(), lane.trajectories.size(),
                    lane.report.mot.mota,
                    d.position ? std::to_string(*d.position).c_str() : "n/a",
                    d.velocity ? std::to_string(*d.velocity).c_str() : "n/a",
                    d.acceleration ? std::to_string(*d.acceleration).c_str()
                                   : "n/a",
                    d.trajectories, d.frames);
      }
      WriteFile(exp_out / "summary.json", summary.dump(2) + "\n");
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "infralidar: %s\n", e.what());
    return kExitStage;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "infralidar: %s\n", e.what());
    return kExitInput;
  } catch (const IoError& e) {
    std::fprintf(stderr, "infralidar: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "infralidar: %s\n", e.what());
    return kExitStage;
  }
  return 0;
}
