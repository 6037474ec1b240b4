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

/// \file
/// \brief In-memory single-vs-fused experiment.
///
/// Simulates a scenario frame by frame and feeds the fused cloud and every
/// selected single-sensor cloud through their own pipeline lanes without
/// touching the disk. Heat maps are accumulated from the ROI-cropped world
/// clouds before ground thinning.

#ifndef INFRALIDAR_EXPERIMENT_H_
#define INFRALIDAR_EXPERIMENT_H_

#include <functional>
#include <string>
#include <vector>

#include "infralidar/metrics.h"
#include "infralidar/run_config.h"
#include "infralidar/scenario_config.h"

namespace infralidar {

struct ExperimentConfig {
  ScenarioConfig scenario;
  /// Only the family matters; both modes run.
  char family = 'n';
  NoiseSpec noise;
  StageParams params;
  /// Single-sensor lanes to run; empty runs one per sensor.
  std::vector<std::uint32_t> single_sensors;
  bool run_fused = true;
  bool heatmaps = true;
};

/// Defaults for the family, with the scenario's rate and seed threaded in.
ExperimentConfig MakeExperimentConfig(const ScenarioConfig& scenario,
                                      char family);

struct LaneResult {
  std::string name;        // "fused" or "sensor<ID>"
  std::uint32_t sensor_id = 0;  // 0 for fused
  Eigen::Vector2d sensor_xy = Eigen::Vector2d::Zero();
  std::vector<Detection> detections;
  std::vector<TrackRecord> tracks;
  std::vector<Trajectory> trajectories;
  EvalReport report;
  HeatMap point_counts = HeatMap();
  CoverageMaps coverage = CoverageMaps();
  std::size_t preprocessed_points = 0;
};

struct ExperimentResult {
  std::vector<GroundTruthRecord> gt;  // restricted to the ROI
  std::vector<LaneResult> lanes;
  double intensity_max = 0.0;
  std::int64_t frames = 0;

  /// Throws std::out_of_range when the lane was not run.
  const LaneResult& Lane(std::uint32_t sensor_id) const;
};

using ProgressFn = std::function<void(std::int64_t done, std::int64_t total)>;

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const ProgressFn& progress = {});

}  // namespace infralidar

#endif  // INFRALIDAR_EXPERIMENT_H_
