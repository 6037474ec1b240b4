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

#include "infralidar/experiment.h"

#include <stdexcept>

namespace infralidar {
namespace {

constexpr double kFuseTolerance = 1e-6;

struct Lane {
  LaneResult result;
  std::vector<std::size_t> sensor_indices;
  Tracker tracker;
};

}  // namespace

ExperimentConfig MakeExperimentConfig(const ScenarioConfig& scenario,
                                      char family) {
  ExperimentConfig c;
  c.scenario = scenario;
  c.family = family;
  c.noise.seed = scenario.seed;
  c.params = DefaultStageParams({family, true}, scenario.rate);
  c.params.preprocess.seed = scenario.seed;
  return c;
}

const LaneResult& ExperimentResult::Lane(std::uint32_t sensor_id) const {
  for (const LaneResult& l : lanes) {
    if (l.sensor_id == sensor_id) return l;
  }
  throw std::out_of_range("no lane for sensor " + std::to_string(sensor_id));
}

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const ProgressFn& progress) {
  const VariantTag variant{config.family, true};
  if (!variant.simulated()) {
    throw ValidationError("variant family 'r' cannot be simulated");
  }
  const Scene scene = BuildScenario(config.scenario);
  const std::int64_t frames = scene.NumFrames();
  const StageParams& params = config.params;
  const RoiSpec& roi = params.preprocess.roi;

  std::vector<Pose> believed;
  for (const SensorSpec& s : scene.sensors) {
    believed.push_back(variant.noisy() ? PerturbPose(s.pose, config.noise, s.id)
                                       : s.pose);
  }

  ExperimentResult out;
  out.frames = frames;
  std::vector<Lane> lanes;
  auto make_lane = [&](std::string name, std::uint32_t id,
                       std::vector<std::size_t> indices) {
    Lane lane{LaneResult{}, std::move(indices), Tracker(params.tracker)};
    lane.result.name = std::move(name);
    lane.result.sensor_id = id;
    lane.result.point_counts = HeatMap(roi.x_min, roi.x_max);
    lane.result.coverage = CoverageMaps(roi.x_min, roi.x_max);
    if (id != 0) {
      lane.result.sensor_xy = scene.Sensor(id).pose.translation().head<2>();
    }
    lanes.push_back(std::move(lane));
  };
  if (config.run_fused) {
    std::vector<std::size_t> all(scene.sensors.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    make_lane("fused", 0, std::move(all));
  }
  std::vector<std::uint32_t> singles = config.single_sensors;
  if (singles.empty()) {
    for (const SensorSpec& s : scene.sensors) singles.push_back(s.id);
  }
  for (std::uint32_t id : singles) {
    std::size_t index = scene.sensors.size();
    for (std::size_t i = 0; i < scene.sensors.size(); ++i) {
      if (scene.sensors[i].id == id) index = i;
    }
    if (index == scene.sensors.size()) {
      throw ValidationError("unknown sensor id " + std::to_string(id));
    }
    make_lane("sensor" + std::to_string(id), id, {index});
  }

  PreprocessSpec pre = params.preprocess;
  std::vector<PointCloudFrame> raw(scene.sensors.size());
  for (std::int64_t f = 0; f < frames; ++f) {
    const double t = scene.FrameTime(f);
    const SceneSnapshot snapshot(scene, t);
    for (std::size_t s = 0; s < scene.sensors.size(); ++s) {
      raw[s] = CastScan(snapshot, scene.sensors[s], t, f);
      if (variant.noisy()) {
        raw[s] = PerturbPoints(raw[s], config.noise);
        if (config.noise.per_frame_pose) {
          believed[s] = PerturbPose(scene.sensors[s].pose, config.noise,
                                    scene.sensors[s].id, f);
        }
      }
    }
    if (f == 0) {
      // Reflectances are static, so the first scan set sees the maximum.
      out.intensity_max = ComputeIntensityMax(raw);
      if (!(out.intensity_max > 0.0)) out.intensity_max = 1.0;
      pre.intensity_max = out.intensity_max;
    }
    const std::vector<GroundTruthRecord> frame_gt =
        RestrictGt(StepActors(scene, t, f), roi.x_min, roi.x_max);
    out.gt.insert(out.gt.end(), frame_gt.begin(), frame_gt.end());

    for (Lane& lane : lanes) {
      std::vector<SensorFrame> inputs;
      for (std::size_t s : lane.sensor_indices) {
        inputs.push_back({&raw[s], believed[s]});
      }
      PointCloudFrame world = Fuse(inputs, kFuseTolerance);
      if (config.heatmaps) {
        const PointCloudFrame cropped = CropRoi(world, roi);
        AccumulatePointCounts(cropped, frame_gt, lane.result.point_counts);
        AccumulateCoverage(cropped, frame_gt, lane.result.coverage);
      }
      const PointCloudFrame processed = Preprocess(world, pre);
      lane.result.preprocessed_points += processed.size();
      const std::vector<Detection> dets = FilterDetections(
          Detect(processed, params.detector), roi, params.detector);
      lane.result.detections.insert(lane.result.detections.end(),
                                    dets.begin(), dets.end());
      const std::vector<TrackRecord> recs = lane.tracker.Step(f, dets);
      lane.result.tracks.insert(lane.result.tracks.end(), recs.begin(),
                                recs.end());
    }
    if (progress) progress(f + 1, frames);
  }

  for (Lane& lane : lanes) {
    LaneResult& r = lane.result;
    r.trajectories = Refine(r.tracks, scene.rate, params.refine);
    if (!out.gt.empty()) {
      r.report = Evaluate(r.detections, r.trajectories, out.gt, params.eval);
    }
    out.lanes.push_back(std::move(r));
  }
  return out;
}

}  // namespace infralidar
