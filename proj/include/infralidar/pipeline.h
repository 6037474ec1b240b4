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
/// \brief On-disk datasets and the staged simulate / pipeline / evaluate /
/// compare commands.
///
/// Dataset directory (written by Simulate):
///
///     manifest.json
///     gt.csv
///     frames/s<ID>_f<FRAME:06>.csv    sensor-frame points
///
/// Run directory `<variant>-<hash>` (written by RunPipeline), one
/// subdirectory per stage:
///
///     run.json
///     preprocessed/f<FRAME:06>.csv    world-frame points after preprocessing
///     detections/detections.csv
///     tracks/tracks.csv, tracks/track_points.csv
///     refined/refined.csv, refined/refined_dims.csv
///
/// The hash covers the manifest, mode, sensor and stage parameters, so a
/// rerun with identical inputs lands in the same directory.

#ifndef INFRALIDAR_PIPELINE_H_
#define INFRALIDAR_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "infralidar/run_config.h"
#include "infralidar/scenario_config.h"

namespace infralidar {

/// A pipeline stage failed; carries the stage name and the frame index
/// (-1 when the stage is not frame-based).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::int64_t frame, const std::string& what);
  const std::string& stage() const { return stage_; }
  std::int64_t frame() const { return frame_; }

 private:
  std::string stage_;
  std::int64_t frame_;
};

struct ManifestSensor {
  std::uint32_t id = 0;
  /// Pose the pipeline uses (perturbed for noisy variants).
  Pose pose;
  /// Pose the simulator used.
  Pose true_pose;
  std::vector<std::string> frames;  // relative to the manifest directory
};

struct DatasetManifest {
  std::string variant;  // tag given at simulation time
  std::string layout;
  double rate = 20.0;
  std::int64_t frames = 0;
  double intensity_max = 1.0;
  std::string gt_file;
  std::vector<ManifestSensor> sensors;
  nlohmann::json noise;  // null for noise-free variants
  std::filesystem::path dir;  // not serialized

  char family() const { return variant.empty() ? '?' : variant[0]; }
  const ManifestSensor& Sensor(std::uint32_t id) const;
  double FrameTime(std::int64_t f) const { return f / rate; }

  nlohmann::json ToJson() const;
  /// Throws ValidationError for schema violations or missing files.
  static DatasetManifest FromJson(const nlohmann::json& j,
                                  const std::filesystem::path& dir);
  static DatasetManifest Load(const std::filesystem::path& path);
};

/// Simulates `config` into `out_dir`. Noise is applied only for noisy
/// variants; family 'r' and family 't' outside layout E are rejected.
DatasetManifest Simulate(const ScenarioConfig& config, const VariantTag& variant,
                         const NoiseSpec& noise,
                         const std::filesystem::path& out_dir);

enum class Stage { kPreprocess, kDetect, kTrack, kRefine };
Stage ParseStage(const std::string& name);
std::string ToString(Stage stage);

struct PipelineOptions {
  VariantTag variant;
  std::optional<std::uint32_t> sensor;  // required for single mode
  StageParams params;
  std::filesystem::path out_root;
  Stage from_stage = Stage::kPreprocess;
};

/// Resolves the variant against the manifest: families must agree and
/// single mode needs a sensor from the manifest (fused mode must not name
/// one). Throws ValidationError.
void CheckPipelineOptions(const DatasetManifest& manifest,
                          const PipelineOptions& options);

std::string RunDirectoryName(const DatasetManifest& manifest,
                             const PipelineOptions& options);

/// Runs the stages from `from_stage` on and returns the run directory.
/// Earlier stages' artifacts must already exist there.
std::filesystem::path RunPipeline(const DatasetManifest& manifest,
                                  const PipelineOptions& options);

struct EvaluateInputs {
  std::filesystem::path refined;
  std::optional<std::filesystem::path> detections;
  std::filesystem::path gt;
  double rate = 20.0;
  /// Frames the GT covers; defaults to the GT's own index range.
  std::optional<std::pair<std::int64_t, std::int64_t>> frame_range;
  /// Dataset and lane for heat maps; skipped when absent.
  std::optional<DatasetManifest> manifest;
  std::vector<std::uint32_t> heatmap_sensors;
  StageParams params;
};

/// Inputs of a finished run directory.
EvaluateInputs EvaluateInputsFromRun(const std::filesystem::path& run_dir);

/// Writes report.json and the heat-map CSVs into `out_dir`; returns the
/// report. Estimates outside the GT frame range throw ValidationError
/// listing the offending indices.
nlohmann::json EvaluateRun(const EvaluateInputs& inputs,
                           const std::filesystem::path& out_dir);

struct CompareRow {
  std::string metric;
  std::optional<double> single, fused;
  std::optional<double> delta() const {
    if (single && fused) return *fused - *single;
    return std::nullopt;
  }
};

/// Numeric leaves of two reports, keyed by their dotted path.
std::vector<CompareRow> CompareReports(const nlohmann::json& single,
                                       const nlohmann::json& fused);
std::string CompareTableCsv(const std::vector<CompareRow>& rows);

}  // namespace infralidar

#endif  // INFRALIDAR_PIPELINE_H_
