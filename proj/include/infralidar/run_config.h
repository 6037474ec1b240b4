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
/// \brief Dataset variant tags and per-stage parameter blocks.
///
/// Variant tags are `<family>-<mode>`: family b (noise-free), n (noisy),
/// t (test-track layout E, noisy, ground removed) or r (recorded data, not
/// simulated); mode s (single sensor) or f (fused).
///
/// Parameter files are JSON objects with optional blocks:
///
///     {"preprocess": {"roi_half_extent": 56, "z_min": -0.05, "z_max": 4,
///                     "ground_band": 0.25, "ground_keep_fraction": 0.1,
///                     "seed": 1, "outlier_filter": false,
///                     "outlier_radius": 0.5, "outlier_min_neighbors": 2},
///      "detector": {"cluster_radius": 0.7, "min_cluster_points": 5,
///                   "core_min_points": 2, "duplicate_iou": 0.1,
///                   "ground_clearance": 0.4, "extent_trim": 0.05},
///      "tracker": {"min_hits": 3, "max_age": 2,
///                  "metric": "centroid_distance" | "bev_iou",
///                  "distance_gate": 2, "iou_threshold": 0.1},
///      "refine": {"heading_window": 7, "measurement_sigma": 0.2,
///                 "vehicle_jerk": 4, "vru_jerk": 2},
///      "eval": {"vehicle_iou": 0.5, "vru_iou": 0.25, "recall_points": 41,
///               "vehicle_gate": 2, "vru_gate": 1,
///               "min_length": 10, "min_frames": 50}}

#ifndef INFRALIDAR_RUN_CONFIG_H_
#define INFRALIDAR_RUN_CONFIG_H_

#include <string>

#include <json.hpp>

#include "infralidar/detector.h"
#include "infralidar/metrics.h"
#include "infralidar/noise.h"
#include "infralidar/preprocess.h"
#include "infralidar/refine.h"
#include "infralidar/tracker.h"

namespace infralidar {

struct VariantTag {
  char family = 'b';
  bool fused = true;

  /// Throws ValidationError for anything but [bntr]-[sf].
  static VariantTag Parse(const std::string& tag);
  std::string ToString() const;
  bool noisy() const { return family == 'n' || family == 't'; }
  bool simulated() const { return family != 'r'; }
};

/// ROI and ground handling implied by the variant family.
RoiSpec DefaultRoi(char family);

struct StageParams {
  PreprocessSpec preprocess;
  DetectorParams detector;
  TrackerParams tracker;
  RefineParams refine;
  EvalOptions eval;
};

StageParams DefaultStageParams(const VariantTag& variant, double rate);

/// Overrides fields from a parameter document (see file comment). Unknown
/// blocks or keys throw ValidationError.
void ApplyParams(const nlohmann::json& j, StageParams& params);

/// Full parameter document; ApplyParams on the defaults reproduces
/// `params` (class gates excepted).
nlohmann::json ToJson(const StageParams& params);

/// Noise block of a scenario config; absent keys keep the defaults.
NoiseSpec ParseNoise(const nlohmann::json& j, std::uint64_t seed);
nlohmann::json ToJson(const NoiseSpec& noise);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string HashHex(std::string_view data);

}  // namespace infralidar

#endif  // INFRALIDAR_RUN_CONFIG_H_
