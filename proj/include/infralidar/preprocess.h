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
/// \brief Fusion of per-sensor frames and point-cloud pre-processing.

#ifndef INFRALIDAR_PREPROCESS_H_
#define INFRALIDAR_PREPROCESS_H_

#include <cstdint>
#include <span>

#include "infralidar/geometry.h"

namespace infralidar {

struct RoiSpec {
  double x_min = -56.0;
  double x_max = 56.0;
  double y_min = -56.0;
  double y_max = 56.0;
  double z_min = -0.05;
  double z_max = 4.0;
  /// Half-height of the band around z = 0 treated as ground.
  double ground_band = 0.05;
  double ground_keep_fraction = 0.10;

  static RoiSpec Square(double half_extent) {
    RoiSpec r;
    r.x_min = r.y_min = -half_extent;
    r.x_max = r.y_max = half_extent;
    return r;
  }
  void Validate() const;
  /// Closed-interval membership in x-y only.
  bool ContainsXy(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct SensorFrame {
  const PointCloudFrame* frame = nullptr;
  Pose pose;
};

/// Transforms every frame into the world and concatenates them in input
/// order. All timestamps must lie within `tolerance` of the first one.
/// The result has sensor_id 0 and keeps per-point origins.
PointCloudFrame Fuse(std::span<const SensorFrame> frames, double tolerance);

PointCloudFrame CropRoi(const PointCloudFrame& frame, const RoiSpec& roi);

/// Bernoulli thinning of points with |z| <= ground_band. Decisions are
/// keyed by (seed, point origin), independent of the frame's composition.
PointCloudFrame DownsampleGround(const PointCloudFrame& frame,
                                 const RoiSpec& roi, std::uint64_t seed);

/// Drops zero-intensity points and divides the rest by `dataset_max`
/// (clamped to 1). A frame already normalized is returned unchanged.
PointCloudFrame FilterAndNormalizeIntensity(const PointCloudFrame& frame,
                                            double dataset_max);

/// Largest intensity over a set of raw frames (0 for no points).
double ComputeIntensityMax(std::span<const PointCloudFrame> frames);

/// Keeps points with at least `min_neighbors` others within `radius`.
PointCloudFrame RadiusOutlierFilter(const PointCloudFrame& frame,
                                    double radius, int min_neighbors);

struct PreprocessSpec {
  RoiSpec roi;
  std::uint64_t seed = 1;
  double intensity_max = 1.0;
  bool outlier_filter = false;
  double outlier_radius = 0.5;
  int outlier_min_neighbors = 2;
};

/// Crop, ground thinning, intensity filtering and the optional outlier
/// filter, applied to a world-frame cloud.
PointCloudFrame Preprocess(const PointCloudFrame& world_frame,
                           const PreprocessSpec& spec);

}  // namespace infralidar

#endif  // INFRALIDAR_PREPROCESS_H_
