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
/// \brief Gaussian point noise and sensor pose perturbation.

#ifndef INFRALIDAR_NOISE_H_
#define INFRALIDAR_NOISE_H_

#include <cstdint>

#include "infralidar/geometry.h"

namespace infralidar {

/// Standard deviations; the defaults correspond to variances of 0.01 m^2
/// (points and position) and 2.5e-5 rad^2 (rotation).
struct NoiseSpec {
  double point_sigma = 0.1;
  double pos_sigma = 0.1;
  double rot_sigma = 5e-3;
  std::uint64_t seed = 1;
  /// Redraw the pose error every frame instead of once per sensor.
  bool per_frame_pose = false;

  void Validate() const;
};

/// Adds N(0, point_sigma^2) to x, y and z of every point. Draws are keyed
/// by (seed, origin sensor, frame_index, origin ordinal), so a point gets
/// the same offset whether it is perturbed alone or inside a fused frame.
PointCloudFrame PerturbPoints(const PointCloudFrame& frame,
                              const NoiseSpec& spec);

/// Translation offset by N(0, pos_sigma^2) per axis; rotation composed with
/// exp of a rotation vector whose components are N(0, rot_sigma^2).
/// `frame_index` is ignored unless spec.per_frame_pose is set.
Pose PerturbPose(const Pose& pose, const NoiseSpec& spec,
                 std::uint32_t sensor_id, std::int64_t frame_index = 0);

}  // namespace infralidar

#endif  // INFRALIDAR_NOISE_H_
