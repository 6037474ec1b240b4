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

#include "infralidar/noise.h"

#include <cmath>

#include <Eigen/Geometry>

#include "infralidar/random.h"

namespace infralidar {

void NoiseSpec::Validate() const {
  if (!(point_sigma >= 0.0) || !(pos_sigma >= 0.0) || !(rot_sigma >= 0.0) ||
      !std::isfinite(point_sigma) || !std::isfinite(pos_sigma) ||
      !std::isfinite(rot_sigma)) {
    throw ValidationError("noise sigmas must be finite and >= 0");
  }
}

PointCloudFrame PerturbPoints(const PointCloudFrame& frame,
                              const NoiseSpec& spec) {
  spec.Validate();
  PointCloudFrame out = frame;
  if (spec.point_sigma == 0.0) return out;
  const KeyedRng rng(spec.seed);
  const auto frame_key = static_cast<std::uint64_t>(frame.frame_index);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const PointOrigin o = frame.origin(i);
    const std::uint64_t stream =
        StreamKey(kPointNoiseStream, o.sensor_id, frame_key);
    // Two pairs per point; the fourth normal is unused.
    const auto [nx, ny] = rng.NormalPair(stream, 2 * std::uint64_t{o.ordinal});
    const auto [nz, unused] =
        rng.NormalPair(stream, 2 * std::uint64_t{o.ordinal} + 1);
    (void)unused;
    Point& p = out.points[i];
    p.x += spec.point_sigma * nx;
    p.y += spec.point_sigma * ny;
    p.z += spec.point_sigma * nz;
  }
  return out;
}

Pose PerturbPose(const Pose& pose, const NoiseSpec& spec,
                 std::uint32_t sensor_id, std::int64_t frame_index) {
  spec.Validate();
  const KeyedRng rng(spec.seed);
  const std::uint64_t draw =
      spec.per_frame_pose ? static_cast<std::uint64_t>(frame_index) + 1 : 0;
  const std::uint64_t stream = StreamKey(kPoseNoiseStream, sensor_id, draw);
  const auto [t0, t1] = rng.NormalPair(stream, 0);
  const auto [t2, r0] = rng.NormalPair(stream, 1);
  const auto [r1, r2] = rng.NormalPair(stream, 2);
  const Eigen::Vector3d dt = spec.pos_sigma * Eigen::Vector3d(t0, t1, t2);
  const Eigen::Vector3d omega = spec.rot_sigma * Eigen::Vector3d(r0, r1, r2);
  Eigen::Quaterniond dq = Eigen::Quaterniond::Identity();
  const double angle = omega.norm();
  if (angle > 0.0) dq = Eigen::AngleAxisd(angle, omega / angle);
  return Pose(pose.rotation() * dq, pose.translation() + dt);
}

}  // namespace infralidar
