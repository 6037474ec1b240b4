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

#include <cmath>

#include <gtest/gtest.h>

#include "infralidar/noise.h"
#include "infralidar/preprocess.h"

namespace infralidar {
namespace {

PointCloudFrame Frame(std::uint32_t sensor, std::size_t n, std::int64_t index) {
  PointCloudFrame f;
  f.sensor_id = sensor;
  f.frame_index = index;
  for (std::size_t i = 0; i < n; ++i) {
    f.points.push_back({static_cast<double>(i), 1.0, 2.0, 0.5});
  }
  f.AssignOrigins();
  return f;
}

TEST(PerturbPointsTest, SameOffsetAloneOrInsideFusedFrame) {
  NoiseSpec spec;
  spec.seed = 3;
  const PointCloudFrame a = Frame(1, 50, 7), b = Frame(2, 30, 7);
  const PointCloudFrame fused = Fuse(
      std::vector<SensorFrame>{{&a, Pose()}, {&b, Pose()}}, 1e-6);
  const PointCloudFrame na = PerturbPoints(a, spec);
  const PointCloudFrame nf = PerturbPoints(fused, spec);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(na.points[i].x, nf.points[i].x);
    EXPECT_EQ(na.points[i].z, nf.points[i].z);
  }
  EXPECT_NE(na.points[0].x, PerturbPoints(Frame(1, 50, 8), spec).points[0].x);
}

TEST(PerturbPointsTest, ZeroSigmaIsIdentityAndNegativeThrows) {
  NoiseSpec spec;
  spec.point_sigma = 0.0;
  const PointCloudFrame a = Frame(1, 10, 0);
  const PointCloudFrame n = PerturbPoints(a, spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(n.points[i].x, a.points[i].x);
  spec.point_sigma = -1.0;
  EXPECT_THROW(PerturbPoints(a, spec), ValidationError);
}

TEST(PerturbPoseTest, StatisticsMatchSigmas) {
  NoiseSpec spec;
  const Pose base = Pose::FromYawPitchRoll({1, 2, 3}, 0.4, 0.1, 0.0);
  constexpr int kN = 20000;
  double sq_t = 0.0, sq_r = 0.0;
  for (int id = 1; id <= kN; ++id) {
    const Pose p = PerturbPose(base, spec, static_cast<std::uint32_t>(id));
    sq_t += (p.translation() - base.translation()).squaredNorm();
    const Eigen::AngleAxisd d(base.rotation().inverse() * p.rotation());
    sq_r += d.angle() * d.angle();
  }
  EXPECT_NEAR(std::sqrt(sq_t / (3 * kN)), spec.pos_sigma, 0.002);
  EXPECT_NEAR(std::sqrt(sq_r / (3 * kN)), spec.rot_sigma, 1e-4);
}

TEST(PerturbPoseTest, FrameIndexOnlyMattersPerFrame) {
  NoiseSpec spec;
  const Pose base;
  EXPECT_EQ(PerturbPose(base, spec, 1, 0).translation(),
            PerturbPose(base, spec, 1, 5).translation());
  spec.per_frame_pose = true;
  EXPECT_NE(PerturbPose(base, spec, 1, 0).translation(),
            PerturbPose(base, spec, 1, 5).translation());
}

}  // namespace
}  // namespace infralidar
