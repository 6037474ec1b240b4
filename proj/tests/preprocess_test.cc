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

#include "infralidar/preprocess.h"

namespace infralidar {
namespace {

PointCloudFrame Cloud(std::uint32_t sensor, std::vector<Point> pts) {
  PointCloudFrame f;
  f.sensor_id = sensor;
  f.points = std::move(pts);
  f.AssignOrigins();
  return f;
}

TEST(FuseTest, TransformsAndKeepsOrigins) {
  const PointCloudFrame a = Cloud(1, {{1, 0, 0, 0.2}});
  const PointCloudFrame b = Cloud(2, {{0, 0, 0, 0.3}, {1, 1, 1, 0.4}});
  const Pose pa = Pose::FromYawPitchRoll({10, 0, 5}, M_PI / 2, 0, 0);
  const Pose pb = Pose::FromYawPitchRoll({0, 0, 0}, 0, 0, 0);
  const PointCloudFrame f =
      Fuse(std::vector<SensorFrame>{{&a, pa}, {&b, pb}}, 1e-6);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f.sensor_id, 0u);
  EXPECT_NEAR(f.points[0].x, 10.0, 1e-12);
  EXPECT_NEAR(f.points[0].y, 1.0, 1e-12);
  EXPECT_NEAR(f.points[0].z, 5.0, 1e-12);
  EXPECT_EQ(f.origin(2).sensor_id, 2u);
  EXPECT_EQ(f.origin(2).ordinal, 1u);
}

TEST(FuseTest, TimestampMismatchThrows) {
  PointCloudFrame a = Cloud(1, {}), b = Cloud(2, {});
  b.timestamp = 0.05;
  EXPECT_THROW(Fuse(std::vector<SensorFrame>{{&a, Pose()}, {&b, Pose()}}, 1e-3),
               ValidationError);
}

TEST(CropRoiTest, BoundsAreClosed) {
  RoiSpec roi;
  const PointCloudFrame f = Cloud(
      1, {{56, -56, 4, 1}, {56.01, 0, 1, 1}, {0, 0, -0.05, 1}, {0, 0, -0.06, 1}});
  EXPECT_EQ(CropRoi(f, roi).size(), 2u);
}

TEST(DownsampleGroundTest, OnlyBandPointsAreThinned) {
  RoiSpec roi;
  roi.ground_keep_fraction = 0.0;
  const PointCloudFrame f =
      Cloud(1, {{0, 0, 0.04, 1}, {0, 0, -0.05, 1}, {0, 0, 0.06, 1}});
  const PointCloudFrame d = DownsampleGround(f, roi, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.points[0].z, 0.06);
  roi.ground_keep_fraction = 1.0;
  EXPECT_EQ(DownsampleGround(f, roi, 1).size(), 3u);
}

TEST(DownsampleGroundTest, SingleAndFusedMakeTheSameDecisions) {
  RoiSpec roi;
  std::vector<Point> pts(2000, Point{0, 0, 0.0, 1});
  const PointCloudFrame a = Cloud(1, pts), b = Cloud(2, pts);
  const PointCloudFrame fused =
      Fuse(std::vector<SensorFrame>{{&b, Pose()}, {&a, Pose()}}, 1e-6);
  const PointCloudFrame da = DownsampleGround(a, roi, 5);
  const PointCloudFrame df = DownsampleGround(fused, roi, 5);
  std::vector<std::uint32_t> from_a, from_fused;
  for (std::size_t i = 0; i < da.size(); ++i) from_a.push_back(da.origin(i).ordinal);
  for (std::size_t i = 0; i < df.size(); ++i) {
    if (df.origin(i).sensor_id == 1) from_fused.push_back(df.origin(i).ordinal);
  }
  EXPECT_EQ(from_a, from_fused);
  EXPECT_GT(from_a.size(), 100u);
  EXPECT_LT(from_a.size(), 320u);
}

TEST(IntensityTest, DropsZerosClampsAndIsIdempotent) {
  const PointCloudFrame f =
      Cloud(1, {{0, 0, 1, 0.0}, {0, 0, 1, 0.3}, {0, 0, 1, 0.9}});
  const PointCloudFrame n = FilterAndNormalizeIntensity(f, 0.6);
  ASSERT_EQ(n.size(), 2u);
  EXPECT_DOUBLE_EQ(n.points[0].intensity, 0.5);
  EXPECT_DOUBLE_EQ(n.points[1].intensity, 1.0);
  const PointCloudFrame again = FilterAndNormalizeIntensity(n, 0.6);
  EXPECT_DOUBLE_EQ(again.points[0].intensity, 0.5);
  EXPECT_DOUBLE_EQ(ComputeIntensityMax(std::vector<PointCloudFrame>{f}), 0.9);
  EXPECT_THROW(FilterAndNormalizeIntensity(Cloud(1, {{0, 0, 0, -1}}), 1.0),
               ValidationError);
}

TEST(OutlierFilterTest, IsolatedPointsAreRemoved) {
  const PointCloudFrame f = Cloud(1, {{0, 0, 1, 1},
                                      {0.1, 0, 1, 1},
                                      {0, 0.1, 1, 1},
                                      {5, 5, 1, 1}});
  EXPECT_EQ(RadiusOutlierFilter(f, 0.5, 2).size(), 3u);
}

TEST(PreprocessTest, RunsCropGroundAndIntensity) {
  PreprocessSpec spec;
  spec.roi.ground_keep_fraction = 0.0;
  spec.intensity_max = 0.5;
  const PointCloudFrame f = Cloud(1, {{0, 0, 0.0, 0.5},
                                      {0, 0, 1.0, 0.25},
                                      {100, 0, 1.0, 0.5},
                                      {0, 0, 2.0, 0.0}});
  const PointCloudFrame p = Preprocess(f, spec);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p.points[0].intensity, 0.5);
  EXPECT_TRUE(p.intensity_normalized);
}

}  // namespace
}  // namespace infralidar
