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
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "infralidar/detector.h"

namespace infralidar {
namespace {

constexpr double kPi = std::numbers::pi;

// Points on the surface of an upright box, spaced `step` apart.
std::vector<Point> BoxSurface(double cx, double cy, double l, double w,
                              double h, double yaw, double step) {
  std::vector<Point> out;
  const double c = std::cos(yaw), s = std::sin(yaw);
  auto add = [&](double u, double v, double z) {
    out.push_back({cx + c * u - s * v, cy + s * u + c * v, z, 0.5});
  };
  for (double z = 0.0; z <= h + 1e-9; z += step) {
    for (double u = -l / 2; u <= l / 2 + 1e-9; u += step) {
      add(u, -w / 2, z);
      add(u, w / 2, z);
    }
    for (double v = -w / 2; v <= w / 2 + 1e-9; v += step) {
      add(-l / 2, v, z);
      add(l / 2, v, z);
    }
  }
  return out;
}

TEST(ConvexHullTest, DropsInteriorAndCollinearPoints) {
  const auto hull = ConvexHull(
      {{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {0, 1}});
  EXPECT_EQ(hull.size(), 4u);
}

TEST(FitBoxTest, RecoversRotatedBox) {
  for (double yaw : {0.0, 0.3, -1.2, kPi / 2}) {
    const auto pts = BoxSurface(3, -2, 4.5, 1.8, 1.6, yaw, 0.1);
    const OrientedBox b = FitBox(pts);
    EXPECT_NEAR(b.length, 4.5, 1e-6);
    EXPECT_NEAR(b.width, 1.8, 1e-6);
    EXPECT_NEAR(b.height, 1.6, 1e-6);
    EXPECT_NEAR(b.center.x(), 3.0, 1e-6);
    EXPECT_NEAR(b.center.y(), -2.0, 1e-6);
    // Heading is defined modulo pi.
    EXPECT_NEAR(std::abs(std::sin(b.yaw - yaw)), 0.0, 1e-6);
    EXPECT_GT(b.yaw, -kPi / 2);
    EXPECT_LE(b.yaw, kPi / 2);
  }
}

TEST(FitBoxTest, TrimmingShrinksNoisyExtents) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.1);
  auto pts = BoxSurface(0, 0, 4.5, 1.8, 1.6, 0.2, 0.05);
  for (Point& p : pts) {
    p.x += n(rng);
    p.y += n(rng);
    p.z += n(rng);
  }
  const OrientedBox raw = FitBox(pts);
  const OrientedBox trimmed = FitBox(pts, 0.02);
  EXPECT_LT(std::abs(trimmed.width - 1.8), std::abs(raw.width - 1.8));
  EXPECT_LT(std::abs(trimmed.length - 4.5), std::abs(raw.length - 4.5));
  EXPECT_THROW(FitBox(pts, 0.5), ValidationError);
}

TEST(FitBoxTest, DegenerateClustersAreClamped) {
  const std::vector<Point> one = {{1, 1, 1, 1}};
  const OrientedBox b = FitBox(one);
  EXPECT_DOUBLE_EQ(b.length, kMinBoxExtent);
  EXPECT_DOUBLE_EQ(b.height, kMinBoxExtent);
  EXPECT_THROW(FitBox(std::vector<Point>{}), ValidationError);
}

TEST(ClusterTest, SeparatesDistantGroups) {
  auto a = BoxSurface(0, 0, 1, 1, 1, 0, 0.2);
  const auto b = BoxSurface(10, 0, 1, 1, 1, 0, 0.2);
  const std::size_t na = a.size();
  a.insert(a.end(), b.begin(), b.end());
  a.push_back({50, 50, 1, 1});  // noise point
  DetectorParams params;
  const auto clusters = Cluster(a, params);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].size(), na);
  EXPECT_EQ(clusters[0].front(), 0u);
  EXPECT_EQ(clusters[1].size(), b.size());
}

TEST(ClassifyTest, ClassTypicalBoxes) {
  DetectorParams params;
  auto cls = [&](double l, double w, double h) {
    OrientedBox b;
    b.length = l;
    b.width = w;
    b.height = h;
    const auto c = Classify(b, 100, params);
    return c ? std::optional<ObjectClass>(c->first) : std::nullopt;
  };
  EXPECT_EQ(cls(4.5, 1.8, 1.6), ObjectClass::kCar);
  EXPECT_EQ(cls(8.0, 2.5, 3.2), ObjectClass::kTruck);
  EXPECT_EQ(cls(2.2, 0.8, 1.4), ObjectClass::kMotorcycle);
  EXPECT_EQ(cls(1.8, 0.6, 1.7), ObjectClass::kBicycle);
  EXPECT_EQ(cls(0.5, 0.5, 1.8), ObjectClass::kPedestrian);
  EXPECT_FALSE(cls(30, 10, 15).has_value());
}

TEST(ClassifyTest, ScoreGrowsWithPoints) {
  DetectorParams params;
  OrientedBox b;
  b.length = 4.5;
  b.width = 1.8;
  b.height = 1.6;
  const double few = Classify(b, 5, params)->second;
  const double many = Classify(b, 500, params)->second;
  EXPECT_LT(few, many);
  EXPECT_LE(many, 1.0);
  EXPECT_GT(few, 0.0);
}

TEST(DetectTest, FindsCarOnFlatGround) {
  PointCloudFrame f;
  f.frame_index = 4;
  for (double x = -10; x <= 10; x += 0.25) {
    for (double y = -10; y <= 10; y += 0.25) f.points.push_back({x, y, 0, 0.2});
  }
  auto car = BoxSurface(3, 2, 4.5, 1.8, 1.6, 0.4, 0.1);
  std::erase_if(car, [](const Point& p) { return p.z < 0.05; });
  f.points.insert(f.points.end(), car.begin(), car.end());
  DetectorParams params;
  const auto dets = FilterDetections(Detect(f, params), RoiSpec{}, params);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].object_class, ObjectClass::kCar);
  EXPECT_EQ(dets[0].frame_index, 4);
  EXPECT_NEAR(dets[0].box.center.x(), 3.0, 0.1);
  EXPECT_NEAR(dets[0].box.center.y(), 2.0, 0.1);
  // Bottom snapped to the ground.
  EXPECT_NEAR(dets[0].box.center.z() - 0.5 * dets[0].box.height, 0.0, 1e-9);
  EXPECT_NEAR(dets[0].box.height, 1.6, 0.1);
}

TEST(FilterDetectionsTest, RoiAndDuplicates) {
  auto det = [](double x, double score) {
    Detection d;
    d.box.center = {x, 0, 0.8};
    d.box.length = 4;
    d.box.width = 2;
    d.box.height = 1.6;
    d.score = score;
    return d;
  };
  const std::vector<Detection> dets = {det(0, 0.5), det(0.5, 0.9), det(100, 1.0),
                                       det(10, 0.1)};
  DetectorParams params;
  const auto kept = FilterDetections(dets, RoiSpec{}, params);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
  EXPECT_DOUBLE_EQ(kept[1].score, 0.1);
}

TEST(DetectionsCsvTest, RoundTrip) {
  Detection d;
  d.frame_index = 3;
  d.object_class = ObjectClass::kBicycle;
  d.score = 0.123456789;
  d.box.center = {1.5, -2.25, 0.85};
  d.box.length = 1.8;
  d.box.width = 0.6;
  d.box.height = 1.7;
  d.box.yaw = 0.3;
  const auto path =
      std::filesystem::temp_directory_path() / "infralidar_detections.csv";
  WriteDetectionsCsv(path, std::vector<Detection>{d});
  const auto back = ReadDetectionsCsv(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].object_class, d.object_class);
  EXPECT_EQ(back[0].score, d.score);
  EXPECT_EQ(back[0].box.center, d.box.center);
  EXPECT_EQ(back[0].box.yaw, d.box.yaw);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace infralidar
