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

#include <gtest/gtest.h>

#include "infralidar/csv.h"
#include "infralidar/scenario.h"
#include "infralidar/scenario_config.h"

namespace infralidar {
namespace {

Actor StraightActor(double speed) {
  Actor a;
  a.id = 1;
  a.waypoints = {{0, 0}, {10, 0}, {10, 10}};
  a.speeds = {speed, speed};
  return a;
}

TEST(ActorTest, MovesAlongSegmentsAtGivenSpeed) {
  const Actor a = StraightActor(2.0);
  const auto s = EvaluateActor(a, 2.5);
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->position.x(), 5.0, 1e-12);
  EXPECT_NEAR(s->velocity.x(), 2.0, 1e-12);
  EXPECT_NEAR(s->yaw, 0.0, 1e-12);
  const auto t = EvaluateActor(a, 7.5);
  ASSERT_TRUE(t);
  EXPECT_NEAR(t->position.y(), 5.0, 1e-12);
  EXPECT_NEAR(t->yaw, std::numbers::pi / 2, 1e-12);
  EXPECT_FALSE(EvaluateActor(a, 10.5));
}

TEST(ActorTest, SpawnTimeDelaysAppearance) {
  Actor a = StraightActor(1.0);
  a.spawn_time = 3.0;
  EXPECT_FALSE(EvaluateActor(a, 2.9));
  EXPECT_NEAR(EvaluateActor(a, 4.0)->position.x(), 1.0, 1e-12);
}

TEST(ActorTest, ValidateRejectsBadPaths) {
  Actor a = StraightActor(1.0);
  a.speeds.pop_back();
  EXPECT_THROW(a.Validate(), ValidationError);
  a = StraightActor(-1.0);
  EXPECT_THROW(a.Validate(), ValidationError);
}

TEST(GroundTruthTest, ConstantVelocityHasZeroAcceleration) {
  Scene scene;
  scene.actors = {StraightActor(3.0)};
  scene.duration = 1.0;
  const auto gt = ExportGt(scene, 0, scene.NumFrames());
  ASSERT_EQ(gt.size(), 20u);
  for (const GroundTruthRecord& g : gt) {
    EXPECT_NEAR(g.acceleration.norm(), 0.0, 1e-9);
    EXPECT_NEAR(g.velocity.x(), 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(g.box.center.z(), 0.8);
  }
  EXPECT_THROW(ExportGt(scene, 0, 21), ValidationError);
}

TEST(GroundTruthTest, CsvRoundTrip) {
  Scene scene;
  scene.actors = {StraightActor(3.0)};
  scene.duration = 2.0;
  const auto gt = ExportGt(scene, 0, scene.NumFrames());
  const auto path =
      std::filesystem::temp_directory_path() / "infralidar_scenario_gt.csv";
  WriteGtCsv(path, gt);
  const auto back = ReadGtCsv(path);
  ASSERT_EQ(back.size(), gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    EXPECT_EQ(back[i].box.center, gt[i].box.center);
    EXPECT_EQ(back[i].velocity, gt[i].velocity);
    EXPECT_EQ(back[i].box.yaw, gt[i].box.yaw);
  }
  std::filesystem::remove(path);
}

TEST(RayCastTest, EmptySceneHitsGroundOnly) {
  Scene scene;
  SensorSpec s;
  s.pose = Pose::FromYawPitchRoll({0, 0, 5}, 0, 0, 0);
  s.layers = 16;
  s.azimuth_steps = 64;
  const PointCloudFrame f = CastScan(scene, s, 0.0, 0);
  ASSERT_GT(f.size(), 0u);
  // Only downward layers whose ground hit lies within range.
  std::size_t layers = 0;
  for (int k = 0; k < s.layers; ++k) {
    const double el = s.LayerElevation(k);
    if (el < 0.0 && 5.0 / std::sin(-el) <= s.max_range) ++layers;
  }
  EXPECT_EQ(f.size(), layers * 64u);
  for (const Point& p : f.points) {
    EXPECT_NEAR(s.pose.Apply(p.xyz()).z(), 0.0, 1e-9);
    EXPECT_LE(p.xyz().norm(), s.max_range + 1e-9);
  }
}

TEST(RayCastTest, BoxFaceIsSeenAtItsDistance) {
  Scene scene;
  scene.actors = {StraightActor(0.0)};
  scene.actors[0].waypoints = {{10, 0}, {20, 0}};
  scene.actors[0].speeds = {0.0};
  scene.actors[0].height = 3.0;
  SensorSpec s;
  s.pose = Pose::FromYawPitchRoll({0, 0, 1}, 0, 0, 0);
  s.layers = 8;
  s.azimuth_steps = 360;
  const PointCloudFrame f = CastScan(scene, s, 0.0, 0);
  int on_face = 0;
  for (const Point& p : f.points) {
    if (std::abs(p.x - 7.75) < 1e-9 && std::abs(p.y) <= 0.9) ++on_face;
  }
  EXPECT_GT(on_face, 0);
  // Same scan from the brute-force snapshot cast.
  const SceneSnapshot snap(scene, 0.0);
  for (const Point& p : f.points) {
    const Eigen::Vector3d dir = s.pose.RotationMatrix() * p.xyz().normalized();
    const auto hit = snap.Cast(s.pose.translation(), dir, s.max_range);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->range, p.xyz().norm(), 1e-9);
  }
}

TEST(LayoutTest, SensorCountsAndScenarioEGeometry) {
  for (const char* name : {"A", "B", "C", "D"}) {
    EXPECT_EQ(GetLayout(name).sensors.size(), 8u) << name;
  }
  const LayoutDefinition e = GetLayout("E");
  ASSERT_EQ(e.sensors.size(), 4u);
  for (const SensorPlacement& s : e.sensors) {
    EXPECT_NEAR(s.position.z(), 2.0, 1e-12);
    EXPECT_NEAR(s.position.head<2>().norm(), 28.0, 1e-9);
  }
  EXPECT_TRUE(e.remove_ground);
  EXPECT_DOUBLE_EQ(e.roi_half_extent, 40.0);
  EXPECT_THROW(GetLayout("F"), ValidationError);
}

TEST(LayoutTest, SensorsStayOutsideBuildings) {
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    const LayoutDefinition l = GetLayout(name);
    for (const SensorPlacement& s : l.sensors) {
      for (const Building& b : l.buildings) {
        const bool inside = (s.position.array() >= b.min.array()).all() &&
                            (s.position.array() <= b.max.array()).all();
        EXPECT_FALSE(inside) << name << " sensor " << s.id;
      }
    }
  }
}

TEST(TrafficTest, DeterministicAndClassChecked) {
  const LayoutDefinition a = GetLayout("A");
  const std::map<ObjectClass, int> counts = {{ObjectClass::kCar, 3},
                                             {ObjectClass::kPedestrian, 2}};
  const auto x = GenerateTraffic(a, counts, 30.0, 5, 10);
  const auto y = GenerateTraffic(a, counts, 30.0, 5, 10);
  ASSERT_EQ(x.size(), 5u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].waypoints, y[i].waypoints);
    EXPECT_EQ(x[i].speeds, y[i].speeds);
    EXPECT_GE(x[i].id, 10u);
    // Every actor lasts the whole duration.
    EXPECT_TRUE(EvaluateActor(x[i], 30.0).has_value());
  }
  EXPECT_THROW(GenerateTraffic(GetLayout("E"), {{ObjectClass::kTruck, 1}},
                               10.0, 1, 1),
               ValidationError);
}

TEST(ScenarioConfigTest, ParsesAndBuilds) {
  const auto j = nlohmann::json::parse(R"({
    "layout": "A", "duration": 2, "seed": 4,
    "sensor_model": {"layers": 32, "azimuth_steps": 256},
    "actors": [{"id": 100, "class": "truck",
                "waypoints": [[0, 0], [10, 0]], "speed": 2}],
    "traffic": {"car": 2}})");
  const ScenarioConfig c = ParseScenarioConfig(j);
  const Scene scene = BuildScenario(c);
  EXPECT_EQ(scene.NumFrames(), 40);
  EXPECT_EQ(scene.sensors.size(), 8u);
  EXPECT_EQ(scene.sensors[0].layers, 32);
  ASSERT_EQ(scene.actors.size(), 3u);
  for (const Actor& a : scene.actors) {
    if (a.object_class == ObjectClass::kCar) EXPECT_GT(a.id, 100u);
  }
}

TEST(ScenarioConfigTest, SchemaErrors) {
  using nlohmann::json;
  EXPECT_THROW(ParseScenarioConfig(json::parse(R"({"layout": "A", "x": 1})")),
               ValidationError);
  EXPECT_THROW(ParseScenarioConfig(json::parse(R"({"duration": 1})")),
               ValidationError);
  EXPECT_THROW(ParseScenarioConfig(json::parse(
                   R"({"layout": "A", "traffic": {"bus": 1}})")),
               ValidationError);
  EXPECT_THROW(
      ParseScenarioConfig(json::parse(R"({"layout": "A", "actors": [
        {"id": 1, "class": "car", "waypoints": [[0,0],[1,0]], "speed": 1},
        {"id": 1, "class": "car", "waypoints": [[0,0],[1,0]], "speed": 1}]})")),
      ValidationError);
}

TEST(ScenarioConfigTest, MalformedJsonReportsLine) {
  const auto path =
      std::filesystem::temp_directory_path() / "infralidar_bad_config.json";
  WriteFile(path, "{\n  \"layout\": \"A\",\n  oops\n}\n");
  try {
    LoadScenarioConfig(path);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string() + ":3"),
              std::string::npos)
        << e.what();
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace infralidar
