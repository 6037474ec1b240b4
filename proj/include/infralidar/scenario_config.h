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
/// \brief Scenario layouts A-E and the scenario-config file schema.
///
/// Schema (JSON, every key optional except `layout`):
///
///     {
///       "layout": "A",                  // A | B | C | D | E
///       "duration": 60.0,               // seconds
///       "rate": 20.0,                   // Hz
///       "seed": 1,
///       "sensor_model": {"layers": 64, "vertical_fov_deg": 45,
///                        "azimuth_steps": 1024, "max_range": 120},
///       "sensors": [{"id": 1, "position": [x, y, z],
///                    "yaw": 0, "pitch": 0.1, "roll": 0}],
///       "actors": [{"id": 1, "class": "car", "dims": [l, w, h],
///                   "waypoints": [[x, y], ...], "speeds": [...] | "speed": v,
///                   "spawn_time": 0}],
///       "traffic": {"car": 4, "truck": 2, "pedestrian": 2,
///                   "bicycle": 2, "motorcycle": 2},
///       "buildings": [{"min": [x, y, z], "max": [x, y, z]}],
///       "noise": {...}                  // read by the pipeline layer
///     }
///
/// Omitted `sensors` / `buildings` fall back to the layout defaults.
/// `traffic` adds generated actors on the layout's looping routes with ids
/// following the explicit actors.

#ifndef INFRALIDAR_SCENARIO_CONFIG_H_
#define INFRALIDAR_SCENARIO_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "infralidar/scenario.h"

namespace infralidar {

struct SensorModel {
  int layers = 64;
  double vertical_fov = 45.0 * std::numbers::pi / 180.0;
  int azimuth_steps = 1024;
  double max_range = 120.0;
};

struct SensorPlacement {
  std::uint32_t id = 1;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/// Closed loop driven repeatedly by generated actors.
struct Route {
  Polygon2d loop;  // densified, first vertex not repeated
  double speed_min = 1.0;
  double speed_max = 1.0;
};

struct LayoutDefinition {
  std::string name;
  std::vector<SensorPlacement> sensors;
  std::vector<Building> buildings;
  std::vector<Polygon2d> road_mask;
  std::vector<Route> vehicle_routes;
  std::vector<Route> bicycle_routes;
  std::vector<Route> pedestrian_routes;
  std::set<ObjectClass> classes;
  double roi_half_extent = 56.0;
  bool remove_ground = false;
};

/// Throws ValidationError for names other than A-E.
LayoutDefinition GetLayout(const std::string& name);

struct ScenarioConfig {
  std::string layout = "A";
  double duration = 10.0;
  double rate = 20.0;
  std::uint64_t seed = 1;
  SensorModel sensor_model;
  std::optional<std::vector<SensorPlacement>> sensors;
  std::optional<std::vector<Building>> buildings;
  std::vector<Actor> actors;
  std::map<ObjectClass, int> traffic;
};

ScenarioConfig ParseScenarioConfig(const nlohmann::json& j);
/// Throws IoError for unreadable/ill-formed files, ValidationError for
/// schema violations.
ScenarioConfig LoadScenarioConfig(const std::filesystem::path& path);

/// Validated scene with sensors aimed according to the layout.
Scene BuildScenario(const ScenarioConfig& config);

/// Generated actors spread over the layout routes; deterministic in seed.
std::vector<Actor> GenerateTraffic(const LayoutDefinition& layout,
                                   const std::map<ObjectClass, int>& counts,
                                   double duration, std::uint64_t seed,
                                   std::uint32_t first_id);

/// Polyline with every interior corner replaced by a circular fillet of the
/// given radius, sampled at most `spacing` meters apart. `closed` treats
/// the polyline as a loop.
Polygon2d RoundedPolyline(const Polygon2d& corners, double radius,
                          double spacing, bool closed);

/// Sensor pose aimed at `target` in the horizontal plane, tilted down by
/// `tilt`.
Pose AimedPose(const Eigen::Vector3d& position, const Eigen::Vector2d& target,
               double tilt);

/// Point-in-polygon (even-odd rule).
bool InsidePolygon(const Polygon2d& polygon, const Eigen::Vector2d& p);

}  // namespace infralidar

#endif  // INFRALIDAR_SCENARIO_CONFIG_H_
