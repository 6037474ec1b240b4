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
/// \brief Scene description, actor motion, LiDAR ray casting and ground
/// truth export for the simulated infrastructure scenarios.

#ifndef INFRALIDAR_SCENARIO_H_
#define INFRALIDAR_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "infralidar/geometry.h"

namespace infralidar {

/// Spinning multi-layer LiDAR. Layers are spread evenly over a symmetric
/// vertical span; azimuth steps cover the full circle starting at the
/// sensor's +x axis.
struct SensorSpec {
  std::uint32_t id = 1;
  Pose pose;
  int layers = 64;
  double vertical_fov = 45.0 * std::numbers::pi / 180.0;
  int azimuth_steps = 1024;
  double max_range = 120.0;
  double rate = 20.0;

  void Validate() const;
  double LayerElevation(int layer) const;
  double StepAzimuth(int step) const;
  double horizontal_step() const;
};

/// Box-shaped road user moving along a polyline at per-segment speeds. The
/// actor exists from spawn_time until it reaches the last waypoint.
struct Actor {
  std::uint32_t id = 0;
  ObjectClass object_class = ObjectClass::kCar;
  double length = 4.5;
  double width = 1.8;
  double height = 1.6;
  std::vector<Eigen::Vector2d> waypoints;
  std::vector<double> speeds;  // one per segment
  double spawn_time = 0.0;
  double reflectance = 0.6;

  void Validate() const;
};

/// Class-typical dimensions (length, width, height).
Eigen::Vector3d DefaultDimensions(ObjectClass c);
double DefaultReflectance(ObjectClass c);

struct Building {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
  double reflectance = 0.35;
};

using Polygon2d = std::vector<Eigen::Vector2d>;

struct Scene {
  std::string layout;
  double ground_half_extent = 150.0;
  double ground_reflectance = 0.15;
  std::vector<Building> buildings;
  std::vector<Polygon2d> road_mask;
  std::vector<SensorSpec> sensors;
  std::vector<Actor> actors;
  double rate = 20.0;
  double duration = 0.0;

  /// Distinct sensor ids (all > 0), distinct actor ids, valid parts.
  void Validate() const;
  const SensorSpec& Sensor(std::uint32_t id) const;
  std::int64_t NumFrames() const;
  double FrameTime(std::int64_t frame_index) const {
    return static_cast<double>(frame_index) / rate;
  }
};

struct GroundTruthRecord {
  std::int64_t frame_index = 0;
  std::uint32_t actor_id = 0;
  ObjectClass object_class = ObjectClass::kCar;
  OrientedBox box;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
};

struct ActorState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double yaw = 0.0;
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

/// Position, heading and velocity at absolute time t; nullopt when the
/// actor has not spawned yet or has finished its path.
std::optional<ActorState> EvaluateActor(const Actor& actor, double t);

/// Ground truth for all actors present at time t. Velocity is the analytic
/// path derivative (a central difference when t sits on a waypoint break);
/// acceleration is the central difference of velocity over one frame.
std::vector<GroundTruthRecord> StepActors(const Scene& scene, double t,
                                          std::int64_t frame_index);

/// Records for frames [first_frame, last_frame).
std::vector<GroundTruthRecord> ExportGt(const Scene& scene,
                                        std::int64_t first_frame,
                                        std::int64_t last_frame);

inline constexpr std::string_view kGtCsvHeader =
    "frame,actor_id,class,cx,cy,cz,l,w,h,yaw,vx,vy,vz,ax,ay,az";
void WriteGtCsv(const std::filesystem::path& path,
                std::span<const GroundTruthRecord> records);
std::vector<GroundTruthRecord> ReadGtCsv(const std::filesystem::path& path);

/// Static and dynamic geometry of a scene frozen at one instant.
class SceneSnapshot {
 public:
  struct BoxPrimitive {
    Eigen::Vector3d center;
    Eigen::Vector3d half;
    double cos_yaw = 1.0;
    double sin_yaw = 0.0;
    double reflectance = 0.0;
  };
  struct Hit {
    double range = 0.0;
    double reflectance = 0.0;
  };

  SceneSnapshot(const Scene& scene, double t);

  /// Nearest surface along origin + r * dir for r in (0, max_range]. `dir`
  /// must be unit length.
  std::optional<Hit> Cast(const Eigen::Vector3d& origin,
                          const Eigen::Vector3d& dir, double max_range) const;

  const std::vector<BoxPrimitive>& boxes() const { return boxes_; }
  double ground_half_extent() const { return ground_half_extent_; }
  double ground_reflectance() const { return ground_reflectance_; }

  /// Distance from p to the closest primitive surface (ground included).
  double DistanceToSurface(const Eigen::Vector3d& p) const;

 private:
  std::vector<BoxPrimitive> boxes_;
  double ground_half_extent_;
  double ground_reflectance_;
};

/// Slab test against one box; returns the entry range when the ray enters it
/// within (0, max_range].
std::optional<double> IntersectBox(const SceneSnapshot::BoxPrimitive& box,
                                   const Eigen::Vector3d& origin,
                                   const Eigen::Vector3d& dir,
                                   double max_range);

/// One full revolution of `sensor` at time t, rendered atomically. Points
/// are in the sensor frame, ordered by (azimuth step, layer); intensity is
/// the reflectance of the surface hit. Origins are (sensor id, ordinal).
PointCloudFrame CastScan(const Scene& scene, const SensorSpec& sensor,
                         double t, std::int64_t frame_index);
PointCloudFrame CastScan(const SceneSnapshot& snapshot,
                         const SensorSpec& sensor, double t,
                         std::int64_t frame_index);

}  // namespace infralidar

#endif  // INFRALIDAR_SCENARIO_H_
