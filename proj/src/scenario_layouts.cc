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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infralidar/random.h"
#include "infralidar/scenario_config.h"

namespace infralidar {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

// Lane centerlines measured from the road axis; bicycles use the outer one.
constexpr double kLane1 = 1.75;
constexpr double kLane2 = 5.25;
constexpr double kBikeLane = 8.75;
constexpr double kRoadHalfWidth = 10.5;
constexpr double kTurnaround = 80.0;
constexpr double kRouteSpacing = 0.5;
constexpr double kSensorHeight = 6.0;
constexpr double kLowTilt = 0.1;
constexpr double kHighTilt = 0.3;
constexpr double kBuildingHeight = 15.0;

// Minimum along-route gap between actors sharing a loop.
constexpr double kVehicleGap = 14.0;
constexpr double kVruGap = 4.0;

double Cross(const Vector2d& a, const Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

void AppendSegment(Polygon2d& out, const Vector2d& to, double spacing) {
  if (out.empty()) {
    out.push_back(to);
    return;
  }
  const Vector2d from = out.back();
  const double len = (to - from).norm();
  if (len < 1e-9) return;
  const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int i = 1; i <= n; ++i) {
    out.push_back(from + (to - from) * (static_cast<double>(i) / n));
  }
}

Route LoopRoute(const Polygon2d& corners, double radius, double speed_min,
                double speed_max) {
  return {RoundedPolyline(corners, radius, kRouteSpacing, true), speed_min,
          speed_max};
}

// Closed lane loop along a road axis: out on the right-hand lane at
// `offset`, U-turn beyond the ROI, back on the opposite lane.
Route AxisLoop(bool along_x, double offset, double speed_min,
               double speed_max) {
  const double e = kTurnaround;
  Polygon2d c;
  if (along_x) {
    c = {{-e, -offset}, {e, -offset}, {e, offset}, {-e, offset}};
  } else {
    c = {{offset, -e}, {offset, e}, {-offset, e}, {-offset, -e}};
  }
  return LoopRoute(c, offset, speed_min, speed_max);
}

Route RectLoop(double hx, double hy, double speed) {
  return LoopRoute({{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}, 1.0, speed,
                   speed);
}

std::vector<Building> CornerBlocks() {
  std::vector<Building> out;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      Building b;
      const double lo = 15.0;
      const double hi = 70.0;
      b.min = {sx > 0 ? lo : -hi, sy > 0 ? lo : -hi, 0.0};
      b.max = {sx > 0 ? hi : -lo, sy > 0 ? hi : -lo, kBuildingHeight};
      out.push_back(b);
    }
  }
  return out;
}

Polygon2d Rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

void AddSensorPair(LayoutDefinition& layout, const Vector2d& position,
                   const Vector2d& target) {
  const auto next_id = static_cast<std::uint32_t>(layout.sensors.size() + 1);
  const double yaw = std::atan2(target.y() - position.y(),
                                target.x() - position.x());
  for (int k = 0; k < 2; ++k) {
    SensorPlacement s;
    s.id = next_id + k;
    s.position = {position.x(), position.y(), kSensorHeight};
    s.yaw = yaw;
    s.pitch = k == 0 ? kLowTilt : kHighTilt;
    layout.sensors.push_back(s);
  }
}

void AddIntersectionTraffic(LayoutDefinition& layout) {
  layout.vehicle_routes = {AxisLoop(true, kLane1, 7.0, 10.0),
                           AxisLoop(true, kLane2, 7.0, 10.0),
                           AxisLoop(false, kLane1, 7.0, 10.0),
                           AxisLoop(false, kLane2, 7.0, 10.0)};
  layout.bicycle_routes = {AxisLoop(true, kBikeLane, 4.0, 5.0),
                           AxisLoop(false, kBikeLane, 4.0, 5.0)};
  layout.pedestrian_routes = {RectLoop(12.0, 12.0, 1.4),
                              RectLoop(60.0, 12.8, 1.4),
                              RectLoop(13.6, 60.0, 1.4)};
  layout.road_mask = {Rect(-kTurnaround, -kRoadHalfWidth, kTurnaround,
                           kRoadHalfWidth),
                      Rect(-kRoadHalfWidth, -kTurnaround, kRoadHalfWidth,
                           kTurnaround)};
}

LayoutDefinition LayoutA() {
  LayoutDefinition l;
  l.name = "A";
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      AddSensorPair(l, {13.0 * sx, 13.0 * sy}, Vector2d::Zero());
    }
  }
  l.buildings = CornerBlocks();
  AddIntersectionTraffic(l);
  return l;
}

LayoutDefinition LayoutB() {
  LayoutDefinition l = LayoutA();
  l.name = "B";
  l.sensors.clear();
  const Vector2d positions[] = {
      {-13.0, -13.0}, {-13.0, 13.0}, {13.0, -35.0}, {13.0, 13.0}};
  for (const Vector2d& p : positions) AddSensorPair(l, p, Vector2d::Zero());
  return l;
}

LayoutDefinition LayoutC() {
  LayoutDefinition l;
  l.name = "C";
  const Vector2d positions[] = {
      {-36.0, 13.0}, {-12.0, -13.0}, {12.0, 13.0}, {36.0, -13.0}};
  for (const Vector2d& p : positions) AddSensorPair(l, p, Vector2d::Zero());
  for (double x0 : {-70.0, -25.0, 20.0}) {
    Building b;
    b.min = {x0, 15.0, 0.0};
    b.max = {x0 + 40.0, 40.0, kBuildingHeight};
    l.buildings.push_back(b);
  }
  l.vehicle_routes = {AxisLoop(true, kLane1, 7.0, 10.0),
                      AxisLoop(true, kLane2, 7.0, 10.0)};
  l.bicycle_routes = {AxisLoop(true, kBikeLane, 4.0, 5.0)};
  l.pedestrian_routes = {RectLoop(60.0, 12.5, 1.4)};
  l.road_mask = {Rect(-kTurnaround, -kRoadHalfWidth, kTurnaround,
                      kRoadHalfWidth)};
  return l;
}

// Corners of a closed loop following the curve's centerline at lateral
// offset d (right-hand lane out, left-hand lane back).
Polygon2d CurveLoopCorners(double d) {
  const double e = kTurnaround;
  return {{-e, -25.0 - d}, {25.0 + d, -25.0 - d}, {25.0 + d, e},
          {25.0 - d, e},   {25.0 - d, -25.0 + d}, {-e, -25.0 + d}};
}

LayoutDefinition LayoutD() {
  LayoutDefinition l;
  l.name = "D";
  constexpr double kCurveRadius = 40.0;
  const Vector2d positions[] = {
      {-45.0, -12.0}, {-10.0, -38.0}, {38.0, 0.0}, {12.0, 35.0}};
  for (const Vector2d& p : positions) AddSensorPair(l, p, Vector2d::Zero());
  Building south;
  south.min = {-70.0, -70.0, 0.0};
  south.max = {20.0, -40.0, kBuildingHeight};
  Building east;
  east.min = {40.0, -10.0, 0.0};
  east.max = {70.0, 70.0, kBuildingHeight};
  l.buildings = {south, east};
  l.vehicle_routes = {
      LoopRoute(CurveLoopCorners(kLane1), kCurveRadius, 7.0, 10.0),
      LoopRoute(CurveLoopCorners(kLane2), kCurveRadius, 7.0, 10.0)};
  l.bicycle_routes = {
      LoopRoute(CurveLoopCorners(kBikeLane), kCurveRadius, 4.0, 5.0)};
  l.pedestrian_routes = {
      LoopRoute(CurveLoopCorners(12.5), kCurveRadius, 1.4, 1.4)};
  l.road_mask = {
      RoundedPolyline(CurveLoopCorners(kRoadHalfWidth), kCurveRadius,
                      kRouteSpacing, true)};
  return l;
}

LayoutDefinition LayoutE() {
  LayoutDefinition l;
  l.name = "E";
  // 28 m from the center along the diagonals.
  const double c = 28.0 / std::numbers::sqrt2;
  std::uint32_t id = 1;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      SensorPlacement s;
      s.id = id++;
      s.position = {c * sx, c * sy, 2.0};
      s.yaw = std::atan2(-sy, -sx);
      l.sensors.push_back(s);
    }
  }
  AddIntersectionTraffic(l);
  l.classes = {ObjectClass::kCar, ObjectClass::kPedestrian,
               ObjectClass::kBicycle};
  l.roi_half_extent = 40.0;
  l.remove_ground = true;
  return l;
}

double LoopLength(const Polygon2d& loop) {
  double len = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    len += (loop[(i + 1) % loop.size()] - loop[i]).norm();
  }
  return len;
}

// Waypoints covering `length` meters of the loop starting `offset` meters
// after its first vertex.
std::vector<Vector2d> UnrollLoop(const Polygon2d& loop, double offset,
                                 double length) {
  const std::size_t n = loop.size();
  std::size_t i = 0;
  double s = offset;
  while (true) {
    const double seg = (loop[(i + 1) % n] - loop[i]).norm();
    if (s < seg || seg == 0.0) break;
    s -= seg;
    i = (i + 1) % n;
  }
  const Vector2d a = loop[i];
  const Vector2d b = loop[(i + 1) % n];
  const double seg = (b - a).norm();
  std::vector<Vector2d> out = {seg > 0.0 ? Vector2d(a + (b - a) * (s / seg))
                                         : a};
  double covered = 0.0;
  std::size_t j = (i + 1) % n;
  while (covered < length) {
    covered += (loop[j] - out.back()).norm();
    out.push_back(loop[j]);
    j = (j + 1) % n;
  }
  return out;
}

const std::vector<Route>& RoutesFor(const LayoutDefinition& layout,
                                    ObjectClass c) {
  switch (c) {
    case ObjectClass::kPedestrian:
      return layout.pedestrian_routes;
    case ObjectClass::kBicycle:
      return layout.bicycle_routes;
    default:
      return layout.vehicle_routes;
  }
}

}  // namespace

LayoutDefinition GetLayout(const std::string& name) {
  LayoutDefinition l;
  if (name == "A") {
    l = LayoutA();
  } else if (name == "B") {
    l = LayoutB();
  } else if (name == "C") {
    l = LayoutC();
  } else if (name == "D") {
    l = LayoutD();
  } else if (name == "E") {
    l = LayoutE();
  } else {
    throw ValidationError("unknown layout '" + name + "' (expected A-E)");
  }
  if (l.classes.empty()) {
    l.classes.insert(kAllClasses.begin(), kAllClasses.end());
  }
  return l;
}

Polygon2d RoundedPolyline(const Polygon2d& corners, double radius,
                          double spacing, bool closed) {
  if (corners.size() < 2) return corners;
  if (!(spacing > 0.0)) throw ValidationError("spacing must be > 0");
  const std::size_t n = corners.size();
  Polygon2d out;
  auto vertex = [&](std::size_t i) { return corners[i % n]; };
  const std::size_t first = closed ? 0 : 1;
  const std::size_t last = closed ? n : n - 1;
  if (!closed) out.push_back(corners.front());
  for (std::size_t i = first; i < last; ++i) {
    const Vector2d p0 = vertex(i + n - 1);
    const Vector2d p1 = vertex(i);
    const Vector2d p2 = vertex(i + 1);
    const double len1 = (p1 - p0).norm();
    const double len2 = (p2 - p1).norm();
    const Vector2d d1 = (p1 - p0) / len1;
    const Vector2d d2 = (p2 - p1) / len2;
    const double turn = std::atan2(Cross(d1, d2), d1.dot(d2));
    if (std::abs(turn) < 1e-9 || radius <= 0.0) {
      AppendSegment(out, p1, spacing);
      continue;
    }
    const double half_tan = std::tan(0.5 * std::abs(turn));
    const double tangent = std::min({radius * half_tan, 0.5 * len1, 0.5 * len2});
    const double r = tangent / half_tan;
    const Vector2d a = p1 - d1 * tangent;
    const Vector2d normal = turn > 0.0 ? Vector2d(-d1.y(), d1.x())
                                       : Vector2d(d1.y(), -d1.x());
    const Vector2d center = a + normal * r;
    AppendSegment(out, a, spacing);
    const double start = std::atan2(a.y() - center.y(), a.x() - center.x());
    const int steps = std::max(
        2, static_cast<int>(std::ceil(r * std::abs(turn) / spacing)));
    for (int k = 1; k <= steps; ++k) {
      const double ang = start + turn * static_cast<double>(k) / steps;
      out.push_back(center + r * Vector2d(std::cos(ang), std::sin(ang)));
    }
  }
  if (closed) {
    // Close the loop, then drop the duplicated start vertex.
    const Vector2d start = out.front();
    AppendSegment(out, start, spacing);
    if ((out.back() - out.front()).norm() < 1e-9) out.pop_back();
  } else {
    AppendSegment(out, corners.back(), spacing);
  }
  return out;
}

Pose AimedPose(const Vector3d& position, const Vector2d& target, double tilt) {
  const double yaw =
      std::atan2(target.y() - position.y(), target.x() - position.x());
  return Pose::FromYawPitchRoll(position, yaw, tilt, 0.0);
}

bool InsidePolygon(const Polygon2d& polygon, const Vector2d& p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vector2d& a = polygon[i];
    const Vector2d& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<Actor> GenerateTraffic(const LayoutDefinition& layout,
                                   const std::map<ObjectClass, int>& counts,
                                   double duration, std::uint64_t seed,
                                   std::uint32_t first_id) {
  const KeyedRng rng(seed);
  // Route assignment: (class, ordinal) -> route index, grouped per route
  // list so actors sharing a loop can be spaced apart.
  struct Pending {
    ObjectClass object_class;
    std::uint32_t id;
  };
  std::map<std::pair<const std::vector<Route>*, std::size_t>,
           std::vector<Pending>>
      per_route;
  std::uint32_t id = first_id;
  for (const auto& [cls, count] : counts) {
    if (count < 0) throw ValidationError("traffic counts must be >= 0");
    if (count == 0) continue;
    if (!layout.classes.contains(cls)) {
      throw ValidationError("layout " + layout.name + " has no " +
                            std::string(ToString(cls)) + " traffic");
    }
    const auto& routes = RoutesFor(layout, cls);
    if (routes.empty()) {
      throw ValidationError("layout " + layout.name + " has no route for " +
                            std::string(ToString(cls)));
    }
    const auto cls_index = static_cast<std::uint64_t>(cls);
    const std::size_t phase =
        rng.Bits(StreamKey(kTrafficStream, cls_index, 0), 0) % routes.size();
    for (int k = 0; k < count; ++k) {
      per_route[{&routes, (phase + k) % routes.size()}].push_back({cls, id++});
    }
  }

  std::vector<Actor> out;
  for (const auto& [key, actors] : per_route) {
    const Route& route = (*key.first)[key.second];
    const std::uint64_t route_key =
        StreamKey(kTrafficStream, key.first == &layout.vehicle_routes ? 1
                                  : key.first == &layout.bicycle_routes ? 2
                                                                        : 3,
                  key.second + 1);
    const double perimeter = LoopLength(route.loop);
    const double speed =
        route.speed_min +
        (route.speed_max - route.speed_min) * rng.Uniform(route_key, 0);
    const double slot = perimeter / static_cast<double>(actors.size());
    const double phase = perimeter * rng.Uniform(route_key, 1);
    for (std::size_t k = 0; k < actors.size(); ++k) {
      const Pending& p = actors[k];
      const Vector3d dims = DefaultDimensions(p.object_class);
      const double gap = IsVehicle(p.object_class) ||
                                 p.object_class == ObjectClass::kMotorcycle
                             ? kVehicleGap
                             : kVruGap;
      const double slack = std::max(0.0, slot - gap);
      const double jitter = slack * rng.Uniform(route_key, 2 + k);
      const double offset =
          std::fmod(phase + slot * static_cast<double>(k) + jitter, perimeter);
      Actor a;
      a.id = p.id;
      a.object_class = p.object_class;
      a.length = dims.x();
      a.width = dims.y();
      a.height = dims.z();
      a.reflectance = DefaultReflectance(p.object_class);
      a.waypoints = UnrollLoop(route.loop, offset, speed * duration + 1.0);
      a.speeds.assign(a.waypoints.size() - 1, speed);
      out.push_back(std::move(a));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Actor& a, const Actor& b) { return a.id < b.id; });
  return out;
}

Scene BuildScenario(const ScenarioConfig& config) {
  const LayoutDefinition layout = GetLayout(config.layout);
  Scene scene;
  scene.layout = layout.name;
  scene.rate = config.rate;
  scene.duration = config.duration;
  scene.road_mask = layout.road_mask;
  scene.buildings = config.buildings ? *config.buildings : layout.buildings;
  const auto& placements = config.sensors ? *config.sensors : layout.sensors;
  for (const SensorPlacement& p : placements) {
    SensorSpec s;
    s.id = p.id;
    s.pose = Pose::FromYawPitchRoll(p.position, p.yaw, p.pitch, p.roll);
    s.layers = config.sensor_model.layers;
    s.vertical_fov = config.sensor_model.vertical_fov;
    s.azimuth_steps = config.sensor_model.azimuth_steps;
    s.max_range = config.sensor_model.max_range;
    s.rate = config.rate;
    scene.sensors.push_back(s);
  }
  scene.actors = config.actors;
  std::uint32_t next_id = 1;
  for (const Actor& a : scene.actors) {
    if (!layout.classes.contains(a.object_class)) {
      throw ValidationError("layout " + layout.name + " does not allow class " +
                            std::string(ToString(a.object_class)));
    }
    next_id = std::max(next_id, a.id + 1);
  }
  auto traffic = GenerateTraffic(layout, config.traffic, config.duration,
                                 config.seed, next_id);
  scene.actors.insert(scene.actors.end(), traffic.begin(), traffic.end());
  scene.Validate();
  return scene;
}

}  // namespace infralidar
