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
#include <limits>
#include <numbers>

#include "infralidar/scenario.h"

namespace infralidar {
namespace {

constexpr double kMinRange = 1e-9;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-primitive angular footprint as seen from the sensor.
struct Footprint {
  bool all_azimuths = false;
  double azimuth_lo = 0.0;
  double azimuth_hi = 0.0;
  double elevation_lo = -std::numbers::pi;
  double elevation_hi = std::numbers::pi;
};

std::optional<double> IntersectGround(const Eigen::Vector3d& origin,
                                      const Eigen::Vector3d& dir,
                                      double max_range, double half_extent) {
  if (dir.z() >= 0.0 || origin.z() <= 0.0) return std::nullopt;
  const double r = -origin.z() / dir.z();
  if (r <= kMinRange || r > max_range) return std::nullopt;
  const double x = origin.x() + r * dir.x();
  const double y = origin.y() + r * dir.y();
  if (std::abs(x) > half_extent || std::abs(y) > half_extent) {
    return std::nullopt;
  }
  return r;
}

}  // namespace

std::optional<double> IntersectBox(const SceneSnapshot::BoxPrimitive& box,
                                   const Eigen::Vector3d& origin,
                                   const Eigen::Vector3d& dir,
                                   double max_range) {
  const Eigen::Vector3d d0 = origin - box.center;
  const double o[3] = {box.cos_yaw * d0.x() + box.sin_yaw * d0.y(),
                       -box.sin_yaw * d0.x() + box.cos_yaw * d0.y(), d0.z()};
  const double d[3] = {box.cos_yaw * dir.x() + box.sin_yaw * dir.y(),
                       -box.sin_yaw * dir.x() + box.cos_yaw * dir.y(),
                       dir.z()};
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double h = box.half[a];
    if (std::abs(d[a]) < 1e-15) {
      if (std::abs(o[a]) > h) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / d[a];
    double t1 = (-h - o[a]) * inv;
    double t2 = (h - o[a]) * inv;
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
    if (t_near > t_far) return std::nullopt;
  }
  // A ray starting inside a box sees nothing of it.
  if (t_near <= kMinRange || t_near > max_range) return std::nullopt;
  return t_near;
}

SceneSnapshot::SceneSnapshot(const Scene& scene, double t)
    : ground_half_extent_(scene.ground_half_extent),
      ground_reflectance_(scene.ground_reflectance) {
  for (const Building& b : scene.buildings) {
    BoxPrimitive p;
    p.center = 0.5 * (b.min + b.max);
    p.half = 0.5 * (b.max - b.min);
    p.reflectance = b.reflectance;
    boxes_.push_back(p);
  }
  for (const Actor& a : scene.actors) {
    const auto state = EvaluateActor(a, t);
    if (!state) continue;
    BoxPrimitive p;
    p.center = {state->position.x(), state->position.y(), 0.5 * a.height};
    p.half = {0.5 * a.length, 0.5 * a.width, 0.5 * a.height};
    p.cos_yaw = std::cos(state->yaw);
    p.sin_yaw = std::sin(state->yaw);
    p.reflectance = a.reflectance;
    boxes_.push_back(p);
  }
}

std::optional<SceneSnapshot::Hit> SceneSnapshot::Cast(
    const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
    double max_range) const {
  std::optional<Hit> best;
  if (auto r = IntersectGround(origin, dir, max_range, ground_half_extent_)) {
    best = Hit{*r, ground_reflectance_};
  }
  for (const BoxPrimitive& b : boxes_) {
    const double limit = best ? best->range : max_range;
    if (auto r = IntersectBox(b, origin, dir, limit)) {
      if (!best || *r < best->range) best = Hit{*r, b.reflectance};
    }
  }
  return best;
}

double SceneSnapshot::DistanceToSurface(const Eigen::Vector3d& p) const {
  double best = std::abs(p.z());
  for (const BoxPrimitive& b : boxes_) {
    const Eigen::Vector3d d = p - b.center;
    const Eigen::Vector3d local(b.cos_yaw * d.x() + b.sin_yaw * d.y(),
                                -b.sin_yaw * d.x() + b.cos_yaw * d.y(), d.z());
    const Eigen::Vector3d q = local.cwiseAbs() - b.half;
    const double outside = q.cwiseMax(0.0).norm();
    const double inside = std::min(q.maxCoeff(), 0.0);
    best = std::min(best, std::abs(outside + inside));
  }
  return best;
}

PointCloudFrame CastScan(const Scene& scene, const SensorSpec& sensor, double t,
                         std::int64_t frame_index) {
  return CastScan(SceneSnapshot(scene, t), sensor, t, frame_index);
}

PointCloudFrame CastScan(const SceneSnapshot& snapshot,
                         const SensorSpec& sensor, double t,
                         std::int64_t frame_index) {
  sensor.Validate();
  const Eigen::Matrix3d rot = sensor.pose.RotationMatrix();
  const Eigen::Vector3d origin = sensor.pose.translation();
  const double max_range = sensor.max_range;
  const int layers = sensor.layers;
  const int steps = sensor.azimuth_steps;
  const double step = sensor.horizontal_step();

  std::vector<double> cos_el(layers), sin_el(layers), elevation(layers);
  for (int k = 0; k < layers; ++k) {
    elevation[k] = sensor.LayerElevation(k);
    cos_el[k] = std::cos(elevation[k]);
    sin_el[k] = std::sin(elevation[k]);
  }

  // Bucket every box into the azimuth columns its bounding sphere can reach.
  const auto& boxes = snapshot.boxes();
  std::vector<Footprint> footprints(boxes.size());
  std::vector<std::vector<std::uint32_t>> columns(steps);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const Eigen::Vector3d c = rot.transpose() * (boxes[b].center - origin);
    const double radius = boxes[b].half.norm();
    const double dist = c.norm();
    if (dist - radius > max_range) continue;
    Footprint& fp = footprints[b];
    if (dist > radius) {
      const double el = std::atan2(c.z(), std::hypot(c.x(), c.y()));
      const double half_angle = std::asin(radius / dist);
      fp.elevation_lo = el - half_angle;
      fp.elevation_hi = el + half_angle;
    }
    const double rho = std::hypot(c.x(), c.y());
    if (rho <= radius) {
      fp.all_azimuths = true;
      for (int j = 0; j < steps; ++j) {
        columns[j].push_back(static_cast<std::uint32_t>(b));
      }
      continue;
    }
    const double az = std::atan2(c.y(), c.x());
    const double half_width = std::asin(radius / rho);
    const auto j0 = static_cast<std::int64_t>(std::floor((az - half_width) / step));
    const auto j1 = static_cast<std::int64_t>(std::ceil((az + half_width) / step));
    const std::int64_t count = std::min<std::int64_t>(j1 - j0 + 1, steps);
    for (std::int64_t n = 0; n < count; ++n) {
      std::int64_t j = (j0 + n) % steps;
      if (j < 0) j += steps;
      columns[static_cast<std::size_t>(j)].push_back(
          static_cast<std::uint32_t>(b));
    }
  }

  PointCloudFrame frame;
  frame.sensor_id = sensor.id;
  frame.frame_index = frame_index;
  frame.timestamp = t;
  frame.points.reserve(static_cast<std::size_t>(layers) * steps / 2);

  const double ground_extent = snapshot.ground_half_extent();
  for (int j = 0; j < steps; ++j) {
    const double az = step * j;
    const double ca = std::cos(az);
    const double sa = std::sin(az);
    const auto& candidates = columns[j];
    for (int k = 0; k < layers; ++k) {
      const Eigen::Vector3d dir_s(cos_el[k] * ca, cos_el[k] * sa, sin_el[k]);
      const Eigen::Vector3d dir_w = rot * dir_s;
      double best = max_range;
      double reflectance = 0.0;
      bool hit = false;
      if (auto r = IntersectGround(origin, dir_w, best, ground_extent)) {
        best = *r;
        reflectance = snapshot.ground_reflectance();
        hit = true;
      }
      for (std::uint32_t b : candidates) {
        const Footprint& fp = footprints[b];
        if (elevation[k] < fp.elevation_lo || elevation[k] > fp.elevation_hi) {
          continue;
        }
        if (auto r = IntersectBox(boxes[b], origin, dir_w, best)) {
          if (*r < best || !hit) {
            best = *r;
            reflectance = boxes[b].reflectance;
            hit = true;
          }
        }
      }
      if (!hit) continue;
      const Eigen::Vector3d p = best * dir_s;
      frame.points.push_back({p.x(), p.y(), p.z(), reflectance});
    }
  }
  frame.AssignOrigins();
  return frame;
}

}  // namespace infralidar
