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

#include "infralidar/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace infralidar {
namespace {

constexpr double kPi = std::numbers::pi;

bool Finite(const Eigen::Vector3d& v) { return v.allFinite(); }

// Signed distance of p from the directed line a->b (positive on the left).
double Side(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
            const Eigen::Vector2d& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

}  // namespace

std::string_view ToString(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar:
      return "car";
    case ObjectClass::kTruck:
      return "truck";
    case ObjectClass::kPedestrian:
      return "pedestrian";
    case ObjectClass::kBicycle:
      return "bicycle";
    case ObjectClass::kMotorcycle:
      return "motorcycle";
  }
  return "unknown";
}

std::optional<ObjectClass> ParseObjectClass(std::string_view name) {
  for (ObjectClass c : kAllClasses) {
    if (ToString(c) == name) return c;
  }
  return std::nullopt;
}

double WrapAngle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

void PointCloudFrame::AssignOrigins() {
  if (has_origins()) return;
  origins.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    origins[i] = {sensor_id, static_cast<std::uint32_t>(i)};
  }
}

PointCloudFrame PointCloudFrame::CopyMetadata() const {
  PointCloudFrame out;
  out.sensor_id = sensor_id;
  out.frame_index = frame_index;
  out.timestamp = timestamp;
  out.intensity_normalized = intensity_normalized;
  return out;
}

void ValidateFrame(const PointCloudFrame& frame) {
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const Point& p = frame.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      throw ValidationError("frame " + std::to_string(frame.frame_index) +
                            " of sensor " + std::to_string(frame.sensor_id) +
                            ": non-finite point at index " + std::to_string(i));
    }
  }
}

Pose::Pose(const Eigen::Quaterniond& rotation,
           const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double n = rotation_.norm();
  if (n > 0.0 && std::isfinite(n)) rotation_.coeffs() /= n;
}

Pose Pose::FromYawPitchRoll(const Eigen::Vector3d& translation, double yaw,
                            double pitch, double roll) {
  const Eigen::Quaterniond q =
      Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
      Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
      Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX());
  return Pose(q, translation);
}

Pose Pose::Inverse() const {
  const Eigen::Quaterniond inv = rotation_.conjugate();
  return Pose(inv, -(inv * translation_));
}

void Pose::Validate() const {
  if (!Finite(translation_) || !rotation_.coeffs().allFinite()) {
    throw ValidationError("pose has non-finite components");
  }
  if (std::abs(rotation_.norm() - 1.0) > 1e-9) {
    throw ValidationError("pose rotation is not a unit quaternion");
  }
}

Pose Compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation() * b.rotation(),
              a.rotation() * b.translation() + a.translation());
}

void OrientedBox::Validate() const {
  if (!Finite(center) || !std::isfinite(yaw)) {
    throw ValidationError("box has non-finite components");
  }
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0) ||
      !std::isfinite(length) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw ValidationError("box dimensions must be positive");
  }
}

std::array<Eigen::Vector2d, 4> OrientedBox::BevCorners() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  const std::array<Eigen::Vector2d, 4> local = {
      Eigen::Vector2d(hl, hw), Eigen::Vector2d(-hl, hw),
      Eigen::Vector2d(-hl, -hw), Eigen::Vector2d(hl, -hw)};
  std::array<Eigen::Vector2d, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = Eigen::Vector2d(center.x() + c * local[i].x() - s * local[i].y(),
                             center.y() + s * local[i].x() + c * local[i].y());
  }
  return out;
}

Eigen::Vector3d OrientedBox::ToLocal(const Eigen::Vector3d& world) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const Eigen::Vector3d d = world - center;
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()};
}

bool OrientedBox::Contains(const Eigen::Vector3d& world,
                           double tolerance) const {
  const Eigen::Vector3d l = ToLocal(world);
  return std::abs(l.x()) <= 0.5 * length + tolerance &&
         std::abs(l.y()) <= 0.5 * width + tolerance &&
         std::abs(l.z()) <= 0.5 * height + tolerance;
}

PointCloudFrame TransformPoints(const Pose& pose,
                                const PointCloudFrame& frame) {
  pose.Validate();
  ValidateFrame(frame);
  PointCloudFrame out = frame;
  const Eigen::Matrix3d r = pose.RotationMatrix();
  const Eigen::Vector3d& t = pose.translation();
  for (Point& p : out.points) {
    const Eigen::Vector3d q = r * Eigen::Vector3d(p.x, p.y, p.z) + t;
    p.x = q.x();
    p.y = q.y();
    p.z = q.z();
  }
  return out;
}

double PolygonArea(std::span<const Eigen::Vector2d> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

std::vector<Eigen::Vector2d> ClipConvexPolygon(
    std::span<const Eigen::Vector2d> subject,
    std::span<const Eigen::Vector2d> clip) {
  std::vector<Eigen::Vector2d> output(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Eigen::Vector2d& a = clip[e];
    const Eigen::Vector2d& b = clip[(e + 1) % m];
    std::vector<Eigen::Vector2d> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& prev = input[(i + input.size() - 1) % input.size()];
      const double s_cur = Side(a, b, cur);
      const double s_prev = Side(a, b, prev);
      if (s_cur >= 0.0) {
        if (s_prev < 0.0) {
          const double t = s_prev / (s_prev - s_cur);
          output.push_back(prev + t * (cur - prev));
        }
        output.push_back(cur);
      } else if (s_prev >= 0.0) {
        const double t = s_prev / (s_prev - s_cur);
        output.push_back(prev + t * (cur - prev));
      }
    }
  }
  return output;
}

double BevIou(const OrientedBox& a, const OrientedBox& b) {
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  if (!(area_a > 0.0) || !(area_b > 0.0)) {
    throw ValidationError("BEV IoU of a zero-area box");
  }
  // Cheap reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  const double dx = a.center.x() - b.center.x();
  const double dy = a.center.y() - b.center.y();
  if (dx * dx + dy * dy >= (ra + rb) * (ra + rb)) return 0.0;

  const auto ca = a.BevCorners();
  const auto cb = b.BevCorners();
  const std::vector<Eigen::Vector2d> inter = ClipConvexPolygon(ca, cb);
  const double area_i = std::max(0.0, PolygonArea(inter));
  const double area_u = area_a + area_b - area_i;
  if (area_u <= 0.0) return 0.0;
  return std::clamp(area_i / area_u, 0.0, 1.0);
}

std::vector<Point> PointsInBox(const PointCloudFrame& frame,
                               const OrientedBox& box) {
  std::vector<Point> out;
  for (const Point& p : frame.points) {
    if (box.Contains(p.xyz())) out.push_back(p);
  }
  return out;
}

std::size_t CountPointsInBox(std::span<const Point> points,
                             const OrientedBox& box) {
  std::size_t n = 0;
  for (const Point& p : points) {
    if (box.Contains(p.xyz())) ++n;
  }
  return n;
}

BoxDims MinBoxDims(std::span<const Point> points, const OrientedBox& gt) {
  if (points.empty()) return {};
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(
      std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const Point& p : points) {
    const Eigen::Vector3d l = gt.ToLocal(p.xyz());
    lo = lo.cwiseMin(l);
    hi = hi.cwiseMax(l);
  }
  const Eigen::Vector3d ext = hi - lo;
  BoxDims d;
  d.length = std::clamp(ext.x(), 0.0, gt.length);
  d.width = std::clamp(ext.y(), 0.0, gt.width);
  d.height = std::clamp(ext.z(), 0.0, gt.height);
  return d;
}

PointGrid2d::PointGrid2d(std::span<const Point> points, double cell)
    : cell_(cell) {
  if (points.empty()) return;
  double max_x = points[0].x;
  double max_y = points[0].y;
  min_x_ = points[0].x;
  min_y_ = points[0].y;
  for (const Point& p : points) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  // Keep the bucket table bounded for widely spread inputs.
  const double span = std::max(max_x - min_x_, max_y - min_y_);
  cell_ = std::max(cell_, span / 2048.0);
  nx_ = static_cast<std::int64_t>((max_x - min_x_) / cell_) + 1;
  ny_ = static_cast<std::int64_t>((max_y - min_y_) / cell_) + 1;
  std::vector<std::uint32_t> keys(points.size());
  bucket_start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto ix = static_cast<std::int64_t>((points[i].x - min_x_) / cell_);
    const auto iy = static_cast<std::int64_t>((points[i].y - min_y_) / cell_);
    keys[i] = static_cast<std::uint32_t>(Key(ix, iy));
    ++bucket_start_[keys[i] + 1];
  }
  for (std::size_t k = 1; k < bucket_start_.size(); ++k) {
    bucket_start_[k] += bucket_start_[k - 1];
  }
  indices_.resize(points.size());
  std::vector<std::uint32_t> fill(bucket_start_.begin(),
                                  bucket_start_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    indices_[fill[keys[i]]++] = static_cast<std::uint32_t>(i);
  }
}

std::int64_t PointGrid2d::Key(std::int64_t ix, std::int64_t iy) const {
  return iy * nx_ + ix;
}

void PointGrid2d::Candidates(double min_x, double min_y, double max_x,
                             double max_y,
                             std::vector<std::size_t>* out) const {
  out->clear();
  if (nx_ == 0) return;
  const auto clamp_x = [&](double v) {
    return std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((v - min_x_) / cell_)), 0,
        nx_ - 1);
  };
  const auto clamp_y = [&](double v) {
    return std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((v - min_y_) / cell_)), 0,
        ny_ - 1);
  };
  if (max_x < min_x_ || max_y < min_y_ ||
      min_x > min_x_ + static_cast<double>(nx_) * cell_ ||
      min_y > min_y_ + static_cast<double>(ny_) * cell_) {
    return;
  }
  const std::int64_t x0 = clamp_x(min_x), x1 = clamp_x(max_x);
  const std::int64_t y0 = clamp_y(min_y), y1 = clamp_y(max_y);
  for (std::int64_t iy = y0; iy <= y1; ++iy) {
    for (std::int64_t ix = x0; ix <= x1; ++ix) {
      const auto k = static_cast<std::size_t>(Key(ix, iy));
      for (std::uint32_t j = bucket_start_[k]; j < bucket_start_[k + 1]; ++j) {
        out->push_back(indices_[j]);
      }
    }
  }
}

}  // namespace infralidar
