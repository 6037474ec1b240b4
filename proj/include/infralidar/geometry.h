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
/// \brief Shared geometric vocabulary: points, frames, poses, upright boxes.

#ifndef INFRALIDAR_GEOMETRY_H_
#define INFRALIDAR_GEOMETRY_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace infralidar {

/// Raised when an input violates a documented precondition. The CLI maps it
/// to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ObjectClass : std::uint8_t {
  kCar = 0,
  kTruck,
  kPedestrian,
  kBicycle,
  kMotorcycle,
};

inline constexpr std::array<ObjectClass, 5> kAllClasses = {
    ObjectClass::kCar, ObjectClass::kTruck, ObjectClass::kPedestrian,
    ObjectClass::kBicycle, ObjectClass::kMotorcycle};

inline constexpr bool IsVehicle(ObjectClass c) {
  return c == ObjectClass::kCar || c == ObjectClass::kTruck;
}
inline constexpr bool IsVru(ObjectClass c) { return !IsVehicle(c); }

std::string_view ToString(ObjectClass c);
/// Accepts the lower-case names written by ToString().
std::optional<ObjectClass> ParseObjectClass(std::string_view name);

/// Wraps an angle to (-pi, pi].
double WrapAngle(double a);

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Eigen::Vector3d xyz() const { return {x, y, z}; }
};

/// Which sensor produced a point and its index within that sensor's scan.
/// Keys the per-point random streams so that single and fused processing
/// make identical random decisions for the same physical return.
struct PointOrigin {
  std::uint32_t sensor_id = 0;
  std::uint32_t ordinal = 0;
};

/// One sensor's (sensor_id > 0) or the fused (sensor_id == 0) point set.
/// `origins` is either empty or parallel to `points`.
struct PointCloudFrame {
  std::uint32_t sensor_id = 0;
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  bool intensity_normalized = false;
  std::vector<Point> points;
  std::vector<PointOrigin> origins;

  std::size_t size() const { return points.size(); }
  bool has_origins() const { return origins.size() == points.size(); }
  PointOrigin origin(std::size_t i) const {
    return has_origins() ? origins[i]
                         : PointOrigin{sensor_id, static_cast<std::uint32_t>(i)};
  }

  /// Fills `origins` with (sensor_id, index) when absent.
  void AssignOrigins();

  /// Same metadata, only the points for which `keep(point, index)` holds.
  template <typename Pred>
  PointCloudFrame Filtered(Pred keep) const {
    PointCloudFrame out = CopyMetadata();
    const bool with_origins = has_origins();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!keep(points[i], i)) continue;
      out.points.push_back(points[i]);
      if (with_origins) out.origins.push_back(origins[i]);
    }
    return out;
  }

  PointCloudFrame CopyMetadata() const;
};

/// Throws ValidationError when any coordinate is non-finite.
void ValidateFrame(const PointCloudFrame& frame);

/// Rigid transform x -> R x + t. The quaternion is normalized on
/// construction and after every composition.
class Pose {
 public:
  Pose() = default;
  Pose(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation);

  static Pose Identity() { return Pose(); }
  /// Rotation Rz(yaw) * Ry(pitch) * Rx(roll). Positive pitch tips the x axis
  /// below the horizon.
  static Pose FromYawPitchRoll(const Eigen::Vector3d& translation, double yaw,
                               double pitch, double roll);

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Matrix3d RotationMatrix() const { return rotation_.toRotationMatrix(); }

  Eigen::Vector3d Apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  Pose Inverse() const;

  /// Throws ValidationError unless the rotation is a unit quaternion (1e-9)
  /// and all components are finite.
  void Validate() const;

 private:
  Eigen::Quaterniond rotation_ = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// (a o b)(x) = a(b(x)).
Pose Compose(const Pose& a, const Pose& b);

/// Upright box: yaw about +z only.
struct OrientedBox {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double length = 0.0;  // along the heading
  double width = 0.0;
  double height = 0.0;
  double yaw = 0.0;

  /// Throws ValidationError for non-positive or non-finite dimensions.
  void Validate() const;
  /// Counter-clockwise BEV corners.
  std::array<Eigen::Vector2d, 4> BevCorners() const;
  /// Coordinates of a world point in the box frame (origin at the center,
  /// x along the length).
  Eigen::Vector3d ToLocal(const Eigen::Vector3d& world) const;
  bool Contains(const Eigen::Vector3d& world, double tolerance = 1e-9) const;
};

/// Box dimensions in the GT box frame.
struct BoxDims {
  double height = 0.0;
  double width = 0.0;
  double length = 0.0;
};

PointCloudFrame TransformPoints(const Pose& pose, const PointCloudFrame& frame);

/// Area of a simple polygon (shoelace, signed counter-clockwise positive).
double PolygonArea(std::span<const Eigen::Vector2d> polygon);

/// Intersection of two convex counter-clockwise polygons
/// (Sutherland-Hodgman).
std::vector<Eigen::Vector2d> ClipConvexPolygon(
    std::span<const Eigen::Vector2d> subject,
    std::span<const Eigen::Vector2d> clip);

/// Bird's-eye-view intersection over union of two yaw-rotated rectangles.
/// Throws ValidationError when either box has zero area.
double BevIou(const OrientedBox& a, const OrientedBox& b);

/// Closed-box membership in the box's own frame.
std::vector<Point> PointsInBox(const PointCloudFrame& frame,
                               const OrientedBox& box);
std::size_t CountPointsInBox(std::span<const Point> points,
                             const OrientedBox& box);

/// Extents of `points` along the GT box axes, each clamped to the GT
/// dimension. Fewer than two points give zero extents.
BoxDims MinBoxDims(std::span<const Point> points, const OrientedBox& gt);

/// Uniform x-y bucket grid over a point set, used to restrict box and
/// radius queries to nearby points.
class PointGrid2d {
 public:
  PointGrid2d(std::span<const Point> points, double cell);

  /// Indices of points whose bucket overlaps the axis-aligned rectangle.
  /// Callers still have to test exact membership.
  void Candidates(double min_x, double min_y, double max_x, double max_y,
                  std::vector<std::size_t>* out) const;

 private:
  std::int64_t Key(std::int64_t ix, std::int64_t iy) const;
  double cell_;
  double min_x_ = 0.0;
  double min_y_ = 0.0;
  std::int64_t nx_ = 0;
  std::int64_t ny_ = 0;
  std::vector<std::uint32_t> bucket_start_;
  std::vector<std::uint32_t> indices_;
};

}  // namespace infralidar

#endif  // INFRALIDAR_GEOMETRY_H_
