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
/// \brief Geometric object detector: density clustering, minimum-area box
/// fitting, dimension-gate classification and duplicate suppression.

#ifndef INFRALIDAR_DETECTOR_H_
#define INFRALIDAR_DETECTOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "infralidar/geometry.h"
#include "infralidar/preprocess.h"

namespace infralidar {

struct Detection {
  std::int64_t frame_index = 0;
  ObjectClass object_class = ObjectClass::kCar;
  double score = 0.0;
  OrientedBox box;
  /// Cluster size; not serialized.
  std::uint32_t num_points = 0;
};

/// Closed (l, w, h) intervals accepted for one class.
struct ClassGate {
  ObjectClass object_class = ObjectClass::kCar;
  double l_min = 0.0, l_max = 0.0;
  double w_min = 0.0, w_max = 0.0;
  double h_min = 0.0, h_max = 0.0;

  bool Accepts(const OrientedBox& box) const;
  /// Smallest normalized distance of any dimension to its nearest gate
  /// edge: 0 on the edge, 1 at the interval midpoint.
  double Margin(const OrientedBox& box) const;
};

/// Gates in precedence order: truck, car, motorcycle, bicycle, pedestrian.
std::vector<ClassGate> DefaultGates();

struct DetectorParams {
  double cluster_radius = 0.7;
  int min_cluster_points = 5;
  /// Neighbors (self included) within cluster_radius that make a core point.
  int core_min_points = 2;
  double duplicate_iou = 0.1;
  /// Local ground estimate: per-cell z percentile, minimum over the 3x3
  /// neighborhood. Points below ground + clearance are not clustered.
  bool estimate_ground = true;
  double ground_cell = 2.0;
  double ground_percentile = 0.1;
  double ground_clearance = 0.4;
  /// Points scale the score as 1 - exp(-n / score_points).
  double score_points = 20.0;
  /// Quantile trimmed from each end of the box extents (see FitBox).
  double extent_trim = 0.05;
  std::vector<ClassGate> gates = DefaultGates();

  void Validate() const;
};

/// Density-based clustering over x-y-z. Returns point index sets sorted by
/// their smallest index; each point belongs to at most one cluster.
std::vector<std::vector<std::size_t>> Cluster(std::span<const Point> points,
                                              const DetectorParams& params);

/// Minimum-area rotated rectangle over the x-y convex hull plus the z
/// extent. l >= w, yaw in (-pi/2, pi/2] along l; degenerate extents are
/// clamped to kMinBoxExtent. With `trim` > 0 and at least 20 points, the
/// extents along the fitted axes and z run between the `trim` and
/// 1 - `trim` quantiles instead of the extremes; the x-y center uses the
/// same construction with min(trim, 0.01).
inline constexpr double kMinBoxExtent = 0.05;
OrientedBox FitBox(std::span<const Point> cluster, double trim = 0.0);

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
std::vector<Eigen::Vector2d> ConvexHull(std::vector<Eigen::Vector2d> points);

/// First gate (in params.gates order) accepting the box, with a score in
/// [0, 1] increasing in gate margin and point count.
std::optional<std::pair<ObjectClass, double>> Classify(
    const OrientedBox& box, std::size_t n_points, const DetectorParams& params);

/// Ground height lookup built from one frame.
class GroundEstimate {
 public:
  GroundEstimate(std::span<const Point> points, double cell,
                 double percentile);
  /// Estimated ground z at (x, y); 0 outside the covered area.
  double Height(double x, double y) const;

 private:
  double cell_;
  double min_x_ = 0.0, min_y_ = 0.0;
  std::int64_t nx_ = 0, ny_ = 0;
  std::vector<double> height_;
};

/// Clusters, fits and classifies one preprocessed world-frame cloud.
/// Unfiltered: call FilterDetections afterwards.
std::vector<Detection> Detect(const PointCloudFrame& frame,
                              const DetectorParams& params);

/// Drops detections whose center lies outside the ROI (x-y), then keeps
/// detections greedily by descending score, suppressing any with
/// bev IoU > duplicate_iou against an already kept one.
std::vector<Detection> FilterDetections(std::span<const Detection> dets,
                                        const RoiSpec& roi,
                                        const DetectorParams& params);

inline constexpr std::string_view kDetectionsCsvHeader =
    "frame,class,score,cx,cy,cz,l,w,h,yaw";
void WriteDetectionsCsv(const std::filesystem::path& path,
                        std::span<const Detection> dets);
std::vector<Detection> ReadDetectionsCsv(const std::filesystem::path& path);

}  // namespace infralidar

#endif  // INFRALIDAR_DETECTOR_H_
