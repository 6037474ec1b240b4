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
/// \brief Kalman-filter multi-object tracker with Hungarian association and
/// a birth/death lifecycle.
///
/// State: [x, y, z, yaw, l, w, h, vx, vy, vz]; measurement: the first seven.

#ifndef INFRALIDAR_TRACKER_H_
#define INFRALIDAR_TRACKER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "infralidar/detector.h"
#include "infralidar/geometry.h"

namespace infralidar {

using TrackVector = Eigen::Matrix<double, 10, 1>;
using TrackMatrix = Eigen::Matrix<double, 10, 10>;
using MeasVector = Eigen::Matrix<double, 7, 1>;

enum class MatchMetric { kCentroidDistance, kBevIou };

struct TrackerParams {
  int min_hits = 3;
  int max_age = 2;
  MatchMetric metric = MatchMetric::kCentroidDistance;
  /// Maximum x-y center distance for kCentroidDistance.
  double distance_gate = 2.0;
  /// Minimum bev IoU for kBevIou.
  double iou_threshold = 0.1;
  double rate = 20.0;
  /// Process noise densities per second (Q = diag(q) * dt).
  TrackVector process_noise =
      (TrackVector() << 0.2, 0.2, 0.2, 0.5, 0.05, 0.05, 0.05, 1.0, 1.0, 0.2)
          .finished();
  MeasVector measurement_noise =
      (MeasVector() << 0.04, 0.04, 0.04, 0.1, 0.2, 0.2, 0.1).finished();
  TrackVector initial_covariance =
      (TrackVector() << 0.1, 0.1, 0.1, 0.2, 0.5, 0.5, 0.5, 100.0, 100.0, 1.0)
          .finished();

  void Validate() const;
};

struct TrackState {
  std::uint32_t id = 0;
  ObjectClass object_class = ObjectClass::kCar;
  TrackVector x = TrackVector::Zero();
  TrackMatrix p = TrackMatrix::Identity();
  int hits = 0;
  int age = 0;
  int time_since_update = 0;
  /// Points of the last matched detection.
  std::uint32_t num_points = 0;
  /// Times the covariance had to be repaired to stay positive definite.
  int pd_repairs = 0;

  OrientedBox Box() const;
};

/// Constant-velocity propagation, P = F P F^T + Q.
void Predict(TrackState& track, double dt, const TrackerParams& params);

/// Kalman update (Joseph form) with the detection box. The detection yaw is
/// flipped by pi when it disagrees with the state by more than pi/2.
void Update(TrackState& track, const Detection& det,
            const TrackerParams& params);

struct AssociationResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track, det)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_dets;
};

/// Hungarian assignment on center distance or negative IoU. Class
/// mismatches and pairs outside the gate are never matched.
AssociationResult Associate(std::span<const TrackState> tracks,
                            std::span<const Detection> dets,
                            const TrackerParams& params);

/// One reported track in one frame.
struct TrackRecord {
  std::int64_t frame_index = 0;
  std::uint32_t track_id = 0;
  ObjectClass object_class = ObjectClass::kCar;
  OrientedBox box;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  std::uint32_t num_points = 0;
};

class Tracker {
 public:
  explicit Tracker(TrackerParams params);

  /// Predict, associate, update, spawn, prune. Returns the tracks updated
  /// in this frame with hits >= min_hits (all of them during the first
  /// min_hits frames). Frames must arrive in increasing order.
  std::vector<TrackRecord> Step(std::int64_t frame_index,
                                std::span<const Detection> dets);

  const std::vector<TrackState>& tracks() const { return tracks_; }
  int pd_repairs() const { return pd_repairs_; }

 private:
  TrackerParams params_;
  std::vector<TrackState> tracks_;
  std::optional<std::int64_t> last_frame_;
  std::int64_t frame_count_ = 0;
  std::uint32_t next_id_ = 1;
  int pd_repairs_ = 0;
};

/// Runs a tracker over per-frame detections (grouped by frame_index,
/// ascending). Frames without detections in the range still step.
std::vector<TrackRecord> RunTracker(std::span<const Detection> dets,
                                    std::int64_t first_frame,
                                    std::int64_t last_frame,
                                    const TrackerParams& params);

inline constexpr std::string_view kTracksCsvHeader =
    "frame,track_id,class,cx,cy,cz,l,w,h,yaw,vx,vy,vz";
inline constexpr std::string_view kTrackPointsCsvHeader =
    "frame,track_id,points";
void WriteTracksCsv(const std::filesystem::path& path,
                    std::span<const TrackRecord> records);
/// Sidecar with the per-frame point support of each track.
void WriteTrackPointsCsv(const std::filesystem::path& path,
                         std::span<const TrackRecord> records);
/// Reads tracks and, when `points_path` is given, the point sidecar.
std::vector<TrackRecord> ReadTracksCsv(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& points_path = std::nullopt);

}  // namespace infralidar

#endif  // INFRALIDAR_TRACKER_H_
