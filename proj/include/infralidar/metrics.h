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
/// \brief Evaluation: heat maps, coverage ratios, average precision,
/// CLEAR-MOT, trajectory deviations and the synchronization error bound.

#ifndef INFRALIDAR_METRICS_H_
#define INFRALIDAR_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "infralidar/detector.h"
#include "infralidar/geometry.h"
#include "infralidar/refine.h"
#include "infralidar/scenario.h"

namespace infralidar {

// ---------------------------------------------------------------------------
// Heat maps

/// Square grid over [min, max]^2 accumulating per-cell sums and counts.
/// A value exactly on the upper edge falls into the last cell.
class HeatMap {
 public:
  explicit HeatMap(double min = -56.0, double max = 56.0, double cell = 4.0);

  int width() const { return cells_; }
  int height() const { return cells_; }
  double min() const { return min_; }
  double cell() const { return cell_; }

  /// Cell of (x, y) or nullopt outside the grid.
  std::optional<std::pair<int, int>> CellOf(double x, double y) const;
  /// Adds a sample; returns false (and counts it) when outside.
  bool Add(double x, double y, double value);
  void Merge(const HeatMap& other);

  double Sum(int ix, int iy) const { return sum_[Index(ix, iy)]; }
  std::int64_t Count(int ix, int iy) const { return count_[Index(ix, iy)]; }
  /// Mean of the cell, 0 when empty.
  double Mean(int ix, int iy) const;
  std::int64_t outside() const { return outside_; }
  /// Center of cell (ix, iy).
  Eigen::Vector2d CellCenter(int ix, int iy) const;

  /// Rows are y cells from min upward, columns x cells, values cell means.
  std::string ToCsv() const;
  void WriteCsv(const std::filesystem::path& path) const;

 private:
  std::size_t Index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(cells_) +
           static_cast<std::size_t>(ix);
  }
  double min_;
  double cell_;
  int cells_;
  std::vector<double> sum_;
  std::vector<std::int64_t> count_;
  std::int64_t outside_ = 0;
};

/// Points inside each GT box of one frame and their extents in the box.
struct BoxObservation {
  std::size_t points = 0;
  BoxDims dims;
};
std::vector<BoxObservation> ObserveBoxes(
    const PointCloudFrame& world_frame,
    std::span<const GroundTruthRecord> frame_gt);

/// Adds the point count of every GT box at its center.
void AccumulatePointCounts(const PointCloudFrame& world_frame,
                           std::span<const GroundTruthRecord> frame_gt,
                           HeatMap& map);

struct CoverageMaps {
  HeatMap width, length, height;
  CoverageMaps(double min = -56.0, double max = 56.0, double cell = 4.0)
      : width(min, max, cell), length(min, max, cell), height(min, max, cell) {}
  void Merge(const CoverageMaps& other);
};

/// Adds (w_m / w, l_m / l, h_m / h) of every GT box at its center.
void AccumulateCoverage(const PointCloudFrame& world_frame,
                        std::span<const GroundTruthRecord> frame_gt,
                        CoverageMaps& maps);

// ---------------------------------------------------------------------------
// Average precision

struct ApOptions {
  double vehicle_iou = 0.5;
  double vru_iou = 0.25;
  /// 41 (default) or 11 interpolation points.
  int recall_points = 41;

  double Threshold(ObjectClass c) const {
    return IsVehicle(c) ? vehicle_iou : vru_iou;
  }
};

/// AP of one class; detections and GT must already be filtered to it.
/// Returns nullopt when `gt` is empty.
std::optional<double> AveragePrecision(std::span<const Detection> dets,
                                       std::span<const GroundTruthRecord> gt,
                                       double iou_threshold,
                                       int recall_points = 41);

/// AP for every class; classes absent from the GT map to nullopt.
std::map<ObjectClass, std::optional<double>> AveragePrecisionByClass(
    std::span<const Detection> dets, std::span<const GroundTruthRecord> gt,
    const ApOptions& options);

// ---------------------------------------------------------------------------
// CLEAR-MOT

/// One tracker hypothesis in one frame.
struct MotHypothesis {
  std::int64_t frame_index = 0;
  std::uint32_t id = 0;
  ObjectClass object_class = ObjectClass::kCar;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
};

std::vector<MotHypothesis> HypothesesFrom(std::span<const Trajectory> trajs);
std::vector<MotHypothesis> HypothesesFrom(std::span<const TrackRecord> tracks);

struct ClearMotOptions {
  double vehicle_gate = 2.0;
  double vru_gate = 1.0;
  double Gate(ObjectClass c) const {
    return IsVehicle(c) ? vehicle_gate : vru_gate;
  }
};

struct ClearMotResult {
  double mota = 0.0;
  /// 1 - mean(d / gate); nullopt without matches.
  std::optional<double> motp;
  /// Mean matched center distance in meters.
  std::optional<double> motp_distance;
  std::int64_t gt = 0;
  std::int64_t matches = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
};

/// Solves one frame's assignment; entries of +inf are forbidden. Must
/// maximize the number of pairs first, then minimize the total distance.
using FrameMatcher = std::function<std::vector<int>(const Eigen::MatrixXd&)>;

/// Standard CLEAR-MOT: correspondences from the previous frame are kept
/// while within the gate, the rest are matched by `matcher` on x-y center
/// distance (gate chosen by the GT class). Throws ValidationError on empty
/// GT.
ClearMotResult ClearMot(std::span<const MotHypothesis> hyps,
                        std::span<const GroundTruthRecord> gt,
                        const ClearMotOptions& options,
                        const FrameMatcher& matcher = {});

// ---------------------------------------------------------------------------
// Trajectory deviations

struct DeviationOptions {
  /// Estimated trajectories enter only if length > min_length and
  /// n_frames > min_frames.
  double min_length = 10.0;
  std::size_t min_frames = 50;
  /// Upper bound on the mean x-y distance to the matched GT trajectory.
  double max_mean_distance = 2.0;
};

struct DeviationGroup {
  std::optional<double> position;
  std::optional<double> velocity;
  std::optional<double> acceleration;
  std::size_t trajectories = 0;
  std::size_t frames = 0;
};

struct DeviationReport {
  DeviationGroup all, vehicle, vru;
  std::size_t selected = 0;   // passed the length/frame rule
  std::size_t unmatched = 0;  // selected but without a GT partner
};

/// Frame-weighted mean absolute deviation: sum over trajectories and frames
/// of the x-y deviation, divided by the total number of compared frames.
/// Groups follow the class of the matched GT actor.
DeviationReport MaeDeviation(std::span<const Trajectory> est,
                             std::span<const GroundTruthRecord> gt,
                             const DeviationOptions& options);

/// Maximal position error of unsynchronized sensors, v_max * dt.
double SyncError(double v_max, double dt);

inline constexpr double KmhToMs(double kmh) { return kmh / 3.6; }

// ---------------------------------------------------------------------------
// Reports

struct EvalOptions {
  ApOptions ap;
  ClearMotOptions mot;
  DeviationOptions deviation;
};

struct EvalReport {
  std::map<ObjectClass, std::optional<double>> ap;
  ClearMotResult mot;
  std::map<ObjectClass, ClearMotResult> mot_by_class;
  DeviationReport deviation;
  DeviationOptions selection;
};

/// `dets` feed AP, `trajs` feed CLEAR-MOT and the deviations.
EvalReport Evaluate(std::span<const Detection> dets,
                    std::span<const Trajectory> trajs,
                    std::span<const GroundTruthRecord> gt,
                    const EvalOptions& options);

nlohmann::json ToJson(const EvalReport& report);
nlohmann::json ToJson(const ClearMotResult& mot);
nlohmann::json ToJson(const DeviationGroup& group);

/// GT records whose box center lies inside [min, max]^2.
std::vector<GroundTruthRecord> RestrictGt(std::span<const GroundTruthRecord> gt,
                                          double min, double max);

}  // namespace infralidar

#endif  // INFRALIDAR_METRICS_H_
