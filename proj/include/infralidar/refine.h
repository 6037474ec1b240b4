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
/// \brief Trajectory refinement: fixed-interval (RTS) smoothing with a
/// constant-acceleration model, fixed box dimensions and heading smoothing.

#ifndef INFRALIDAR_REFINE_H_
#define INFRALIDAR_REFINE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "infralidar/geometry.h"
#include "infralidar/tracker.h"

namespace infralidar {

struct TrajectoryFrame {
  std::int64_t frame_index = 0;
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  Eigen::Vector3d dims = Eigen::Vector3d::Ones();  // (l, w, h)
  std::uint32_t points_in_box = 0;
};

struct Trajectory {
  std::uint32_t track_id = 0;
  ObjectClass object_class = ObjectClass::kCar;
  std::vector<TrajectoryFrame> frames;

  std::size_t n_frames() const { return frames.size(); }
  /// Arc length of the x-y polyline through the frame positions.
  double Length() const;
};

/// Groups track records by id, frames in ascending order; t = frame / rate.
std::vector<Trajectory> BuildTrajectories(std::span<const TrackRecord> records,
                                          double rate);

/// Per-axis constant-acceleration model driven by white jerk.
struct SmootherParams {
  /// Jerk spectral density (m^2/s^5) for vehicles and VRU.
  double vehicle_jerk = 4.0;
  double vru_jerk = 2.0;
  /// Position measurement standard deviation (m).
  double measurement_sigma = 0.2;
};

/// Filtered and smoothed [p, v, a] states of one axis.
struct AxisSmoothing {
  std::vector<Eigen::Vector3d> filtered;
  std::vector<Eigen::Matrix3d> filtered_cov;
  std::vector<Eigen::Vector3d> smoothed;
  std::vector<Eigen::Matrix3d> smoothed_cov;
};

/// Forward Kalman pass plus backward RTS pass over position measurements z
/// at strictly increasing times t (at least two samples). The initial
/// velocity comes from the first two samples, so noise-free linear motion
/// is reproduced exactly.
AxisSmoothing SmoothAxis(std::span<const double> t, std::span<const double> z,
                         double jerk_density, double measurement_sigma);

/// Smoothed position, velocity and acceleration on every axis. Trajectories
/// with fewer than two frames are returned unchanged.
Trajectory Smooth(const Trajectory& traj, const SmootherParams& params);

/// Dims of the frame with the most points in the box (earliest on ties).
Eigen::Vector3d FixDimensions(const Trajectory& traj);

/// Triangular-kernel smoothing of yaw over `window` (odd) frames on
/// unwrapped angles. Before smoothing, yaw is flipped by pi where it
/// opposes the velocity at speeds above `min_speed`, and elsewhere kept
/// within pi/2 of the previous frame.
Trajectory SmoothHeading(const Trajectory& traj, int window,
                         double min_speed = 0.5);

/// Normalized triangular weights for output index i of a length-n series.
std::vector<double> TriangularWeights(int window, std::size_t i,
                                      std::size_t n);

struct RefineParams {
  SmootherParams smoother;
  int heading_window = 7;
  double heading_min_speed = 0.5;
  /// Drop trajectories with length <= min_length or frames <= min_frames.
  bool select = false;
  double min_length = 10.0;
  std::size_t min_frames = 50;
};

std::vector<Trajectory> Refine(std::span<const TrackRecord> records,
                               double rate, const RefineParams& params);

inline constexpr std::string_view kRefinedCsvHeader =
    "frame,track_id,class,cx,cy,cz,l,w,h,yaw,vx,vy,vz,ax,ay,az";
inline constexpr std::string_view kRefinedDimsCsvHeader =
    "track_id,class,l,w,h,n_frames,length";
void WriteRefinedCsv(const std::filesystem::path& path,
                     std::span<const Trajectory> trajs);
void WriteRefinedDimsCsv(const std::filesystem::path& path,
                         std::span<const Trajectory> trajs);
std::vector<Trajectory> ReadRefinedCsv(const std::filesystem::path& path,
                                       double rate);

}  // namespace infralidar

#endif  // INFRALIDAR_REFINE_H_
