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

#include "infralidar/preprocess.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infralidar/random.h"

namespace infralidar {

void RoiSpec::Validate() const {
  if (!(x_max > x_min) || !(y_max > y_min) || !(z_max > z_min)) {
    throw ValidationError("ROI ranges must be non-degenerate");
  }
  if (!(ground_band >= 0.0)) throw ValidationError("ground_band must be >= 0");
  if (!(ground_keep_fraction >= 0.0 && ground_keep_fraction <= 1.0)) {
    throw ValidationError("ground_keep_fraction must lie in [0, 1]");
  }
}

PointCloudFrame Fuse(std::span<const SensorFrame> frames, double tolerance) {
  PointCloudFrame out;
  if (frames.empty()) return out;
  const PointCloudFrame& first = *frames.front().frame;
  out.frame_index = first.frame_index;
  out.timestamp = first.timestamp;
  out.intensity_normalized = first.intensity_normalized;
  std::size_t total = 0;
  for (const SensorFrame& f : frames) total += f.frame->size();
  out.points.reserve(total);
  out.origins.reserve(total);
  for (const SensorFrame& f : frames) {
    const PointCloudFrame& src = *f.frame;
    if (std::abs(src.timestamp - first.timestamp) > tolerance) {
      std::ostringstream msg;
      msg << "fuse: sensor " << src.sensor_id << " timestamp "
          << src.timestamp << " differs from " << first.timestamp
          << " by more than " << tolerance << " s";
      throw ValidationError(msg.str());
    }
    f.pose.Validate();
    ValidateFrame(src);
    const Eigen::Matrix3d r = f.pose.RotationMatrix();
    const Eigen::Vector3d& t = f.pose.translation();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const Point& p = src.points[i];
      const Eigen::Vector3d w = r * p.xyz() + t;
      out.points.push_back({w.x(), w.y(), w.z(), p.intensity});
      out.origins.push_back(src.origin(i));
    }
  }
  return out;
}

PointCloudFrame CropRoi(const PointCloudFrame& frame, const RoiSpec& roi) {
  roi.Validate();
  return frame.Filtered([&](const Point& p, std::size_t) {
    return roi.ContainsXy(p.x, p.y) && p.z >= roi.z_min && p.z <= roi.z_max;
  });
}

PointCloudFrame DownsampleGround(const PointCloudFrame& frame,
                                 const RoiSpec& roi, std::uint64_t seed) {
  roi.Validate();
  if (roi.ground_keep_fraction >= 1.0) return frame;
  const KeyedRng rng(seed);
  const auto frame_key = static_cast<std::uint64_t>(frame.frame_index);
  return frame.Filtered([&](const Point& p, std::size_t i) {
    if (std::abs(p.z) > roi.ground_band) return true;
    const PointOrigin o = frame.origin(i);
    return rng.Uniform(StreamKey(kGroundSampleStream, o.sensor_id, frame_key),
                       o.ordinal) < roi.ground_keep_fraction;
  });
}

PointCloudFrame FilterAndNormalizeIntensity(const PointCloudFrame& frame,
                                            double dataset_max) {
  if (frame.intensity_normalized) return frame;
  for (const Point& p : frame.points) {
    if (!(p.intensity >= 0.0)) {
      throw ValidationError("negative or NaN intensity in frame " +
                            std::to_string(frame.frame_index));
    }
  }
  PointCloudFrame out =
      frame.Filtered([](const Point& p, std::size_t) { return p.intensity > 0.0; });
  if (!out.points.empty() && !(dataset_max > 0.0)) {
    throw ValidationError("dataset intensity max must be > 0");
  }
  for (Point& p : out.points) {
    p.intensity = std::min(1.0, p.intensity / dataset_max);
  }
  out.intensity_normalized = true;
  return out;
}

double ComputeIntensityMax(std::span<const PointCloudFrame> frames) {
  double m = 0.0;
  for (const PointCloudFrame& f : frames) {
    for (const Point& p : f.points) m = std::max(m, p.intensity);
  }
  return m;
}

PointCloudFrame RadiusOutlierFilter(const PointCloudFrame& frame,
                                    double radius, int min_neighbors) {
  if (!(radius > 0.0)) throw ValidationError("outlier radius must be > 0");
  if (frame.points.empty()) return frame;
  const PointGrid2d grid(frame.points, radius);
  const double r2 = radius * radius;
  std::vector<std::size_t> cand;
  return frame.Filtered([&](const Point& p, std::size_t i) {
    grid.Candidates(p.x - radius, p.y - radius, p.x + radius, p.y + radius,
                    &cand);
    int n = 0;
    for (std::size_t j : cand) {
      if (j == i) continue;
      const Point& q = frame.points[j];
      const double dx = q.x - p.x, dy = q.y - p.y, dz = q.z - p.z;
      if (dx * dx + dy * dy + dz * dz <= r2 && ++n >= min_neighbors) {
        return true;
      }
    }
    return n >= min_neighbors;
  });
}

PointCloudFrame Preprocess(const PointCloudFrame& world_frame,
                           const PreprocessSpec& spec) {
  PointCloudFrame f = CropRoi(world_frame, spec.roi);
  f = DownsampleGround(f, spec.roi, spec.seed);
  f = FilterAndNormalizeIntensity(f, spec.intensity_max);
  if (spec.outlier_filter) {
    f = RadiusOutlierFilter(f, spec.outlier_radius, spec.outlier_min_neighbors);
  }
  return f;
}

}  // namespace infralidar
