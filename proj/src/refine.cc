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

#include "infralidar/refine.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/LU>

#include "infralidar/csv.h"

namespace infralidar {
namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;

Matrix3d Transition(double dt) {
  Matrix3d f;
  f << 1.0, dt, 0.5 * dt * dt, 0.0, 1.0, dt, 0.0, 0.0, 1.0;
  return f;
}

Matrix3d JerkNoise(double dt, double q) {
  const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
  Matrix3d m;
  m << d5 / 20.0, d4 / 8.0, d3 / 6.0, d4 / 8.0, d3 / 3.0, d2 / 2.0, d3 / 6.0,
      d2 / 2.0, dt;
  return q * m;
}

}  // namespace

double Trajectory::Length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    len += (frames[i].position.head<2>() - frames[i - 1].position.head<2>())
               .norm();
  }
  return len;
}

std::vector<Trajectory> BuildTrajectories(std::span<const TrackRecord> records,
                                          double rate) {
  if (!(rate > 0.0)) throw ValidationError("rate must be > 0");
  std::map<std::uint32_t, Trajectory> by_id;
  for (const TrackRecord& r : records) {
    Trajectory& t = by_id[r.track_id];
    if (t.frames.empty()) {
      t.track_id = r.track_id;
      t.object_class = r.object_class;
    }
    TrajectoryFrame f;
    f.frame_index = r.frame_index;
    f.t = static_cast<double>(r.frame_index) / rate;
    f.position = r.box.center;
    f.velocity = r.velocity;
    f.yaw = r.box.yaw;
    f.dims = {r.box.length, r.box.width, r.box.height};
    f.points_in_box = r.num_points;
    t.frames.push_back(f);
  }
  std::vector<Trajectory> out;
  for (auto& [id, t] : by_id) {
    std::stable_sort(t.frames.begin(), t.frames.end(),
                     [](const TrajectoryFrame& a, const TrajectoryFrame& b) {
                       return a.frame_index < b.frame_index;
                     });
    for (std::size_t i = 1; i < t.frames.size(); ++i) {
      if (t.frames[i].frame_index == t.frames[i - 1].frame_index) {
        throw ValidationError("track " + std::to_string(id) +
                              " has two records in frame " +
                              std::to_string(t.frames[i].frame_index));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

AxisSmoothing SmoothAxis(std::span<const double> t, std::span<const double> z,
                         double jerk_density, double measurement_sigma) {
  const std::size_t n = t.size();
  if (n < 2 || z.size() != n) {
    throw ValidationError("SmoothAxis needs >= 2 aligned samples");
  }
  if (!(measurement_sigma > 0.0) || !(jerk_density >= 0.0)) {
    throw ValidationError("smoother noise parameters must be positive");
  }
  const double r = measurement_sigma * measurement_sigma;
  AxisSmoothing out;
  out.filtered.resize(n);
  out.filtered_cov.resize(n);
  std::vector<Vector3d> predicted(n);
  std::vector<Matrix3d> predicted_cov(n);

  const double dt0 = t[1] - t[0];
  if (!(dt0 > 0.0)) throw ValidationError("smoother times must increase");
  Vector3d x(z[0], (z[1] - z[0]) / dt0, 0.0);
  Matrix3d p = Matrix3d::Zero();
  p(0, 0) = r;
  p(1, 1) = 2.0 * r / (dt0 * dt0);
  p(2, 2) = 100.0;
  const Eigen::RowVector3d h(1.0, 0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double dt = t[k] - t[k - 1];
      if (!(dt > 0.0)) throw ValidationError("smoother times must increase");
      const Matrix3d f = Transition(dt);
      x = f * x;
      p = f * p * f.transpose() + JerkNoise(dt, jerk_density);
    }
    predicted[k] = x;
    predicted_cov[k] = p;
    const double s = p(0, 0) + r;
    const Vector3d gain = p.col(0) / s;
    x += gain * (z[k] - x(0));
    const Matrix3d ikh = Matrix3d::Identity() - gain * h;
    p = ikh * p * ikh.transpose() + r * gain * gain.transpose();
    p = 0.5 * (p + p.transpose()).eval();
    out.filtered[k] = x;
    out.filtered_cov[k] = p;
  }

  out.smoothed = out.filtered;
  out.smoothed_cov = out.filtered_cov;
  for (std::size_t k = n - 1; k-- > 0;) {
    const Matrix3d f = Transition(t[k + 1] - t[k]);
    const Matrix3d c =
        out.filtered_cov[k] * f.transpose() * predicted_cov[k + 1].inverse();
    out.smoothed[k] =
        out.filtered[k] + c * (out.smoothed[k + 1] - predicted[k + 1]);
    out.smoothed_cov[k] =
        out.filtered_cov[k] +
        c * (out.smoothed_cov[k + 1] - predicted_cov[k + 1]) * c.transpose();
    out.smoothed_cov[k] =
        0.5 * (out.smoothed_cov[k] + out.smoothed_cov[k].transpose()).eval();
  }
  return out;
}

Trajectory Smooth(const Trajectory& traj, const SmootherParams& params) {
  Trajectory out = traj;
  const std::size_t n = traj.frames.size();
  if (n < 2) return out;
  const double q =
      IsVehicle(traj.object_class) ? params.vehicle_jerk : params.vru_jerk;
  std::vector<double> t(n), z(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = traj.frames[i].t;
  for (int axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < n; ++i) z[i] = traj.frames[i].position(axis);
    const AxisSmoothing s = SmoothAxis(t, z, q, params.measurement_sigma);
    for (std::size_t i = 0; i < n; ++i) {
      out.frames[i].position(axis) = s.smoothed[i](0);
      out.frames[i].velocity(axis) = s.smoothed[i](1);
      out.frames[i].acceleration(axis) = s.smoothed[i](2);
    }
  }
  return out;
}

Eigen::Vector3d FixDimensions(const Trajectory& traj) {
  if (traj.frames.empty()) throw ValidationError("empty trajectory");
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.frames.size(); ++i) {
    if (traj.frames[i].points_in_box > traj.frames[best].points_in_box) {
      best = i;
    }
  }
  return traj.frames[best].dims;
}

std::vector<double> TriangularWeights(int window, std::size_t i,
                                      std::size_t n) {
  if (window < 1 || window % 2 == 0) {
    throw ValidationError("heading window must be odd and >= 1");
  }
  const int half = (window - 1) / 2;
  std::vector<double> w;
  double total = 0.0;
  for (int k = -half; k <= half; ++k) {
    const auto j = static_cast<std::int64_t>(i) + k;
    const double weight =
        (j < 0 || j >= static_cast<std::int64_t>(n)) ? 0.0
                                                     : half + 1 - std::abs(k);
    w.push_back(weight);
    total += weight;
  }
  for (double& x : w) x /= total;
  return w;
}

Trajectory SmoothHeading(const Trajectory& traj, int window,
                         double min_speed) {
  if (window < 1 || window % 2 == 0) {
    throw ValidationError("heading window must be odd and >= 1");
  }
  Trajectory out = traj;
  const std::size_t n = out.frames.size();
  if (n == 0) return out;
  const double pi = std::numbers::pi;
  std::vector<double> yaw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectoryFrame& f = out.frames[i];
    double y = f.yaw;
    const double speed = f.velocity.head<2>().norm();
    if (speed > min_speed) {
      const double heading = std::atan2(f.velocity.y(), f.velocity.x());
      if (std::abs(WrapAngle(y - heading)) > pi / 2) y += pi;
    } else if (i > 0 && std::abs(WrapAngle(y - yaw[i - 1])) > pi / 2) {
      y += pi;
    }
    yaw[i] = WrapAngle(y);
  }
  // Unwrap.
  for (std::size_t i = 1; i < n; ++i) {
    yaw[i] = yaw[i - 1] + WrapAngle(yaw[i] - yaw[i - 1]);
  }
  const int half = (window - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> w = TriangularWeights(window, i, n);
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) {
      const auto j = static_cast<std::int64_t>(i) + k;
      if (j < 0 || j >= static_cast<std::int64_t>(n)) continue;
      acc += w[static_cast<std::size_t>(k + half)] *
             yaw[static_cast<std::size_t>(j)];
    }
    out.frames[i].yaw = WrapAngle(acc);
  }
  return out;
}

std::vector<Trajectory> Refine(std::span<const TrackRecord> records,
                               double rate, const RefineParams& params) {
  std::vector<Trajectory> out;
  for (const Trajectory& raw : BuildTrajectories(records, rate)) {
    Trajectory t = Smooth(raw, params.smoother);
    const Eigen::Vector3d dims = FixDimensions(t);
    for (TrajectoryFrame& f : t.frames) f.dims = dims;
    t = SmoothHeading(t, params.heading_window, params.heading_min_speed);
    if (params.select &&
        (t.Length() <= params.min_length || t.n_frames() <= params.min_frames)) {
      continue;
    }
    out.push_back(std::move(t));
  }
  return out;
}

void WriteRefinedCsv(const std::filesystem::path& path,
                     std::span<const Trajectory> trajs) {
  CsvWriter w(kRefinedCsvHeader);
  for (const Trajectory& t : trajs) {
    for (const TrajectoryFrame& f : t.frames) {
      w.Field(f.frame_index)
          .Field(t.track_id)
          .Field(ToString(t.object_class))
          .Field(f.position.x())
          .Field(f.position.y())
          .Field(f.position.z())
          .Field(f.dims.x())
          .Field(f.dims.y())
          .Field(f.dims.z())
          .Field(f.yaw)
          .Field(f.velocity.x())
          .Field(f.velocity.y())
          .Field(f.velocity.z())
          .Field(f.acceleration.x())
          .Field(f.acceleration.y())
          .Field(f.acceleration.z());
      w.EndRow();
    }
  }
  w.Save(path);
}

void WriteRefinedDimsCsv(const std::filesystem::path& path,
                         std::span<const Trajectory> trajs) {
  CsvWriter w(kRefinedDimsCsvHeader);
  for (const Trajectory& t : trajs) {
    const Eigen::Vector3d d =
        t.frames.empty() ? Eigen::Vector3d::Zero() : t.frames.front().dims;
    w.Field(t.track_id)
        .Field(ToString(t.object_class))
        .Field(d.x())
        .Field(d.y())
        .Field(d.z())
        .Field(static_cast<std::int64_t>(t.n_frames()))
        .Field(t.Length());
    w.EndRow();
  }
  w.Save(path);
}

std::vector<Trajectory> ReadRefinedCsv(const std::filesystem::path& path,
                                       double rate) {
  CsvReader r(path, kRefinedCsvHeader);
  std::map<std::uint32_t, Trajectory> by_id;
  std::vector<std::uint32_t> order;
  while (r.Next()) {
    r.ExpectFields(16);
    const auto id = static_cast<std::uint32_t>(r.Int(1));
    const auto cls = ParseObjectClass(r.Text(2));
    if (!cls) r.Fail("unknown class '" + std::string(r.Text(2)) + "'");
    auto [it, inserted] = by_id.try_emplace(id);
    if (inserted) {
      it->second.track_id = id;
      it->second.object_class = *cls;
      order.push_back(id);
    }
    TrajectoryFrame f;
    f.frame_index = r.Int(0);
    f.t = static_cast<double>(f.frame_index) / rate;
    f.position = {r.Double(3), r.Double(4), r.Double(5)};
    f.dims = {r.Double(6), r.Double(7), r.Double(8)};
    f.yaw = r.Double(9);
    f.velocity = {r.Double(10), r.Double(11), r.Double(12)};
    f.acceleration = {r.Double(13), r.Double(14), r.Double(15)};
    auto& frames = it->second.frames;
    if (!frames.empty() && f.frame_index <= frames.back().frame_index) {
      r.Fail("frames of track " + std::to_string(id) + " not increasing");
    }
    frames.push_back(f);
  }
  std::vector<Trajectory> out;
  for (std::uint32_t id : order) out.push_back(std::move(by_id[id]));
  return out;
}

}  // namespace infralidar
