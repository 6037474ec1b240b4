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

#include "infralidar/tracker.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "infralidar/assignment.h"
#include "infralidar/csv.h"

namespace infralidar {
namespace {

constexpr double kMinEigenvalue = 1e-9;
using MeasMatrix = Eigen::Matrix<double, 7, 10>;

// Returns true when the matrix needed repair.
bool RepairCovariance(TrackMatrix& p) {
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::LLT<TrackMatrix> llt(p);
  if (llt.info() == Eigen::Success &&
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() >
          std::sqrt(kMinEigenvalue)) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<TrackMatrix> eig(p);
  TrackVector d = eig.eigenvalues();
  if (d.minCoeff() >= kMinEigenvalue) return false;
  d = d.cwiseMax(kMinEigenvalue);
  p = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
  p = 0.5 * (p + p.transpose()).eval();
  return true;
}

MeasVector Measurement(const Detection& det) {
  MeasVector z;
  z << det.box.center.x(), det.box.center.y(), det.box.center.z(),
      det.box.yaw, det.box.length, det.box.width, det.box.height;
  return z;
}

}  // namespace

void TrackerParams::Validate() const {
  if (min_hits < 1) throw ValidationError("min_hits must be >= 1");
  if (max_age < 0) throw ValidationError("max_age must be >= 0");
  if (!(rate > 0.0)) throw ValidationError("tracker rate must be > 0");
  if (!(distance_gate > 0.0)) throw ValidationError("distance gate must be > 0");
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("iou threshold must lie in [0, 1]");
  }
  if ((process_noise.array() < 0.0).any() ||
      (measurement_noise.array() <= 0.0).any() ||
      (initial_covariance.array() <= 0.0).any()) {
    throw ValidationError("tracker noise diagonals must be positive");
  }
}

OrientedBox TrackState::Box() const {
  OrientedBox b;
  b.center = x.head<3>();
  b.yaw = WrapAngle(x(3));
  b.length = std::max(kMinBoxExtent, x(4));
  b.width = std::max(kMinBoxExtent, x(5));
  b.height = std::max(kMinBoxExtent, x(6));
  return b;
}

void Predict(TrackState& track, double dt, const TrackerParams& params) {
  if (!(dt > 0.0)) throw ValidationError("predict needs dt > 0");
  TrackMatrix f = TrackMatrix::Identity();
  f(0, 7) = f(1, 8) = f(2, 9) = dt;
  track.x = f * track.x;
  track.p = f * track.p * f.transpose();
  track.p.diagonal() += params.process_noise * dt;
  if (RepairCovariance(track.p)) ++track.pd_repairs;
  ++track.age;
  ++track.time_since_update;
}

void Update(TrackState& track, const Detection& det,
            const TrackerParams& params) {
  MeasMatrix h = MeasMatrix::Zero();
  h.leftCols<7>().setIdentity();
  MeasVector z = Measurement(det);
  double innovation_yaw = WrapAngle(z(3) - track.x(3));
  if (std::abs(innovation_yaw) > std::numbers::pi / 2) {
    z(3) += std::numbers::pi;
    innovation_yaw = WrapAngle(z(3) - track.x(3));
  }
  MeasVector y = z - h * track.x;
  y(3) = innovation_yaw;
  const Eigen::Matrix<double, 7, 7> r = params.measurement_noise.asDiagonal();
  const Eigen::Matrix<double, 7, 7> s = h * track.p * h.transpose() + r;
  Eigen::LLT<Eigen::Matrix<double, 7, 7>> llt(s);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("singular innovation covariance");
  }
  const Eigen::Matrix<double, 10, 7> k =
      llt.solve(h * track.p.transpose()).transpose();
  track.x += k * y;
  track.x(3) = WrapAngle(track.x(3));
  const TrackMatrix ikh = TrackMatrix::Identity() - k * h;
  track.p = ikh * track.p * ikh.transpose() + k * r * k.transpose();
  if (RepairCovariance(track.p)) ++track.pd_repairs;
  for (int i = 4; i < 7; ++i) track.x(i) = std::max(kMinBoxExtent, track.x(i));
  ++track.hits;
  track.time_since_update = 0;
  track.num_points = det.num_points;
}

AssociationResult Associate(std::span<const TrackState> tracks,
                            std::span<const Detection> dets,
                            const TrackerParams& params) {
  AssociationResult out;
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd cost(tracks.size(), dets.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const OrientedBox tb = tracks[i].Box();
    for (std::size_t j = 0; j < dets.size(); ++j) {
      double c = inf;
      if (tracks[i].object_class == dets[j].object_class) {
        if (params.metric == MatchMetric::kCentroidDistance) {
          const double d =
              (tb.center.head<2>() - dets[j].box.center.head<2>()).norm();
          if (d <= params.distance_gate) c = d;
        } else {
          const double iou = BevIou(tb, dets[j].box);
          if (iou >= params.iou_threshold && iou > 0.0) c = -iou;
        }
      }
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
    }
  }
  const std::vector<int> assignment = SolveAssignment(cost);
  std::vector<char> det_used(dets.size(), 0);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (assignment.empty() || assignment[i] < 0) {
      out.unmatched_tracks.push_back(i);
      continue;
    }
    out.matches.emplace_back(i, static_cast<std::size_t>(assignment[i]));
    det_used[static_cast<std::size_t>(assignment[i])] = 1;
  }
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (!det_used[j]) out.unmatched_dets.push_back(j);
  }
  return out;
}

Tracker::Tracker(TrackerParams params) : params_(std::move(params)) {
  params_.Validate();
}

std::vector<TrackRecord> Tracker::Step(std::int64_t frame_index,
                                       std::span<const Detection> dets) {
  if (last_frame_ && frame_index <= *last_frame_) {
    throw ValidationError("tracker: frame " + std::to_string(frame_index) +
                          " arrived after frame " +
                          std::to_string(*last_frame_));
  }
  for (const Detection& d : dets) {
    if (d.frame_index != frame_index) {
      throw ValidationError("tracker: detection for frame " +
                            std::to_string(d.frame_index) +
                            " passed with frame " +
                            std::to_string(frame_index));
    }
  }
  if (last_frame_) {
    const double dt =
        static_cast<double>(frame_index - *last_frame_) / params_.rate;
    for (TrackState& t : tracks_) {
      const int before = t.pd_repairs;
      Predict(t, dt, params_);
      pd_repairs_ += t.pd_repairs - before;
    }
  }
  last_frame_ = frame_index;
  ++frame_count_;

  const AssociationResult a = Associate(tracks_, dets, params_);
  for (const auto& [ti, di] : a.matches) {
    TrackState& t = tracks_[ti];
    const int before = t.pd_repairs;
    Update(t, dets[di], params_);
    pd_repairs_ += t.pd_repairs - before;
  }
  for (std::size_t di : a.unmatched_dets) {
    const Detection& d = dets[di];
    TrackState t;
    t.id = next_id_++;
    t.object_class = d.object_class;
    t.x.head<7>() = Measurement(d);
    t.p = params_.initial_covariance.asDiagonal();
    t.hits = 1;
    t.num_points = d.num_points;
    tracks_.push_back(t);
  }

  std::vector<TrackRecord> out;
  for (const TrackState& t : tracks_) {
    if (t.time_since_update != 0) continue;
    if (t.hits < params_.min_hits && frame_count_ > params_.min_hits) continue;
    TrackRecord r;
    r.frame_index = frame_index;
    r.track_id = t.id;
    r.object_class = t.object_class;
    r.box = t.Box();
    r.velocity = t.x.tail<3>();
    r.num_points = t.num_points;
    out.push_back(r);
  }
  std::erase_if(tracks_, [&](const TrackState& t) {
    return t.time_since_update > params_.max_age;
  });
  std::sort(out.begin(), out.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return a.track_id < b.track_id;
  });
  return out;
}

std::vector<TrackRecord> RunTracker(std::span<const Detection> dets,
                                    std::int64_t first_frame,
                                    std::int64_t last_frame,
                                    const TrackerParams& params) {
  std::map<std::int64_t, std::vector<Detection>> by_frame;
  for (const Detection& d : dets) {
    if (d.frame_index < first_frame || d.frame_index >= last_frame) {
      throw ValidationError("detection frame " + std::to_string(d.frame_index) +
                            " outside [" + std::to_string(first_frame) + ", " +
                            std::to_string(last_frame) + ")");
    }
    by_frame[d.frame_index].push_back(d);
  }
  Tracker tracker(params);
  std::vector<TrackRecord> out;
  const std::vector<Detection> none;
  for (std::int64_t f = first_frame; f < last_frame; ++f) {
    const auto it = by_frame.find(f);
    auto recs = tracker.Step(f, it == by_frame.end() ? none : it->second);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

void WriteTracksCsv(const std::filesystem::path& path,
                    std::span<const TrackRecord> records) {
  CsvWriter w(kTracksCsvHeader);
  for (const TrackRecord& r : records) {
    w.Field(r.frame_index)
        .Field(r.track_id)
        .Field(ToString(r.object_class))
        .Field(r.box.center.x())
        .Field(r.box.center.y())
        .Field(r.box.center.z())
        .Field(r.box.length)
        .Field(r.box.width)
        .Field(r.box.height)
        .Field(r.box.yaw)
        .Field(r.velocity.x())
        .Field(r.velocity.y())
        .Field(r.velocity.z());
    w.EndRow();
  }
  w.Save(path);
}

void WriteTrackPointsCsv(const std::filesystem::path& path,
                         std::span<const TrackRecord> records) {
  CsvWriter w(kTrackPointsCsvHeader);
  for (const TrackRecord& r : records) {
    w.Field(r.frame_index).Field(r.track_id).Field(r.num_points);
    w.EndRow();
  }
  w.Save(path);
}

std::vector<TrackRecord> ReadTracksCsv(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& points_path) {
  CsvReader r(path, kTracksCsvHeader);
  std::vector<TrackRecord> out;
  while (r.Next()) {
    r.ExpectFields(13);
    TrackRecord t;
    t.frame_index = r.Int(0);
    t.track_id = static_cast<std::uint32_t>(r.Int(1));
    const auto cls = ParseObjectClass(r.Text(2));
    if (!cls) r.Fail("unknown class '" + std::string(r.Text(2)) + "'");
    t.object_class = *cls;
    t.box.center = {r.Double(3), r.Double(4), r.Double(5)};
    t.box.length = r.Double(6);
    t.box.width = r.Double(7);
    t.box.height = r.Double(8);
    t.box.yaw = r.Double(9);
    t.velocity = {r.Double(10), r.Double(11), r.Double(12)};
    try {
      t.box.Validate();
    } catch (const ValidationError& e) {
      r.Fail(e.what());
    }
    out.push_back(t);
  }
  if (points_path) {
    std::map<std::pair<std::int64_t, std::uint32_t>, std::uint32_t> points;
    CsvReader p(*points_path, kTrackPointsCsvHeader);
    while (p.Next()) {
      p.ExpectFields(3);
      points[{p.Int(0), static_cast<std::uint32_t>(p.Int(1))}] =
          static_cast<std::uint32_t>(p.Int(2));
    }
    for (TrackRecord& t : out) {
      const auto it = points.find({t.frame_index, t.track_id});
      if (it == points.end()) {
        throw IoError(points_path->string() + ": no entry for frame " +
                      std::to_string(t.frame_index) + " track " +
                      std::to_string(t.track_id));
      }
      t.num_points = it->second;
    }
  }
  return out;
}

}  // namespace infralidar
