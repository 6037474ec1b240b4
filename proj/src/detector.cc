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

#include "infralidar/detector.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "infralidar/csv.h"

namespace infralidar {
namespace {

constexpr double kGroundMaxHeight = 0.3;
constexpr double kGroundMinHeight = -0.5;
constexpr std::size_t kGroundMinCellPoints = 3;

double IntervalMargin(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return std::clamp(2.0 * std::min(v - lo, hi - v) / (hi - lo), 0.0, 1.0);
}

// Sparse voxel index with cubic cells of the query radius.
class VoxelIndex {
 public:
  VoxelIndex(std::span<const Point> points, double cell) : cell_(cell) {
    keys_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      keys_[i] = Key(Cell(points[i].x), Cell(points[i].y), Cell(points[i].z));
    }
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return keys_[a] < keys_[b];
                     });
    ranges_.reserve(points.size());
    for (std::size_t s = 0; s < order_.size();) {
      std::size_t e = s;
      while (e < order_.size() && keys_[order_[e]] == keys_[order_[s]]) ++e;
      ranges_.emplace(keys_[order_[s]],
                      std::pair<std::uint32_t, std::uint32_t>(s, e));
      s = e;
    }
  }

  template <typename Fn>
  void ForEachNear(const Point& p, Fn fn) const {
    const std::int64_t cx = Cell(p.x), cy = Cell(p.y), cz = Cell(p.z);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = ranges_.find(Key(cx + dx, cy + dy, cz + dz));
          if (it == ranges_.end()) continue;
          for (std::uint32_t k = it->second.first; k < it->second.second; ++k) {
            if (!fn(order_[k])) return;
          }
        }
      }
    }
  }

 private:
  std::int64_t Cell(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }
  static std::int64_t Key(std::int64_t x, std::int64_t y, std::int64_t z) {
    constexpr std::int64_t kBias = 1 << 20;
    constexpr std::int64_t kMask = (1 << 21) - 1;
    return (((x + kBias) & kMask) << 42) | (((y + kBias) & kMask) << 21) |
           ((z + kBias) & kMask);
  }

  double cell_;
  std::vector<std::int64_t> keys_;
  std::vector<std::uint32_t> order_;
  std::unordered_map<std::int64_t, std::pair<std::uint32_t, std::uint32_t>>
      ranges_;
};

ClassGate Gate(ObjectClass c, double l0, double l1, double w0, double w1,
               double h0, double h1) {
  return {c, l0, l1, w0, w1, h0, h1};
}

}  // namespace

bool ClassGate::Accepts(const OrientedBox& box) const {
  return box.length >= l_min && box.length <= l_max && box.width >= w_min &&
         box.width <= w_max && box.height >= h_min && box.height <= h_max;
}

double ClassGate::Margin(const OrientedBox& box) const {
  return std::min({IntervalMargin(box.length, l_min, l_max),
                   IntervalMargin(box.width, w_min, w_max),
                   IntervalMargin(box.height, h_min, h_max)});
}

std::vector<ClassGate> DefaultGates() {
  return {
      Gate(ObjectClass::kTruck, 6.0, 13.0, 1.8, 3.6, 2.4, 4.3),
      Gate(ObjectClass::kCar, 3.0, 6.2, 1.2, 3.0, 0.9, 2.3),
      Gate(ObjectClass::kMotorcycle, 1.5, 3.0, 0.3, 1.6, 0.9, 1.6),
      Gate(ObjectClass::kBicycle, 1.2, 2.6, 0.2, 1.5, 1.45, 2.2),
      Gate(ObjectClass::kPedestrian, 0.2, 1.3, 0.1, 1.2, 1.2, 2.3),
  };
}

void DetectorParams::Validate() const {
  if (!(cluster_radius > 0.0)) {
    throw ValidationError("cluster_radius must be > 0");
  }
  if (min_cluster_points < 1 || core_min_points < 1) {
    throw ValidationError("cluster point thresholds must be >= 1");
  }
  if (!(duplicate_iou >= 0.0 && duplicate_iou <= 1.0)) {
    throw ValidationError("duplicate_iou must lie in [0, 1]");
  }
  if (estimate_ground && (!(ground_cell > 0.0) || !(ground_percentile >= 0.0 &&
                                                    ground_percentile <= 1.0))) {
    throw ValidationError("invalid ground estimate parameters");
  }
  if (!(score_points > 0.0)) throw ValidationError("score_points must be > 0");
  if (!(extent_trim >= 0.0 && extent_trim < 0.5)) {
    throw ValidationError("extent_trim must lie in [0, 0.5)");
  }
}

std::vector<std::vector<std::size_t>> Cluster(std::span<const Point> points,
                                              const DetectorParams& params) {
  params.Validate();
  std::vector<std::vector<std::size_t>> clusters;
  if (points.empty()) return clusters;
  const double r2 = params.cluster_radius * params.cluster_radius;
  const VoxelIndex index(points, params.cluster_radius);
  const auto near = [&](std::size_t i, std::size_t j) {
    const double dx = points[i].x - points[j].x;
    const double dy = points[i].y - points[j].y;
    const double dz = points[i].z - points[j].z;
    return dx * dx + dy * dy + dz * dz <= r2;
  };

  std::vector<char> core(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    int count = 0;
    index.ForEachNear(points[i], [&](std::uint32_t j) {
      if (near(i, j)) ++count;
      return count < params.core_min_points;
    });
    core[i] = count >= params.core_min_points;
  }

  constexpr int kUnlabeled = -1;
  std::vector<int> label(points.size(), kUnlabeled);
  std::deque<std::size_t> queue;
  int next = 0;
  for (std::size_t seed = 0; seed < points.size(); ++seed) {
    if (!core[seed] || label[seed] != kUnlabeled) continue;
    const int c = next++;
    label[seed] = c;
    queue.push_back(seed);
    std::vector<std::size_t> members = {seed};
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      index.ForEachNear(points[p], [&](std::uint32_t q) {
        if (label[q] == kUnlabeled && near(p, q)) {
          label[q] = c;
          members.push_back(q);
          if (core[q]) queue.push_back(q);
        }
        return true;
      });
    }
    if (static_cast<int>(members.size()) >= params.min_cluster_points) {
      std::sort(members.begin(), members.end());
      clusters.push_back(std::move(members));
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

std::optional<std::pair<ObjectClass, double>> Classify(
    const OrientedBox& box, std::size_t n_points,
    const DetectorParams& params) {
  for (const ClassGate& g : params.gates) {
    if (!g.Accepts(box)) continue;
    const double fit = 0.5 + 0.5 * g.Margin(box);
    const double support =
        1.0 - std::exp(-static_cast<double>(n_points) / params.score_points);
    return std::make_pair(g.object_class, std::clamp(fit * support, 0.0, 1.0));
  }
  return std::nullopt;
}

GroundEstimate::GroundEstimate(std::span<const Point> points, double cell,
                               double percentile)
    : cell_(cell) {
  if (points.empty()) return;
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = max_x;
  min_x_ = min_y_ = std::numeric_limits<double>::infinity();
  for (const Point& p : points) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  nx_ = static_cast<std::int64_t>(std::floor((max_x - min_x_) / cell_)) + 1;
  ny_ = static_cast<std::int64_t>(std::floor((max_y - min_y_) / cell_)) + 1;
  std::vector<std::vector<double>> z(static_cast<std::size_t>(nx_ * ny_));
  for (const Point& p : points) {
    const auto ix = static_cast<std::int64_t>((p.x - min_x_) / cell_);
    const auto iy = static_cast<std::int64_t>((p.y - min_y_) / cell_);
    z[static_cast<std::size_t>(iy * nx_ + ix)].push_back(p.z);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> raw(z.size(), nan);
  for (std::size_t k = 0; k < z.size(); ++k) {
    auto& v = z[k];
    if (v.size() < kGroundMinCellPoints) continue;
    const auto nth = static_cast<std::size_t>(
        std::floor(percentile * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(nth),
                     v.end());
    raw[k] = v[nth];
  }
  height_.assign(raw.size(), 0.0);
  for (std::int64_t iy = 0; iy < ny_; ++iy) {
    for (std::int64_t ix = 0; ix < nx_; ++ix) {
      double h = std::numeric_limits<double>::infinity();
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const std::int64_t x = ix + dx, y = iy + dy;
          if (x < 0 || y < 0 || x >= nx_ || y >= ny_) continue;
          const double r = raw[static_cast<std::size_t>(y * nx_ + x)];
          if (!std::isnan(r)) h = std::min(h, r);
        }
      }
      height_[static_cast<std::size_t>(iy * nx_ + ix)] =
          std::isfinite(h) ? std::clamp(h, kGroundMinHeight, kGroundMaxHeight)
                           : 0.0;
    }
  }
}

double GroundEstimate::Height(double x, double y) const {
  if (nx_ == 0) return 0.0;
  const auto ix = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor((x - min_x_) / cell_)), 0, nx_ - 1);
  const auto iy = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor((y - min_y_) / cell_)), 0, ny_ - 1);
  return height_[static_cast<std::size_t>(iy * nx_ + ix)];
}

std::vector<Detection> Detect(const PointCloudFrame& frame,
                              const DetectorParams& params) {
  params.Validate();
  std::optional<GroundEstimate> ground;
  std::vector<Point> above;
  if (params.estimate_ground) {
    ground.emplace(frame.points, params.ground_cell, params.ground_percentile);
    above.reserve(frame.points.size());
    for (const Point& p : frame.points) {
      if (p.z > ground->Height(p.x, p.y) + params.ground_clearance) {
        above.push_back(p);
      }
    }
  } else {
    above = frame.points;
  }

  std::vector<Detection> out;
  std::vector<Point> members;
  for (const auto& cluster : Cluster(above, params)) {
    members.clear();
    for (std::size_t i : cluster) members.push_back(above[i]);
    OrientedBox box = FitBox(members, params.extent_trim);
    if (ground) {
      const double top = box.center.z() + 0.5 * box.height;
      const double bottom =
          std::min(ground->Height(box.center.x(), box.center.y()),
                   top - kMinBoxExtent);
      box.center.z() = 0.5 * (top + bottom);
      box.height = top - bottom;
    }
    const auto cls = Classify(box, members.size(), params);
    if (!cls) continue;
    Detection d;
    d.frame_index = frame.frame_index;
    d.object_class = cls->first;
    d.score = cls->second;
    d.box = box;
    d.num_points = static_cast<std::uint32_t>(members.size());
    out.push_back(d);
  }
  return out;
}

std::vector<Detection> FilterDetections(std::span<const Detection> dets,
                                        const RoiSpec& roi,
                                        const DetectorParams& params) {
  std::vector<Detection> inside;
  for (const Detection& d : dets) {
    if (roi.ContainsXy(d.box.center.x(), d.box.center.y())) inside.push_back(d);
  }
  std::stable_sort(inside.begin(), inside.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.score > b.score;
                   });
  std::vector<Detection> kept;
  for (const Detection& d : inside) {
    bool duplicate = false;
    for (const Detection& k : kept) {
      if (BevIou(d.box, k.box) > params.duplicate_iou) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(d);
  }
  return kept;
}

void WriteDetectionsCsv(const std::filesystem::path& path,
                        std::span<const Detection> dets) {
  CsvWriter w(kDetectionsCsvHeader);
  for (const Detection& d : dets) {
    w.Field(d.frame_index)
        .Field(ToString(d.object_class))
        .Field(d.score)
        .Field(d.box.center.x())
        .Field(d.box.center.y())
        .Field(d.box.center.z())
        .Field(d.box.length)
        .Field(d.box.width)
        .Field(d.box.height)
        .Field(d.box.yaw);
    w.EndRow();
  }
  w.Save(path);
}

std::vector<Detection> ReadDetectionsCsv(const std::filesystem::path& path) {
  CsvReader r(path, kDetectionsCsvHeader);
  std::vector<Detection> out;
  while (r.Next()) {
    r.ExpectFields(10);
    Detection d;
    d.frame_index = r.Int(0);
    const auto cls = ParseObjectClass(r.Text(1));
    if (!cls) r.Fail("unknown class '" + std::string(r.Text(1)) + "'");
    d.object_class = *cls;
    d.score = r.Double(2);
    if (!(d.score >= 0.0 && d.score <= 1.0)) r.Fail("score outside [0, 1]");
    d.box.center = {r.Double(3), r.Double(4), r.Double(5)};
    d.box.length = r.Double(6);
    d.box.width = r.Double(7);
    d.box.height = r.Double(8);
    d.box.yaw = r.Double(9);
    try {
      d.box.Validate();
    } catch (const ValidationError& e) {
      r.Fail(e.what());
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace infralidar
