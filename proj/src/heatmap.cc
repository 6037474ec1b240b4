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

#include <algorithm>
#include <cmath>

#include "infralidar/csv.h"
#include "infralidar/metrics.h"

namespace infralidar {
namespace {

constexpr double kGridCell = 2.0;

}  // namespace

HeatMap::HeatMap(double min, double max, double cell) : min_(min), cell_(cell) {
  if (!(max > min) || !(cell > 0.0)) {
    throw ValidationError("heat map needs max > min and cell > 0");
  }
  cells_ = static_cast<int>(std::ceil((max - min) / cell - 1e-9));
  sum_.assign(static_cast<std::size_t>(cells_) * cells_, 0.0);
  count_.assign(sum_.size(), 0);
}

std::optional<std::pair<int, int>> HeatMap::CellOf(double x, double y) const {
  const double max = min_ + cell_ * cells_;
  if (!(x >= min_ && x <= max && y >= min_ && y <= max)) return std::nullopt;
  const int ix = std::min(cells_ - 1, static_cast<int>((x - min_) / cell_));
  const int iy = std::min(cells_ - 1, static_cast<int>((y - min_) / cell_));
  return std::make_pair(ix, iy);
}

bool HeatMap::Add(double x, double y, double value) {
  const auto c = CellOf(x, y);
  if (!c) {
    ++outside_;
    return false;
  }
  sum_[Index(c->first, c->second)] += value;
  ++count_[Index(c->first, c->second)];
  return true;
}

void HeatMap::Merge(const HeatMap& other) {
  if (other.cells_ != cells_ || other.min_ != min_ || other.cell_ != cell_) {
    throw ValidationError("cannot merge heat maps with different grids");
  }
  for (std::size_t k = 0; k < sum_.size(); ++k) {
    sum_[k] += other.sum_[k];
    count_[k] += other.count_[k];
  }
  outside_ += other.outside_;
}

double HeatMap::Mean(int ix, int iy) const {
  const std::int64_t n = Count(ix, iy);
  return n == 0 ? 0.0 : Sum(ix, iy) / static_cast<double>(n);
}

Eigen::Vector2d HeatMap::CellCenter(int ix, int iy) const {
  return {min_ + (ix + 0.5) * cell_, min_ + (iy + 0.5) * cell_};
}

std::string HeatMap::ToCsv() const {
  std::string out;
  for (int iy = 0; iy < cells_; ++iy) {
    for (int ix = 0; ix < cells_; ++ix) {
      if (ix > 0) out.push_back(',');
      AppendDouble(&out, Mean(ix, iy));
    }
    out.push_back('\n');
  }
  return out;
}

void HeatMap::WriteCsv(const std::filesystem::path& path) const {
  WriteFile(path, ToCsv());
}

void CoverageMaps::Merge(const CoverageMaps& other) {
  width.Merge(other.width);
  length.Merge(other.length);
  height.Merge(other.height);
}

std::vector<BoxObservation> ObserveBoxes(
    const PointCloudFrame& world_frame,
    std::span<const GroundTruthRecord> frame_gt) {
  std::vector<BoxObservation> out(frame_gt.size());
  if (world_frame.points.empty()) return out;
  const PointGrid2d grid(world_frame.points, kGridCell);
  std::vector<std::size_t> cand;
  std::vector<Point> inside;
  for (std::size_t k = 0; k < frame_gt.size(); ++k) {
    const OrientedBox& box = frame_gt[k].box;
    double x0 = box.center.x(), x1 = x0, y0 = box.center.y(), y1 = y0;
    for (const Eigen::Vector2d& c : box.BevCorners()) {
      x0 = std::min(x0, c.x());
      x1 = std::max(x1, c.x());
      y0 = std::min(y0, c.y());
      y1 = std::max(y1, c.y());
    }
    grid.Candidates(x0, y0, x1, y1, &cand);
    inside.clear();
    for (std::size_t i : cand) {
      if (box.Contains(world_frame.points[i].xyz())) {
        inside.push_back(world_frame.points[i]);
      }
    }
    out[k].points = inside.size();
    out[k].dims = MinBoxDims(inside, box);
  }
  return out;
}

void AccumulatePointCounts(const PointCloudFrame& world_frame,
                           std::span<const GroundTruthRecord> frame_gt,
                           HeatMap& map) {
  const auto obs = ObserveBoxes(world_frame, frame_gt);
  for (std::size_t k = 0; k < frame_gt.size(); ++k) {
    map.Add(frame_gt[k].box.center.x(), frame_gt[k].box.center.y(),
            static_cast<double>(obs[k].points));
  }
}

void AccumulateCoverage(const PointCloudFrame& world_frame,
                        std::span<const GroundTruthRecord> frame_gt,
                        CoverageMaps& maps) {
  const auto obs = ObserveBoxes(world_frame, frame_gt);
  for (std::size_t k = 0; k < frame_gt.size(); ++k) {
    const OrientedBox& b = frame_gt[k].box;
    const double x = b.center.x(), y = b.center.y();
    maps.width.Add(x, y, obs[k].dims.width / b.width);
    maps.length.Add(x, y, obs[k].dims.length / b.length);
    maps.height.Add(x, y, obs[k].dims.height / b.height);
  }
}

}  // namespace infralidar
