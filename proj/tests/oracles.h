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

// Independent reference implementations used by the unit and acceptance
// tests. None of them share code with the library beyond plain types.

#ifndef INFRALIDAR_TESTS_ORACLES_H_
#define INFRALIDAR_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "infralidar/geometry.h"
#include "infralidar/refine.h"
#include "infralidar/scenario.h"

namespace infralidar::oracle {

// Every injective partial assignment of rows to columns avoiding +inf.
// Keeps the one with the most pairs, then the smallest row-ordered sum.
inline std::vector<int> ExhaustiveAssignment(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  std::vector<int> current(rows, -1), best(rows, -1);
  std::vector<bool> used(cols, false);
  int best_pairs = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  auto recurse = [&](auto&& self, int r, int pairs) -> void {
    if (r == rows) {
      double sum = 0.0;
      for (int i = 0; i < rows; ++i) {
        if (current[i] >= 0) sum += cost(i, current[i]);
      }
      if (pairs > best_pairs || (pairs == best_pairs && sum < best_cost)) {
        best_pairs = pairs;
        best_cost = sum;
        best = current;
      }
      return;
    }
    current[r] = -1;
    self(self, r + 1, pairs);
    for (int c = 0; c < cols; ++c) {
      if (used[c] || std::isinf(cost(r, c))) continue;
      used[c] = true;
      current[r] = c;
      self(self, r + 1, pairs + 1);
      used[c] = false;
      current[r] = -1;
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

// Minimum over all complete assignments of the smaller side (finite costs),
// summed in row order.
inline double BruteForceMinCost(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  const bool transpose = rows > cols;
  const int n = transpose ? cols : rows;
  const int m = transpose ? rows : cols;
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    // The first n entries of perm are the partners of the n smaller-side
    // items; permutations differing only in the tail repeat, harmlessly.
    std::vector<int> row_to_col(rows, -1);
    for (int k = 0; k < n; ++k) {
      if (transpose) {
        row_to_col[perm[k]] = k;
      } else {
        row_to_col[k] = perm[k];
      }
    }
    double sum = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (row_to_col[i] >= 0) sum += cost(i, row_to_col[i]);
    }
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Area fractions by uniform sampling over the joint bounding rectangle.
inline double MonteCarloBevIou(const OrientedBox& a, const OrientedBox& b,
                               int samples, std::uint32_t seed) {
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const OrientedBox* box : {&a, &b}) {
    const double c = std::cos(box->yaw), s = std::sin(box->yaw);
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        const double x = box->center.x() + 0.5 * sx * box->length * c -
                         0.5 * sy * box->width * s;
        const double y = box->center.y() + 0.5 * sx * box->length * s +
                         0.5 * sy * box->width * c;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    }
  }
  auto inside = [](const OrientedBox& box, double x, double y) {
    const double dx = x - box.center.x(), dy = y - box.center.y();
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    const double u = c * dx + s * dy, v = -s * dx + c * dy;
    return std::abs(u) <= 0.5 * box.length && std::abs(v) <= 0.5 * box.width;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(min_x, max_x), uy(min_y, max_y);
  long both = 0, any = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = ux(rng), y = uy(rng);
    const bool in_a = inside(a, x, y), in_b = inside(b, x, y);
    both += in_a && in_b;
    any += in_a || in_b;
  }
  return any == 0 ? 0.0 : static_cast<double>(both) / any;
}

// Straight constant-speed GT actor along +x, one record per frame.
inline std::vector<GroundTruthRecord> StraightGt(std::uint32_t id,
                                                 ObjectClass cls,
                                                 std::int64_t first,
                                                 std::int64_t frames,
                                                 double y, double speed,
                                                 double rate) {
  std::vector<GroundTruthRecord> out;
  for (std::int64_t k = 0; k < frames; ++k) {
    GroundTruthRecord g;
    g.frame_index = first + k;
    g.actor_id = id;
    g.object_class = cls;
    g.box.center = {-20.0 + speed * k / rate, y, 0.8};
    g.box.length = 4.5;
    g.box.width = 1.8;
    g.box.height = 1.6;
    g.velocity = {speed, 0.0, 0.0};
    out.push_back(g);
  }
  return out;
}

// Estimated trajectory following GT records with a constant lateral offset.
inline Trajectory OffsetTrajectory(std::span<const GroundTruthRecord> gt,
                                   std::uint32_t track_id, double offset,
                                   double rate) {
  Trajectory t;
  t.track_id = track_id;
  t.object_class = gt.front().object_class;
  for (const GroundTruthRecord& g : gt) {
    TrajectoryFrame f;
    f.frame_index = g.frame_index;
    f.t = g.frame_index / rate;
    f.position = g.box.center + Eigen::Vector3d(0.0, offset, 0.0);
    f.velocity = g.velocity;
    f.acceleration = g.acceleration;
    f.yaw = g.box.yaw;
    f.dims = {g.box.length, g.box.width, g.box.height};
    t.frames.push_back(f);
  }
  return t;
}

}  // namespace infralidar::oracle

#endif  // INFRALIDAR_TESTS_ORACLES_H_
