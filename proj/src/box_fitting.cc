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
#include <limits>
#include <numbers>
#include <tuple>
#include <utility>
#include <vector>

#include "infralidar/detector.h"

namespace infralidar {
namespace {

using Eigen::Vector2d;

double Cross(const Vector2d& o, const Vector2d& a, const Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

constexpr double kCenterTrim = 0.01;
constexpr std::size_t kMinTrimPoints = 20;

// Lower and upper nearest-rank quantiles at `trim` and 1 - trim.
std::pair<double, double> Quantiles(std::vector<double>& values, double trim) {
  const std::size_t last = values.size() - 1;
  const auto lo = static_cast<std::size_t>(std::floor(trim * last));
  const auto hi = static_cast<std::size_t>(std::ceil((1.0 - trim) * last));
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double a = values[lo];
  std::nth_element(values.begin(), values.begin() + hi, values.end());
  return {a, values[hi]};
}

// Maps yaw to (-pi/2, pi/2].
double HalfTurn(double yaw) {
  double y = WrapAngle(yaw);
  if (y > std::numbers::pi / 2) y -= std::numbers::pi;
  if (y <= -std::numbers::pi / 2) y += std::numbers::pi;
  return y;
}

}  // namespace

std::vector<Vector2d> ConvexHull(std::vector<Vector2d> points) {
  std::sort(points.begin(), points.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Vector2d> hull(2 * points.size());
  std::size_t k = 0;
  for (const Vector2d& p : points) {
    while (k >= 2 && Cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
    while (k >= lower && Cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

OrientedBox FitBox(std::span<const Point> cluster, double trim) {
  if (cluster.empty()) throw ValidationError("FitBox needs at least one point");
  if (!(trim >= 0.0 && trim < 0.5)) {
    throw ValidationError("FitBox trim must lie in [0, 0.5)");
  }
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -z_min;
  std::vector<Vector2d> xy;
  xy.reserve(cluster.size());
  for (const Point& p : cluster) {
    xy.emplace_back(p.x, p.y);
    z_min = std::min(z_min, p.z);
    z_max = std::max(z_max, p.z);
  }
  const std::vector<Vector2d> hull = ConvexHull(std::move(xy));

  OrientedBox box;
  box.center.z() = 0.5 * (z_min + z_max);
  box.height = std::max(kMinBoxExtent, z_max - z_min);
  if (hull.size() == 1) {
    box.center.head<2>() = hull[0];
    box.length = box.width = kMinBoxExtent;
    return box;
  }

  // Rotating calipers: the optimal rectangle has one side on a hull edge.
  double best_area = std::numeric_limits<double>::infinity();
  Vector2d best_u = Vector2d::UnitX();
  double best[4] = {0, 0, 0, 0};  // min/max along u, min/max along v
  const std::size_t n = hull.size();
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) {
    const Vector2d e = hull[(i + 1) % n] - hull[i];
    const double len = e.norm();
    if (len == 0.0) continue;
    const Vector2d u = e / len;
    const Vector2d v(-u.y(), u.x());
    double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u;
    double lo_v = lo_u, hi_v = -lo_u;
    for (const Vector2d& p : hull) {
      const double a = p.dot(u);
      const double b = p.dot(v);
      lo_u = std::min(lo_u, a);
      hi_u = std::max(hi_u, a);
      lo_v = std::min(lo_v, b);
      hi_v = std::max(hi_v, b);
    }
    const double area = (hi_u - lo_u) * (hi_v - lo_v);
    if (area < best_area) {
      best_area = area;
      best_u = u;
      best[0] = lo_u;
      best[1] = hi_u;
      best[2] = lo_v;
      best[3] = hi_v;
    }
  }
  const Vector2d v(-best_u.y(), best_u.x());
  if (trim > 0.0 && cluster.size() >= kMinTrimPoints) {
    std::vector<double> a, b, z;
    a.reserve(cluster.size());
    b.reserve(cluster.size());
    z.reserve(cluster.size());
    for (const Point& p : cluster) {
      a.push_back(p.x * best_u.x() + p.y * best_u.y());
      b.push_back(p.x * v.x() + p.y * v.y());
      z.push_back(p.z);
    }
    const double center_trim = std::min(trim, kCenterTrim);
    const auto [cu_lo, cu_hi] = Quantiles(a, center_trim);
    const auto [cv_lo, cv_hi] = Quantiles(b, center_trim);
    const double mid_u = 0.5 * (cu_lo + cu_hi);
    const double mid_v = 0.5 * (cv_lo + cv_hi);
    std::tie(best[0], best[1]) = Quantiles(a, trim);
    std::tie(best[2], best[3]) = Quantiles(b, trim);
    const auto [z_lo, z_hi] = Quantiles(z, trim);
    box.center.z() = 0.5 * (z_lo + z_hi);
    box.height = std::max(kMinBoxExtent, z_hi - z_lo);
    const double half_l = 0.5 * (best[1] - best[0]);
    const double half_w = 0.5 * (best[3] - best[2]);
    best[0] = mid_u - half_l;
    best[1] = mid_u + half_l;
    best[2] = mid_v - half_w;
    best[3] = mid_v + half_w;
  }
  const double mid_u = 0.5 * (best[0] + best[1]);
  const double mid_v = 0.5 * (best[2] + best[3]);
  box.center.head<2>() = best_u * mid_u + v * mid_v;
  double along = best[1] - best[0];
  double across = best[3] - best[2];
  double yaw = std::atan2(best_u.y(), best_u.x());
  if (across > along) {
    std::swap(along, across);
    yaw += std::numbers::pi / 2;
  }
  box.length = std::max(kMinBoxExtent, along);
  box.width = std::max(kMinBoxExtent, across);
  box.yaw = HalfTurn(yaw);
  return box;
}

}  // namespace infralidar
