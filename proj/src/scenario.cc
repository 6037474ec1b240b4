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

#include "infralidar/scenario.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "infralidar/csv.h"

namespace infralidar {
namespace {

constexpr double kBreakTolerance = 1e-9;
constexpr double kBreakDifferenceStep = 1e-3;

struct PathSample {
  ActorState state;
  bool on_break = false;
};

std::optional<PathSample> SamplePath(const Actor& actor, double t) {
  double local = t - actor.spawn_time;
  if (local < 0.0) return std::nullopt;
  const std::size_t segments = actor.waypoints.size() - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const Eigen::Vector2d delta = actor.waypoints[i + 1] - actor.waypoints[i];
    const double len = delta.norm();
    if (len < 1e-12) continue;
    const Eigen::Vector2d dir = delta / len;
    const double speed = actor.speeds[i];
    const double seg_time = speed > 0.0
                                ? len / speed
                                : std::numeric_limits<double>::infinity();
    if (local <= seg_time) {
      PathSample s;
      s.state.position = actor.waypoints[i] + dir * (speed * local);
      s.state.yaw = std::atan2(dir.y(), dir.x());
      s.state.velocity = dir * speed;
      s.on_break = (local < kBreakTolerance && i > 0) ||
                   (seg_time - local < kBreakTolerance && i + 1 < segments);
      return s;
    }
    local -= seg_time;
  }
  return std::nullopt;
}

std::optional<Eigen::Vector2d> VelocityAt(const Actor& actor, double t) {
  const auto s = SamplePath(actor, t);
  if (!s) return std::nullopt;
  if (!s->on_break) return s->state.velocity;
  const auto before = SamplePath(actor, t - kBreakDifferenceStep);
  const auto after = SamplePath(actor, t + kBreakDifferenceStep);
  if (!before || !after) return s->state.velocity;
  return (after->state.position - before->state.position) /
         (2.0 * kBreakDifferenceStep);
}

}  // namespace

void SensorSpec::Validate() const {
  if (id == 0) throw ValidationError("sensor id 0 is reserved for fused data");
  if (layers < 1) throw ValidationError("sensor needs at least one layer");
  if (azimuth_steps < 1) throw ValidationError("sensor needs azimuth steps");
  if (!(max_range > 0.0)) throw ValidationError("sensor max_range must be > 0");
  if (!(rate > 0.0)) throw ValidationError("sensor rate must be > 0");
  if (!(vertical_fov >= 0.0) || vertical_fov >= std::numbers::pi) {
    throw ValidationError("sensor vertical_fov must lie in [0, pi)");
  }
  pose.Validate();
}

double SensorSpec::LayerElevation(int layer) const {
  if (layers == 1) return 0.0;
  return -0.5 * vertical_fov +
         vertical_fov * static_cast<double>(layer) / (layers - 1);
}

double SensorSpec::horizontal_step() const {
  return 2.0 * std::numbers::pi / azimuth_steps;
}

double SensorSpec::StepAzimuth(int step) const {
  return horizontal_step() * step;
}

void Actor::Validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw ValidationError("actor " + std::to_string(id) +
                          ": dimensions must be positive");
  }
  if (waypoints.size() < 2) {
    throw ValidationError("actor " + std::to_string(id) +
                          ": path needs at least two waypoints");
  }
  if (speeds.size() != waypoints.size() - 1) {
    throw ValidationError("actor " + std::to_string(id) +
                          ": need one speed per path segment");
  }
  for (double s : speeds) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ValidationError("actor " + std::to_string(id) +
                            ": speeds must be finite and >= 0");
    }
  }
  for (const auto& w : waypoints) {
    if (!w.allFinite()) {
      throw ValidationError("actor " + std::to_string(id) +
                            ": non-finite waypoint");
    }
  }
}

Eigen::Vector3d DefaultDimensions(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar:
      return {4.5, 1.8, 1.6};
    case ObjectClass::kTruck:
      return {8.0, 2.5, 3.2};
    case ObjectClass::kPedestrian:
      return {0.5, 0.5, 1.8};
    case ObjectClass::kBicycle:
      return {1.8, 0.6, 1.7};
    case ObjectClass::kMotorcycle:
      return {2.2, 0.8, 1.4};
  }
  return {1.0, 1.0, 1.0};
}

double DefaultReflectance(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar:
      return 0.6;
    case ObjectClass::kTruck:
      return 0.5;
    case ObjectClass::kPedestrian:
      return 0.3;
    case ObjectClass::kBicycle:
      return 0.4;
    case ObjectClass::kMotorcycle:
      return 0.55;
  }
  return 0.5;
}

void Scene::Validate() const {
  if (!(rate > 0.0)) throw ValidationError("scene rate must be > 0");
  if (!(duration >= 0.0)) throw ValidationError("duration must be >= 0");
  std::set<std::uint32_t> sensor_ids;
  for (const SensorSpec& s : sensors) {
    s.Validate();
    if (!sensor_ids.insert(s.id).second) {
      throw ValidationError("duplicate sensor id " + std::to_string(s.id));
    }
  }
  std::set<std::uint32_t> actor_ids;
  for (const Actor& a : actors) {
    a.Validate();
    if (!actor_ids.insert(a.id).second) {
      throw ValidationError("duplicate actor id " + std::to_string(a.id));
    }
  }
  for (const Building& b : buildings) {
    if (!(b.max.array() > b.min.array()).all()) {
      throw ValidationError("building box must have positive extent");
    }
  }
}

const SensorSpec& Scene::Sensor(std::uint32_t id) const {
  for (const SensorSpec& s : sensors) {
    if (s.id == id) return s;
  }
  throw ValidationError("unknown sensor id " + std::to_string(id));
}

std::int64_t Scene::NumFrames() const {
  return static_cast<std::int64_t>(std::floor(duration * rate + 1e-9));
}

std::optional<ActorState> EvaluateActor(const Actor& actor, double t) {
  auto s = SamplePath(actor, t);
  if (!s) return std::nullopt;
  if (auto v = VelocityAt(actor, t)) s->state.velocity = *v;
  return s->state;
}

std::vector<GroundTruthRecord> StepActors(const Scene& scene, double t,
                                          std::int64_t frame_index) {
  const double tau = 0.5 / scene.rate;
  std::vector<GroundTruthRecord> out;
  for (const Actor& actor : scene.actors) {
    const auto state = EvaluateActor(actor, t);
    if (!state) continue;
    GroundTruthRecord rec;
    rec.frame_index = frame_index;
    rec.actor_id = actor.id;
    rec.object_class = actor.object_class;
    rec.box.center = {state->position.x(), state->position.y(),
                      0.5 * actor.height};
    rec.box.length = actor.length;
    rec.box.width = actor.width;
    rec.box.height = actor.height;
    rec.box.yaw = WrapAngle(state->yaw);
    rec.velocity = {state->velocity.x(), state->velocity.y(), 0.0};

    const auto v_before = VelocityAt(actor, t - tau);
    const auto v_after = VelocityAt(actor, t + tau);
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    if (v_before && v_after) {
      acc = (*v_after - *v_before) / (2.0 * tau);
    } else if (v_after) {
      acc = (*v_after - state->velocity) / tau;
    } else if (v_before) {
      acc = (state->velocity - *v_before) / tau;
    }
    rec.acceleration = {acc.x(), acc.y(), 0.0};
    out.push_back(rec);
  }
  return out;
}

std::vector<GroundTruthRecord> ExportGt(const Scene& scene,
                                        std::int64_t first_frame,
                                        std::int64_t last_frame) {
  if (first_frame < 0 || last_frame < first_frame ||
      last_frame > scene.NumFrames()) {
    throw ValidationError("frame range [" + std::to_string(first_frame) +
                          ", " + std::to_string(last_frame) +
                          ") outside the simulation");
  }
  std::vector<GroundTruthRecord> out;
  for (std::int64_t f = first_frame; f < last_frame; ++f) {
    auto recs = StepActors(scene, scene.FrameTime(f), f);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

void WriteGtCsv(const std::filesystem::path& path,
                std::span<const GroundTruthRecord> records) {
  CsvWriter w(kGtCsvHeader);
  for (const GroundTruthRecord& r : records) {
    w.Field(r.frame_index)
        .Field(r.actor_id)
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
        .Field(r.velocity.z())
        .Field(r.acceleration.x())
        .Field(r.acceleration.y())
        .Field(r.acceleration.z());
    w.EndRow();
  }
  w.Save(path);
}

std::vector<GroundTruthRecord> ReadGtCsv(const std::filesystem::path& path) {
  CsvReader r(path, kGtCsvHeader);
  std::vector<GroundTruthRecord> out;
  while (r.Next()) {
    r.ExpectFields(16);
    GroundTruthRecord rec;
    rec.frame_index = r.Int(0);
    rec.actor_id = static_cast<std::uint32_t>(r.Int(1));
    const auto cls = ParseObjectClass(r.Text(2));
    if (!cls) r.Fail("unknown class '" + std::string(r.Text(2)) + "'");
    rec.object_class = *cls;
    rec.box.center = {r.Double(3), r.Double(4), r.Double(5)};
    rec.box.length = r.Double(6);
    rec.box.width = r.Double(7);
    rec.box.height = r.Double(8);
    rec.box.yaw = r.Double(9);
    rec.velocity = {r.Double(10), r.Double(11), r.Double(12)};
    rec.acceleration = {r.Double(13), r.Double(14), r.Double(15)};
    out.push_back(rec);
  }
  return out;
}

}  // namespace infralidar
