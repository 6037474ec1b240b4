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

#include <cmath>
#include <numbers>
#include <set>

#include "infralidar/csv.h"
#include "infralidar/scenario_config.h"

namespace infralidar {
namespace {

using nlohmann::json;

[[noreturn]] void SchemaError(const std::string& where,
                              const std::string& what) {
  throw ValidationError("scenario config: " + where + ": " + what);
}

bool NonNegativeInteger(const json& j) {
  return j.is_number_unsigned() ||
         (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

double Number(const json& j, const std::string& where) {
  if (!j.is_number()) SchemaError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) SchemaError(where, "must be finite");
  return v;
}

Eigen::Vector3d Vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) SchemaError(where, "expected [x, y, z]");
  return {Number(j[0], where), Number(j[1], where), Number(j[2], where)};
}

Eigen::Vector2d Vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) SchemaError(where, "expected [x, y]");
  return {Number(j[0], where), Number(j[1], where)};
}

void CheckKeys(const json& j, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!j.is_object()) SchemaError(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) SchemaError(where, "unknown key '" + key + "'");
  }
}

ObjectClass ClassFrom(const json& j, const std::string& where) {
  if (!j.is_string()) SchemaError(where, "expected a class name");
  const auto c = ParseObjectClass(j.get<std::string>());
  if (!c) SchemaError(where, "unknown class '" + j.get<std::string>() + "'");
  return *c;
}

SensorPlacement ParseSensor(const json& j, const std::string& where) {
  CheckKeys(j, where, {"id", "position", "yaw", "pitch", "roll"});
  SensorPlacement s;
  if (!j.contains("id") || !NonNegativeInteger(j["id"])) {
    SchemaError(where, "sensor needs a non-negative integer id");
  }
  s.id = j["id"].get<std::uint32_t>();
  if (!j.contains("position")) SchemaError(where, "sensor needs a position");
  s.position = Vec3(j["position"], where + ".position");
  if (j.contains("yaw")) s.yaw = Number(j["yaw"], where + ".yaw");
  if (j.contains("pitch")) s.pitch = Number(j["pitch"], where + ".pitch");
  if (j.contains("roll")) s.roll = Number(j["roll"], where + ".roll");
  return s;
}

Actor ParseActor(const json& j, const std::string& where) {
  CheckKeys(j, where, {"id", "class", "dims", "waypoints", "speeds", "speed",
                       "spawn_time", "reflectance"});
  Actor a;
  if (!j.contains("id") || !NonNegativeInteger(j["id"])) {
    SchemaError(where, "actor needs a non-negative integer id");
  }
  a.id = j["id"].get<std::uint32_t>();
  if (!j.contains("class")) SchemaError(where, "actor needs a class");
  a.object_class = ClassFrom(j["class"], where + ".class");
  Eigen::Vector3d dims = DefaultDimensions(a.object_class);
  if (j.contains("dims")) dims = Vec3(j["dims"], where + ".dims");
  a.length = dims.x();
  a.width = dims.y();
  a.height = dims.z();
  a.reflectance = DefaultReflectance(a.object_class);
  if (j.contains("reflectance")) {
    a.reflectance = Number(j["reflectance"], where + ".reflectance");
  }
  if (!j.contains("waypoints") || !j["waypoints"].is_array()) {
    SchemaError(where, "actor needs a waypoints array");
  }
  for (std::size_t i = 0; i < j["waypoints"].size(); ++i) {
    a.waypoints.push_back(Vec2(j["waypoints"][i],
                               where + ".waypoints[" + std::to_string(i) + "]"));
  }
  if (j.contains("speeds") == j.contains("speed")) {
    SchemaError(where, "give exactly one of 'speeds' or 'speed'");
  }
  if (j.contains("speed")) {
    const double v = Number(j["speed"], where + ".speed");
    a.speeds.assign(a.waypoints.empty() ? 0 : a.waypoints.size() - 1, v);
  } else {
    if (!j["speeds"].is_array()) SchemaError(where, "speeds must be an array");
    for (const json& v : j["speeds"]) a.speeds.push_back(Number(v, where));
  }
  if (j.contains("spawn_time")) {
    a.spawn_time = Number(j["spawn_time"], where + ".spawn_time");
  }
  try {
    a.Validate();
  } catch (const ValidationError& e) {
    SchemaError(where, e.what());
  }
  return a;
}

}  // namespace

ScenarioConfig ParseScenarioConfig(const json& j) {
  CheckKeys(j, "root",
            {"layout", "duration", "rate", "seed", "sensor_model", "sensors",
             "actors", "traffic", "buildings", "noise"});
  ScenarioConfig c;
  if (!j.contains("layout") || !j["layout"].is_string()) {
    SchemaError("layout", "required string");
  }
  c.layout = j["layout"].get<std::string>();
  GetLayout(c.layout);
  if (j.contains("duration")) c.duration = Number(j["duration"], "duration");
  if (!(c.duration >= 0.0)) SchemaError("duration", "must be >= 0");
  if (j.contains("rate")) c.rate = Number(j["rate"], "rate");
  if (!(c.rate > 0.0)) SchemaError("rate", "must be > 0");
  if (j.contains("seed")) {
    if (!NonNegativeInteger(j["seed"])) {
      SchemaError("seed", "expected a non-negative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("sensor_model")) {
    const json& m = j["sensor_model"];
    CheckKeys(m, "sensor_model",
              {"layers", "vertical_fov_deg", "azimuth_steps", "max_range"});
    if (m.contains("layers")) {
      c.sensor_model.layers =
          static_cast<int>(Number(m["layers"], "sensor_model.layers"));
    }
    if (m.contains("vertical_fov_deg")) {
      c.sensor_model.vertical_fov =
          Number(m["vertical_fov_deg"], "sensor_model.vertical_fov_deg") *
          std::numbers::pi / 180.0;
    }
    if (m.contains("azimuth_steps")) {
      c.sensor_model.azimuth_steps = static_cast<int>(
          Number(m["azimuth_steps"], "sensor_model.azimuth_steps"));
    }
    if (m.contains("max_range")) {
      c.sensor_model.max_range =
          Number(m["max_range"], "sensor_model.max_range");
    }
  }
  if (j.contains("sensors")) {
    if (!j["sensors"].is_array()) SchemaError("sensors", "expected an array");
    std::vector<SensorPlacement> sensors;
    for (std::size_t i = 0; i < j["sensors"].size(); ++i) {
      sensors.push_back(
          ParseSensor(j["sensors"][i], "sensors[" + std::to_string(i) + "]"));
    }
    c.sensors = std::move(sensors);
  }
  if (j.contains("actors")) {
    if (!j["actors"].is_array()) SchemaError("actors", "expected an array");
    std::set<std::uint32_t> ids;
    for (std::size_t i = 0; i < j["actors"].size(); ++i) {
      const std::string where = "actors[" + std::to_string(i) + "]";
      Actor a = ParseActor(j["actors"][i], where);
      if (!ids.insert(a.id).second) {
        SchemaError(where, "duplicate actor id " + std::to_string(a.id));
      }
      c.actors.push_back(std::move(a));
    }
  }
  if (j.contains("traffic")) {
    const json& t = j["traffic"];
    if (!t.is_object()) SchemaError("traffic", "expected an object");
    for (const auto& [name, count] : t.items()) {
      const ObjectClass cls = ClassFrom(json(name), "traffic");
      if (!count.is_number_integer() || count.get<int>() < 0) {
        SchemaError("traffic." + name, "expected a count >= 0");
      }
      c.traffic[cls] = count.get<int>();
    }
  }
  if (j.contains("buildings")) {
    if (!j["buildings"].is_array()) {
      SchemaError("buildings", "expected an array");
    }
    std::vector<Building> buildings;
    for (std::size_t i = 0; i < j["buildings"].size(); ++i) {
      const std::string where = "buildings[" + std::to_string(i) + "]";
      const json& b = j["buildings"][i];
      CheckKeys(b, where, {"min", "max", "reflectance"});
      Building out;
      out.min = Vec3(b.value("min", json()), where + ".min");
      out.max = Vec3(b.value("max", json()), where + ".max");
      if (b.contains("reflectance")) {
        out.reflectance = Number(b["reflectance"], where + ".reflectance");
      }
      buildings.push_back(out);
    }
    c.buildings = std::move(buildings);
  }
  return c;
}

ScenarioConfig LoadScenarioConfig(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line number for the message.
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw IoError(path.string() + ":" + std::to_string(line) +
                  ": malformed JSON: " + e.what());
  }
  return ParseScenarioConfig(j);
}

}  // namespace infralidar
