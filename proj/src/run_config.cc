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

#include "infralidar/run_config.h"

#include <cstdio>
#include <set>

namespace infralidar {
namespace {

using nlohmann::json;

[[noreturn]] void ParamError(const std::string& where, const std::string& what) {
  throw ValidationError("parameters: " + where + ": " + what);
}

void CheckKeys(const json& j, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!j.is_object()) ParamError(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) ParamError(where, "unknown key '" + key + "'");
  }
}

void Read(const json& j, const char* key, const std::string& where,
          double& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number()) ParamError(where + "." + key, "expected a number");
  out = j[key].get<double>();
}

void Read(const json& j, const char* key, const std::string& where, int& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer()) {
    ParamError(where + "." + key, "expected an integer");
  }
  out = j[key].get<int>();
}

void Read(const json& j, const char* key, const std::string& where,
          std::uint64_t& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_unsigned() &&
      !(j[key].is_number_integer() && j[key].get<std::int64_t>() >= 0)) {
    ParamError(where + "." + key, "expected a non-negative integer");
  }
  out = j[key].get<std::uint64_t>();
}

void Read(const json& j, const char* key, const std::string& where,
          bool& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_boolean()) ParamError(where + "." + key, "expected a boolean");
  out = j[key].get<bool>();
}

}  // namespace

VariantTag VariantTag::Parse(const std::string& tag) {
  if (tag.size() != 3 || tag[1] != '-' ||
      std::string("bntr").find(tag[0]) == std::string::npos ||
      (tag[2] != 's' && tag[2] != 'f')) {
    throw ValidationError("unknown variant tag '" + tag +
                          "' (expected b|n|t|r followed by -s or -f)");
  }
  return {tag[0], tag[2] == 'f'};
}

std::string VariantTag::ToString() const {
  return std::string(1, family) + (fused ? "-f" : "-s");
}

RoiSpec DefaultRoi(char family) {
  RoiSpec roi;
  switch (family) {
    case 'b':
      roi.ground_band = 0.05;
      break;
    case 'n':
      roi.ground_band = 0.25;
      break;
    default:  // t, r: smaller area, ground removed entirely
      roi = RoiSpec::Square(40.0);
      roi.ground_band = 0.25;
      roi.ground_keep_fraction = 0.0;
      break;
  }
  return roi;
}

StageParams DefaultStageParams(const VariantTag& variant, double rate) {
  StageParams p;
  p.preprocess.roi = DefaultRoi(variant.family);
  p.tracker.rate = rate;
  return p;
}

void ApplyParams(const json& j, StageParams& p) {
  CheckKeys(j, "root", {"preprocess", "detector", "tracker", "refine", "eval"});
  if (j.contains("preprocess")) {
    const json& b = j["preprocess"];
    const std::string w = "preprocess";
    CheckKeys(b, w,
              {"roi_half_extent", "z_min", "z_max", "ground_band",
               "ground_keep_fraction", "seed", "outlier_filter",
               "outlier_radius", "outlier_min_neighbors"});
    RoiSpec& roi = p.preprocess.roi;
    if (b.contains("roi_half_extent")) {
      double h = 0.0;
      Read(b, "roi_half_extent", w, h);
      roi.x_min = roi.y_min = -h;
      roi.x_max = roi.y_max = h;
    }
    Read(b, "z_min", w, roi.z_min);
    Read(b, "z_max", w, roi.z_max);
    Read(b, "ground_band", w, roi.ground_band);
    Read(b, "ground_keep_fraction", w, roi.ground_keep_fraction);
    Read(b, "seed", w, p.preprocess.seed);
    Read(b, "outlier_filter", w, p.preprocess.outlier_filter);
    Read(b, "outlier_radius", w, p.preprocess.outlier_radius);
    Read(b, "outlier_min_neighbors", w, p.preprocess.outlier_min_neighbors);
    roi.Validate();
  }
  if (j.contains("detector")) {
    const json& b = j["detector"];
    const std::string w = "detector";
    CheckKeys(b, w,
              {"cluster_radius", "min_cluster_points", "core_min_points",
               "duplicate_iou", "estimate_ground", "ground_clearance",
               "extent_trim"});
    Read(b, "cluster_radius", w, p.detector.cluster_radius);
    Read(b, "min_cluster_points", w, p.detector.min_cluster_points);
    Read(b, "core_min_points", w, p.detector.core_min_points);
    Read(b, "duplicate_iou", w, p.detector.duplicate_iou);
    Read(b, "estimate_ground", w, p.detector.estimate_ground);
    Read(b, "ground_clearance", w, p.detector.ground_clearance);
    Read(b, "extent_trim", w, p.detector.extent_trim);
    p.detector.Validate();
  }
  if (j.contains("tracker")) {
    const json& b = j["tracker"];
    const std::string w = "tracker";
    CheckKeys(b, w,
              {"min_hits", "max_age", "metric", "distance_gate",
               "iou_threshold"});
    Read(b, "min_hits", w, p.tracker.min_hits);
    Read(b, "max_age", w, p.tracker.max_age);
    if (b.contains("metric")) {
      const std::string m = b["metric"].is_string() ? b["metric"].get<std::string>()
                                                    : std::string();
      if (m == "centroid_distance") {
        p.tracker.metric = MatchMetric::kCentroidDistance;
      } else if (m == "bev_iou") {
        p.tracker.metric = MatchMetric::kBevIou;
      } else {
        ParamError("tracker.metric", "expected centroid_distance or bev_iou");
      }
    }
    Read(b, "distance_gate", w, p.tracker.distance_gate);
    Read(b, "iou_threshold", w, p.tracker.iou_threshold);
    p.tracker.Validate();
  }
  if (j.contains("refine")) {
    const json& b = j["refine"];
    const std::string w = "refine";
    CheckKeys(b, w,
              {"heading_window", "measurement_sigma", "vehicle_jerk",
               "vru_jerk"});
    Read(b, "heading_window", w, p.refine.heading_window);
    Read(b, "measurement_sigma", w, p.refine.smoother.measurement_sigma);
    Read(b, "vehicle_jerk", w, p.refine.smoother.vehicle_jerk);
    Read(b, "vru_jerk", w, p.refine.smoother.vru_jerk);
    if (p.refine.heading_window < 1 || p.refine.heading_window % 2 == 0) {
      ParamError("refine.heading_window", "must be odd and >= 1");
    }
  }
  if (j.contains("eval")) {
    const json& b = j["eval"];
    const std::string w = "eval";
    CheckKeys(b, w,
              {"vehicle_iou", "vru_iou", "recall_points", "vehicle_gate",
               "vru_gate", "min_length", "min_frames"});
    Read(b, "vehicle_iou", w, p.eval.ap.vehicle_iou);
    Read(b, "vru_iou", w, p.eval.ap.vru_iou);
    Read(b, "recall_points", w, p.eval.ap.recall_points);
    if (p.eval.ap.recall_points != 41 && p.eval.ap.recall_points != 11) {
      ParamError("eval.recall_points", "must be 41 or 11");
    }
    Read(b, "vehicle_gate", w, p.eval.mot.vehicle_gate);
    Read(b, "vru_gate", w, p.eval.mot.vru_gate);
    Read(b, "min_length", w, p.eval.deviation.min_length);
    int frames = static_cast<int>(p.eval.deviation.min_frames);
    Read(b, "min_frames", w, frames);
    if (frames < 0) ParamError("eval.min_frames", "must be >= 0");
    p.eval.deviation.min_frames = static_cast<std::size_t>(frames);
  }
}

json ToJson(const StageParams& p) {
  const RoiSpec& roi = p.preprocess.roi;
  return {
      {"preprocess",
       {{"roi_half_extent", roi.x_max},
        {"z_min", roi.z_min},
        {"z_max", roi.z_max},
        {"ground_band", roi.ground_band},
        {"ground_keep_fraction", roi.ground_keep_fraction},
        {"seed", p.preprocess.seed},
        {"outlier_filter", p.preprocess.outlier_filter},
        {"outlier_radius", p.preprocess.outlier_radius},
        {"outlier_min_neighbors", p.preprocess.outlier_min_neighbors}}},
      {"detector",
       {{"cluster_radius", p.detector.cluster_radius},
        {"min_cluster_points", p.detector.min_cluster_points},
        {"core_min_points", p.detector.core_min_points},
        {"duplicate_iou", p.detector.duplicate_iou},
        {"estimate_ground", p.detector.estimate_ground},
        {"ground_clearance", p.detector.ground_clearance},
        {"extent_trim", p.detector.extent_trim}}},
      {"tracker",
       {{"min_hits", p.tracker.min_hits},
        {"max_age", p.tracker.max_age},
        {"metric", p.tracker.metric == MatchMetric::kBevIou
                       ? "bev_iou"
                       : "centroid_distance"},
        {"distance_gate", p.tracker.distance_gate},
        {"iou_threshold", p.tracker.iou_threshold}}},
      {"refine",
       {{"heading_window", p.refine.heading_window},
        {"measurement_sigma", p.refine.smoother.measurement_sigma},
        {"vehicle_jerk", p.refine.smoother.vehicle_jerk},
        {"vru_jerk", p.refine.smoother.vru_jerk}}},
      {"eval",
       {{"vehicle_iou", p.eval.ap.vehicle_iou},
        {"vru_iou", p.eval.ap.vru_iou},
        {"recall_points", p.eval.ap.recall_points},
        {"vehicle_gate", p.eval.mot.vehicle_gate},
        {"vru_gate", p.eval.mot.vru_gate},
        {"min_length", p.eval.deviation.min_length},
        {"min_frames", p.eval.deviation.min_frames}}}};
}

NoiseSpec ParseNoise(const json& j, std::uint64_t seed) {
  NoiseSpec n;
  n.seed = seed;
  if (j.is_null()) return n;
  CheckKeys(j, "noise",
            {"point_sigma", "pos_sigma", "rot_sigma", "seed", "per_frame_pose"});
  Read(j, "point_sigma", "noise", n.point_sigma);
  Read(j, "pos_sigma", "noise", n.pos_sigma);
  Read(j, "rot_sigma", "noise", n.rot_sigma);
  Read(j, "seed", "noise", n.seed);
  Read(j, "per_frame_pose", "noise", n.per_frame_pose);
  n.Validate();
  return n;
}

json ToJson(const NoiseSpec& n) {
  return {{"point_sigma", n.point_sigma},
          {"pos_sigma", n.pos_sigma},
          {"rot_sigma", n.rot_sigma},
          {"seed", n.seed},
          {"per_frame_pose", n.per_frame_pose}};
}

std::string HashHex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace infralidar
