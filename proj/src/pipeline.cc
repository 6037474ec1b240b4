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

#include "infralidar/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "infralidar/csv.h"
#include "infralidar/frame_io.h"

namespace fs = std::filesystem;

namespace infralidar {
namespace {

using nlohmann::json;

constexpr double kFuseTolerance = 1e-6;
constexpr std::size_t kMaxListedFrames = 20;

std::string FrameName(std::int64_t f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "f%06lld.csv", static_cast<long long>(f));
  return buf;
}

json PoseJson(const Pose& p) {
  const Eigen::Quaterniond& q = p.rotation();
  const Eigen::Vector3d& t = p.translation();
  return {{"translation", {t.x(), t.y(), t.z()}},
          {"rotation", {q.w(), q.x(), q.y(), q.z()}}};
}

[[noreturn]] void ManifestError(const std::string& what) {
  throw ValidationError("manifest: " + what);
}

Pose PoseFromJson(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("translation") || !j.contains("rotation") ||
      !j["translation"].is_array() || j["translation"].size() != 3 ||
      !j["rotation"].is_array() || j["rotation"].size() != 4) {
    ManifestError(where + ": expected {translation: [3], rotation: [4]}");
  }
  std::vector<double> v;
  for (const json& x : j["translation"]) {
    if (!x.is_number()) ManifestError(where + ": non-numeric pose");
    v.push_back(x.get<double>());
  }
  for (const json& x : j["rotation"]) {
    if (!x.is_number()) ManifestError(where + ": non-numeric pose");
    v.push_back(x.get<double>());
  }
  Pose p(Eigen::Quaterniond(v[3], v[4], v[5], v[6]), {v[0], v[1], v[2]});
  try {
    p.Validate();
  } catch (const ValidationError& e) {
    ManifestError(where + ": " + e.what());
  }
  return p;
}

template <typename T>
T Required(const json& j, const char* key) {
  if (!j.contains(key)) ManifestError(std::string("missing '") + key + "'");
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    ManifestError(std::string("bad type for '") + key + "'");
  }
}

json ReadJsonFile(const fs::path& path) {
  const std::string text = ReadFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw IoError(path.string() + ":" + std::to_string(line) +
                  ": malformed JSON");
  }
}

void WriteJsonFile(const fs::path& path, const json& j) {
  WriteFile(path, j.dump(2) + "\n");
}

std::vector<std::uint32_t> LaneSensors(const DatasetManifest& m,
                                       std::optional<std::uint32_t> sensor) {
  if (sensor) return {*sensor};
  std::vector<std::uint32_t> ids;
  for (const ManifestSensor& s : m.sensors) ids.push_back(s.id);
  return ids;
}

PointCloudFrame LoadWorldFrame(const DatasetManifest& m,
                               const std::vector<std::uint32_t>& sensors,
                               std::int64_t f) {
  std::vector<PointCloudFrame> raw;
  raw.reserve(sensors.size());
  std::vector<SensorFrame> inputs;
  for (std::uint32_t id : sensors) {
    const ManifestSensor& s = m.Sensor(id);
    raw.push_back(ReadFrameCsv(m.dir / s.frames[static_cast<std::size_t>(f)],
                               id, f, m.FrameTime(f)));
  }
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    inputs.push_back({&raw[i], m.Sensor(sensors[i]).pose});
  }
  return Fuse(inputs, kFuseTolerance);
}

template <typename Fn>
void RunStage(Stage stage, std::int64_t& frame, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(ToString(stage), frame, e.what());
  }
}

void RequireFile(const fs::path& p, Stage needed_by) {
  if (!fs::exists(p)) {
    throw ValidationError("cannot start at stage " + ToString(needed_by) +
                          ": staged input " + p.string() + " is missing");
  }
}

void Flatten(const json& j, const std::string& prefix,
             std::map<std::string, std::optional<double>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      Flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    }
  } else if (j.is_number()) {
    out[prefix] = j.get<double>();
  } else if (j.is_string() || j.is_null()) {
    out[prefix] = std::nullopt;
  }
}

}  // namespace

StageError::StageError(std::string stage, std::int64_t frame,
                       const std::string& what)
    : std::runtime_error("stage " + stage +
                         (frame >= 0 ? ", frame " + std::to_string(frame)
                                     : std::string()) +
                         ": " + what),
      stage_(std::move(stage)),
      frame_(frame) {}

const ManifestSensor& DatasetManifest::Sensor(std::uint32_t id) const {
  for (const ManifestSensor& s : sensors) {
    if (s.id == id) return s;
  }
  throw ValidationError("sensor " + std::to_string(id) +
                        " is not part of the dataset");
}

json DatasetManifest::ToJson() const {
  json sensors_json = json::array();
  for (const ManifestSensor& s : sensors) {
    sensors_json.push_back({{"id", s.id},
                            {"pose", PoseJson(s.pose)},
                            {"true_pose", PoseJson(s.true_pose)},
                            {"frames", s.frames}});
  }
  return {{"variant", variant},     {"layout", layout},
          {"rate", rate},           {"frames", frames},
          {"intensity_max", intensity_max},
          {"gt", gt_file},          {"noise", noise},
          {"sensors", sensors_json}};
}

DatasetManifest DatasetManifest::FromJson(const json& j, const fs::path& dir) {
  if (!j.is_object()) ManifestError("expected an object");
  DatasetManifest m;
  m.dir = dir;
  m.variant = Required<std::string>(j, "variant");
  VariantTag::Parse(m.variant);
  m.layout = Required<std::string>(j, "layout");
  m.rate = Required<double>(j, "rate");
  if (!(m.rate > 0.0)) ManifestError("rate must be > 0");
  m.frames = Required<std::int64_t>(j, "frames");
  if (m.frames < 0) ManifestError("frames must be >= 0");
  m.intensity_max = Required<double>(j, "intensity_max");
  m.gt_file = Required<std::string>(j, "gt");
  m.noise = j.value("noise", json());
  if (!fs::exists(dir / m.gt_file)) {
    ManifestError("GT file " + (dir / m.gt_file).string() + " does not exist");
  }
  if (!j.contains("sensors") || !j["sensors"].is_array()) {
    ManifestError("missing 'sensors' array");
  }
  std::set<std::uint32_t> ids;
  for (const json& s : j["sensors"]) {
    ManifestSensor ms;
    ms.id = Required<std::uint32_t>(s, "id");
    const std::string where = "sensor " + std::to_string(ms.id);
    if (ms.id == 0 || !ids.insert(ms.id).second) {
      ManifestError(where + ": id must be unique and > 0");
    }
    ms.pose = PoseFromJson(s.value("pose", json()), where + " pose");
    ms.true_pose = s.contains("true_pose")
                       ? PoseFromJson(s["true_pose"], where + " true_pose")
                       : ms.pose;
    ms.frames = Required<std::vector<std::string>>(s, "frames");
    if (static_cast<std::int64_t>(ms.frames.size()) != m.frames) {
      ManifestError(where + ": lists " + std::to_string(ms.frames.size()) +
                    " frames, expected " + std::to_string(m.frames));
    }
    for (const std::string& f : ms.frames) {
      if (!fs::exists(dir / f)) {
        ManifestError(where + ": frame file " + (dir / f).string() +
                      " does not exist");
      }
    }
    m.sensors.push_back(std::move(ms));
  }
  return m;
}

DatasetManifest DatasetManifest::Load(const fs::path& path) {
  if (!fs::exists(path)) {
    throw ValidationError("manifest " + path.string() + " does not exist");
  }
  return FromJson(ReadJsonFile(path), fs::absolute(path).parent_path());
}

DatasetManifest Simulate(const ScenarioConfig& config,
                         const VariantTag& variant, const NoiseSpec& noise,
                         const fs::path& out_dir) {
  if (!variant.simulated()) {
    throw ValidationError("variant " + variant.ToString() +
                          " holds recorded data and cannot be simulated");
  }
  if ((variant.family == 't') != (config.layout == "E")) {
    throw ValidationError("variant family t goes with layout E only (got " +
                          variant.ToString() + " on layout " + config.layout +
                          ")");
  }
  if (variant.noisy()) {
    noise.Validate();
    if (noise.per_frame_pose) {
      throw ValidationError(
          "per-frame pose noise cannot be stored in a dataset manifest");
    }
  }
  const Scene scene = BuildScenario(config);

  DatasetManifest m;
  m.dir = out_dir;
  m.variant = variant.ToString();
  m.layout = config.layout;
  m.rate = scene.rate;
  m.frames = scene.NumFrames();
  m.gt_file = "gt.csv";
  if (variant.noisy()) m.noise = ToJson(noise);
  for (const SensorSpec& s : scene.sensors) {
    ManifestSensor ms;
    ms.id = s.id;
    ms.true_pose = s.pose;
    ms.pose = variant.noisy() ? PerturbPose(s.pose, noise, s.id) : s.pose;
    m.sensors.push_back(std::move(ms));
  }

  double intensity_max = 0.0;
  for (std::int64_t f = 0; f < m.frames; ++f) {
    const double t = scene.FrameTime(f);
    const SceneSnapshot snapshot(scene, t);
    for (std::size_t i = 0; i < scene.sensors.size(); ++i) {
      PointCloudFrame frame = CastScan(snapshot, scene.sensors[i], t, f);
      if (variant.noisy()) frame = PerturbPoints(frame, noise);
      for (const Point& p : frame.points) {
        intensity_max = std::max(intensity_max, p.intensity);
      }
      const std::string name = "frames/" + FrameFileName(scene.sensors[i].id, f);
      WriteFrameCsv(out_dir / name, frame);
      m.sensors[i].frames.push_back(name);
    }
  }
  m.intensity_max = intensity_max > 0.0 ? intensity_max : 1.0;
  WriteGtCsv(out_dir / m.gt_file, ExportGt(scene, 0, m.frames));
  WriteJsonFile(out_dir / "manifest.json", m.ToJson());
  return m;
}

Stage ParseStage(const std::string& name) {
  for (Stage s : {Stage::kPreprocess, Stage::kDetect, Stage::kTrack,
                  Stage::kRefine}) {
    if (ToString(s) == name) return s;
  }
  throw ValidationError("unknown stage '" + name +
                        "' (expected preprocess, detect, track or refine)");
}

std::string ToString(Stage stage) {
  switch (stage) {
    case Stage::kPreprocess:
      return "preprocess";
    case Stage::kDetect:
      return "detect";
    case Stage::kTrack:
      return "track";
    case Stage::kRefine:
      return "refine";
  }
  return "?";
}

void CheckPipelineOptions(const DatasetManifest& manifest,
                          const PipelineOptions& options) {
  if (manifest.family() != options.variant.family) {
    throw ValidationError("variant " + options.variant.ToString() +
                          " does not match dataset variant " +
                          manifest.variant);
  }
  if (options.variant.fused && options.sensor) {
    throw ValidationError("fused mode takes no sensor id");
  }
  if (!options.variant.fused) {
    if (!options.sensor) throw ValidationError("single mode needs a sensor id");
    manifest.Sensor(*options.sensor);
  }
  if (manifest.sensors.empty() && manifest.frames > 0) {
    throw ValidationError("dataset has frames but no sensors");
  }
}

std::string RunDirectoryName(const DatasetManifest& manifest,
                             const PipelineOptions& options) {
  const json key = {{"manifest", manifest.ToJson()},
                    {"variant", options.variant.ToString()},
                    {"sensor", options.sensor ? json(*options.sensor) : json()},
                    {"params", ToJson(options.params)}};
  return options.variant.ToString() + "-" + HashHex(key.dump()).substr(0, 8);
}

fs::path RunPipeline(const DatasetManifest& manifest,
                     const PipelineOptions& options) {
  CheckPipelineOptions(manifest, options);
  const StageParams& params = options.params;
  const fs::path run_dir =
      options.out_root / RunDirectoryName(manifest, options);
  const std::vector<std::uint32_t> sensors =
      LaneSensors(manifest, options.sensor);
  const std::int64_t frames = manifest.frames;
  const fs::path pre_dir = run_dir / "preprocessed";
  const fs::path det_path = run_dir / "detections" / "detections.csv";
  const fs::path tracks_path = run_dir / "tracks" / "tracks.csv";
  const fs::path points_path = run_dir / "tracks" / "track_points.csv";

  switch (options.from_stage) {
    case Stage::kRefine:
      RequireFile(points_path, options.from_stage);
      [[fallthrough]];
    case Stage::kTrack:
      RequireFile(det_path, options.from_stage);
      [[fallthrough]];
    case Stage::kDetect:
      for (std::int64_t f = 0; f < frames; ++f) {
        RequireFile(pre_dir / FrameName(f), options.from_stage);
      }
      break;
    case Stage::kPreprocess:
      break;
  }

  fs::create_directories(run_dir);
  WriteJsonFile(run_dir / "run.json",
                {{"variant", options.variant.ToString()},
                 {"sensor", options.sensor ? json(*options.sensor) : json()},
                 {"manifest", fs::relative(fs::absolute(manifest.dir) /
                                               "manifest.json",
                                           fs::absolute(run_dir))
                                  .generic_string()},
                 {"frames", frames},
                 {"rate", manifest.rate},
                 {"params", ToJson(params)}});

  std::int64_t frame = -1;
  if (options.from_stage <= Stage::kPreprocess) {
    PreprocessSpec spec = params.preprocess;
    spec.intensity_max = manifest.intensity_max;
    RunStage(Stage::kPreprocess, frame, [&] {
      for (frame = 0; frame < frames; ++frame) {
        const PointCloudFrame world = LoadWorldFrame(manifest, sensors, frame);
        WriteFrameCsv(pre_dir / FrameName(frame), Preprocess(world, spec));
      }
    });
  }
  if (options.from_stage <= Stage::kDetect) {
    frame = -1;
    RunStage(Stage::kDetect, frame, [&] {
      std::vector<Detection> all;
      for (frame = 0; frame < frames; ++frame) {
        const PointCloudFrame cloud = ReadFrameCsv(
            pre_dir / FrameName(frame), 0, frame, manifest.FrameTime(frame));
        const std::vector<Detection> dets =
            FilterDetections(Detect(cloud, params.detector),
                             params.preprocess.roi, params.detector);
        all.insert(all.end(), dets.begin(), dets.end());
      }
      frame = -1;
      WriteDetectionsCsv(det_path, all);
    });
  }
  if (options.from_stage <= Stage::kTrack) {
    frame = -1;
    RunStage(Stage::kTrack, frame, [&] {
      const std::vector<Detection> dets = ReadDetectionsCsv(det_path);
      Tracker tracker(params.tracker);
      std::vector<TrackRecord> records;
      std::size_t i = 0;
      for (frame = 0; frame < frames; ++frame) {
        const std::size_t begin = i;
        while (i < dets.size() && dets[i].frame_index == frame) ++i;
        if (i < dets.size() && dets[i].frame_index < frame) {
          throw ValidationError("detections are not sorted by frame");
        }
        const auto recs = tracker.Step(
            frame, std::span<const Detection>(dets).subspan(begin, i - begin));
        records.insert(records.end(), recs.begin(), recs.end());
      }
      if (i != dets.size()) {
        frame = dets[i].frame_index;
        throw ValidationError("detection outside the dataset's frame range");
      }
      frame = -1;
      WriteTracksCsv(tracks_path, records);
      WriteTrackPointsCsv(points_path, records);
    });
  }
  frame = -1;
  RunStage(Stage::kRefine, frame, [&] {
    const std::vector<TrackRecord> records =
        ReadTracksCsv(tracks_path, points_path);
    const std::vector<Trajectory> trajs =
        Refine(records, manifest.rate, params.refine);
    WriteRefinedCsv(run_dir / "refined" / "refined.csv", trajs);
    WriteRefinedDimsCsv(run_dir / "refined" / "refined_dims.csv", trajs);
  });
  return run_dir;
}

EvaluateInputs EvaluateInputsFromRun(const fs::path& run_dir) {
  const fs::path run_json = run_dir / "run.json";
  if (!fs::exists(run_json)) {
    throw ValidationError(run_json.string() + " does not exist");
  }
  const json run = ReadJsonFile(run_json);
  EvaluateInputs in;
  const VariantTag variant =
      VariantTag::Parse(run.value("variant", std::string()));
  DatasetManifest manifest = DatasetManifest::Load(
      run_dir / run.value("manifest", std::string()));
  in.rate = manifest.rate;
  in.params = DefaultStageParams(variant, manifest.rate);
  if (run.contains("params")) ApplyParams(run["params"], in.params);
  in.refined = run_dir / "refined" / "refined.csv";
  in.detections = run_dir / "detections" / "detections.csv";
  in.gt = manifest.dir / manifest.gt_file;
  if (manifest.frames > 0) in.frame_range = {{0, manifest.frames - 1}};
  if (run.contains("sensor") && run["sensor"].is_number_unsigned()) {
    in.heatmap_sensors = {run["sensor"].get<std::uint32_t>()};
  } else {
    in.heatmap_sensors = LaneSensors(manifest, std::nullopt);
  }
  in.manifest = std::move(manifest);
  return in;
}

json EvaluateRun(const EvaluateInputs& in, const fs::path& out_dir) {
  if (!fs::exists(in.gt)) {
    throw ValidationError("GT file " + in.gt.string() + " does not exist");
  }
  if (!fs::exists(in.refined)) {
    throw ValidationError("trajectory file " + in.refined.string() +
                          " does not exist");
  }
  if (in.detections && !fs::exists(*in.detections)) {
    throw ValidationError("detections file " + in.detections->string() +
                          " does not exist");
  }
  const RoiSpec& roi = in.params.preprocess.roi;
  const std::vector<GroundTruthRecord> all_gt = ReadGtCsv(in.gt);
  std::pair<std::int64_t, std::int64_t> range;
  if (in.frame_range) {
    range = *in.frame_range;
  } else {
    if (all_gt.empty()) throw ValidationError("GT file holds no records");
    range = {all_gt.front().frame_index, all_gt.front().frame_index};
    for (const GroundTruthRecord& g : all_gt) {
      range.first = std::min(range.first, g.frame_index);
      range.second = std::max(range.second, g.frame_index);
    }
  }
  const std::vector<Trajectory> trajs = ReadRefinedCsv(in.refined, in.rate);
  std::vector<Detection> dets;
  if (in.detections) dets = ReadDetectionsCsv(*in.detections);

  std::set<std::int64_t> offending;
  auto check = [&](std::int64_t f) {
    if (f < range.first || f > range.second) offending.insert(f);
  };
  for (const Trajectory& t : trajs) {
    for (const TrajectoryFrame& f : t.frames) check(f.frame_index);
  }
  for (const Detection& d : dets) check(d.frame_index);
  for (const GroundTruthRecord& g : all_gt) check(g.frame_index);
  if (!offending.empty()) {
    std::string list;
    std::size_t n = 0;
    for (std::int64_t f : offending) {
      if (n++ == kMaxListedFrames) {
        list += ", ...";
        break;
      }
      list += (list.empty() ? "" : ", ") + std::to_string(f);
    }
    throw ValidationError(
        "frame misalignment: " + std::to_string(offending.size()) +
        " frame indices outside [" + std::to_string(range.first) + ", " +
        std::to_string(range.second) + "]: " + list);
  }

  const std::vector<GroundTruthRecord> gt =
      RestrictGt(all_gt, roi.x_min, roi.x_max);
  if (gt.empty()) throw ValidationError("no GT objects inside the ROI");
  json report = ToJson(Evaluate(dets, trajs, gt, in.params.eval));
  if (!in.detections) report.erase("ap");

  fs::create_directories(out_dir);
  if (in.manifest) {
    HeatMap points(roi.x_min, roi.x_max);
    CoverageMaps coverage(roi.x_min, roi.x_max);
    std::map<std::int64_t, std::vector<GroundTruthRecord>> by_frame;
    for (const GroundTruthRecord& g : gt) by_frame[g.frame_index].push_back(g);
    for (std::int64_t f = 0; f < in.manifest->frames; ++f) {
      const auto it = by_frame.find(f);
      if (it == by_frame.end()) continue;
      const PointCloudFrame cropped =
          CropRoi(LoadWorldFrame(*in.manifest, in.heatmap_sensors, f), roi);
      AccumulatePointCounts(cropped, it->second, points);
      AccumulateCoverage(cropped, it->second, coverage);
    }
    points.WriteCsv(out_dir / "heatmap_points.csv");
    coverage.width.WriteCsv(out_dir / "heatmap_width_ratio.csv");
    coverage.length.WriteCsv(out_dir / "heatmap_length_ratio.csv");
    coverage.height.WriteCsv(out_dir / "heatmap_height_ratio.csv");
  }
  WriteJsonFile(out_dir / "report.json", report);
  return report;
}

std::vector<CompareRow> CompareReports(const json& single, const json& fused) {
  std::map<std::string, std::optional<double>> a, b;
  Flatten(single, "", a);
  Flatten(fused, "", b);
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  std::vector<CompareRow> rows;
  for (const std::string& k : keys) {
    CompareRow r;
    r.metric = k;
    if (auto it = a.find(k); it != a.end()) r.single = it->second;
    if (auto it = b.find(k); it != b.end()) r.fused = it->second;
    rows.push_back(r);
  }
  return rows;
}

std::string CompareTableCsv(const std::vector<CompareRow>& rows) {
  CsvWriter w("metric,single,fused,delta");
  auto field = [&](const std::optional<double>& v) {
    if (v) {
      w.Field(*v);
    } else {
      w.Field(std::string_view("n/a"));
    }
  };
  for (const CompareRow& r : rows) {
    w.Field(std::string_view(r.metric));
    field(r.single);
    field(r.fused);
    field(r.delta());
    w.EndRow();
  }
  return w.buffer();
}

}  // namespace infralidar
