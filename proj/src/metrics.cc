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

#include "infralidar/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "infralidar/assignment.h"

namespace infralidar {
namespace {

using nlohmann::json;

template <typename T>
std::map<std::int64_t, std::vector<const T*>> ByFrame(std::span<const T> items) {
  std::map<std::int64_t, std::vector<const T*>> out;
  for (const T& item : items) out[item.frame_index].push_back(&item);
  return out;
}

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json("n/a");
}

struct DeviationSums {
  double pos = 0.0, vel = 0.0, acc = 0.0;
  std::size_t frames = 0;
  std::size_t trajectories = 0;

  void Add(const DeviationSums& o) {
    pos += o.pos;
    vel += o.vel;
    acc += o.acc;
    frames += o.frames;
    trajectories += o.trajectories;
  }
  DeviationGroup Finish() const {
    DeviationGroup g;
    g.trajectories = trajectories;
    g.frames = frames;
    if (frames > 0) {
      const double n = static_cast<double>(frames);
      g.position = pos / n;
      g.velocity = vel / n;
      g.acceleration = acc / n;
    }
    return g;
  }
};

}  // namespace

std::optional<double> AveragePrecision(std::span<const Detection> dets,
                                       std::span<const GroundTruthRecord> gt,
                                       double iou_threshold,
                                       int recall_points) {
  if (recall_points < 2) throw ValidationError("recall_points must be >= 2");
  if (gt.empty()) return std::nullopt;
  std::vector<const Detection*> order;
  for (const Detection& d : dets) order.push_back(&d);
  std::stable_sort(order.begin(), order.end(),
                   [](const Detection* a, const Detection* b) {
                     return a->score > b->score;
                   });
  auto gt_by_frame = ByFrame(gt);
  std::set<const GroundTruthRecord*> used;
  std::vector<double> precision, recall;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Detection& d = *order[k];
    const GroundTruthRecord* best = nullptr;
    double best_iou = iou_threshold;
    if (auto it = gt_by_frame.find(d.frame_index); it != gt_by_frame.end()) {
      for (const GroundTruthRecord* g : it->second) {
        if (used.contains(g)) continue;
        const double iou = BevIou(d.box, g->box);
        if (iou >= best_iou && (best == nullptr || iou > best_iou)) {
          best = g;
          best_iou = iou;
        }
      }
    }
    if (best != nullptr) {
      used.insert(best);
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gt.size()));
  }
  // Interpolated precision: best precision at any recall >= r.
  for (std::size_t k = precision.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double sum = 0.0;
  for (int i = 0; i < recall_points; ++i) {
    const double r = static_cast<double>(i) / (recall_points - 1);
    const auto it = std::lower_bound(recall.begin(), recall.end(), r - 1e-12);
    if (it != recall.end()) {
      sum += precision[static_cast<std::size_t>(it - recall.begin())];
    }
  }
  return sum / recall_points;
}

std::map<ObjectClass, std::optional<double>> AveragePrecisionByClass(
    std::span<const Detection> dets, std::span<const GroundTruthRecord> gt,
    const ApOptions& options) {
  std::map<ObjectClass, std::optional<double>> out;
  for (ObjectClass c : kAllClasses) {
    std::vector<Detection> d;
    std::vector<GroundTruthRecord> g;
    for (const Detection& x : dets) {
      if (x.object_class == c) d.push_back(x);
    }
    for (const GroundTruthRecord& x : gt) {
      if (x.object_class == c) g.push_back(x);
    }
    out[c] = AveragePrecision(d, g, options.Threshold(c), options.recall_points);
  }
  return out;
}

std::vector<MotHypothesis> HypothesesFrom(std::span<const Trajectory> trajs) {
  std::vector<MotHypothesis> out;
  for (const Trajectory& t : trajs) {
    for (const TrajectoryFrame& f : t.frames) {
      out.push_back({f.frame_index, t.track_id, t.object_class,
                     f.position.head<2>()});
    }
  }
  return out;
}

std::vector<MotHypothesis> HypothesesFrom(std::span<const TrackRecord> tracks) {
  std::vector<MotHypothesis> out;
  for (const TrackRecord& r : tracks) {
    out.push_back({r.frame_index, r.track_id, r.object_class,
                   r.box.center.head<2>()});
  }
  return out;
}

ClearMotResult ClearMot(std::span<const MotHypothesis> hyps,
                        std::span<const GroundTruthRecord> gt,
                        const ClearMotOptions& options,
                        const FrameMatcher& matcher) {
  if (gt.empty()) throw ValidationError("CLEAR-MOT needs ground truth");
  const FrameMatcher solve = matcher ? matcher : FrameMatcher(SolveAssignment);
  const auto gt_frames = ByFrame(gt);
  const auto hyp_frames = ByFrame(hyps);
  std::set<std::int64_t> frames;
  for (const auto& [f, v] : gt_frames) frames.insert(f);
  for (const auto& [f, v] : hyp_frames) frames.insert(f);

  ClearMotResult r;
  double dist_sum = 0.0;
  double norm_sum = 0.0;
  std::map<std::uint32_t, std::uint32_t> previous;      // gt id -> hyp id
  std::map<std::uint32_t, std::uint32_t> last_matched;  // gt id -> hyp id
  const std::vector<const GroundTruthRecord*> no_gt;
  const std::vector<const MotHypothesis*> no_hyp;
  for (std::int64_t f : frames) {
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const auto& g = git == gt_frames.end() ? no_gt : git->second;
    const auto& h = hit == hyp_frames.end() ? no_hyp : hit->second;
    r.gt += static_cast<std::int64_t>(g.size());

    std::vector<int> gt_to_hyp(g.size(), -1);
    std::vector<char> hyp_used(h.size(), 0);
    const auto distance = [&](std::size_t i, std::size_t j) {
      return (g[i]->box.center.head<2>() - h[j]->center).norm();
    };
    // Keep last frame's correspondences that are still valid.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto prev = previous.find(g[i]->actor_id);
      if (prev == previous.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (!hyp_used[j] && h[j]->id == prev->second &&
            distance(i, j) <= options.Gate(g[i]->object_class)) {
          gt_to_hyp[i] = static_cast<int>(j);
          hyp_used[j] = 1;
          break;
        }
      }
    }
    std::vector<std::size_t> free_g, free_h;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (gt_to_hyp[i] < 0) free_g.push_back(i);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!hyp_used[j]) free_h.push_back(j);
    }
    if (!free_g.empty() && !free_h.empty()) {
      Eigen::MatrixXd cost(free_g.size(), free_h.size());
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        const double gate = options.Gate(g[free_g[a]]->object_class);
        for (std::size_t b = 0; b < free_h.size(); ++b) {
          const double d = distance(free_g[a], free_h[b]);
          cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              d <= gate ? d : std::numeric_limits<double>::infinity();
        }
      }
      const std::vector<int> assign = solve(cost);
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        if (assign[a] < 0) continue;
        const std::size_t j = free_h[static_cast<std::size_t>(assign[a])];
        gt_to_hyp[free_g[a]] = static_cast<int>(j);
        hyp_used[j] = 1;
      }
    }

    previous.clear();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (gt_to_hyp[i] < 0) {
        ++r.fn;
        continue;
      }
      const MotHypothesis& hyp = *h[static_cast<std::size_t>(gt_to_hyp[i])];
      const std::uint32_t actor = g[i]->actor_id;
      const auto last = last_matched.find(actor);
      if (last != last_matched.end() && last->second != hyp.id) ++r.idsw;
      last_matched[actor] = hyp.id;
      previous[actor] = hyp.id;
      const double d = distance(i, static_cast<std::size_t>(gt_to_hyp[i]));
      dist_sum += d;
      norm_sum += d / options.Gate(g[i]->object_class);
      ++r.matches;
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!hyp_used[j]) ++r.fp;
    }
  }
  r.mota = 1.0 - static_cast<double>(r.fp + r.fn + r.idsw) /
                     static_cast<double>(r.gt);
  if (r.matches > 0) {
    r.motp_distance = dist_sum / static_cast<double>(r.matches);
    r.motp = 1.0 - norm_sum / static_cast<double>(r.matches);
  }
  return r;
}

DeviationReport MaeDeviation(std::span<const Trajectory> est,
                             std::span<const GroundTruthRecord> gt,
                             const DeviationOptions& options) {
  // actor -> frame -> record
  std::map<std::uint32_t, std::map<std::int64_t, const GroundTruthRecord*>>
      actors;
  for (const GroundTruthRecord& g : gt) actors[g.actor_id][g.frame_index] = &g;

  DeviationReport report;
  DeviationSums veh, vru;
  for (const Trajectory& t : est) {
    if (!(t.Length() > options.min_length) ||
        !(t.n_frames() > options.min_frames)) {
      continue;
    }
    ++report.selected;
    // Partner: most overlapping frames among actors within the distance cap.
    const std::map<std::int64_t, const GroundTruthRecord*>* partner = nullptr;
    std::size_t best_overlap = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (const auto& [id, frames] : actors) {
      std::size_t overlap = 0;
      double sum = 0.0;
      for (const TrajectoryFrame& f : t.frames) {
        const auto it = frames.find(f.frame_index);
        if (it == frames.end()) continue;
        ++overlap;
        sum += (f.position.head<2>() - it->second->box.center.head<2>()).norm();
      }
      if (overlap == 0) continue;
      const double mean = sum / static_cast<double>(overlap);
      if (mean > options.max_mean_distance) continue;
      if (overlap > best_overlap ||
          (overlap == best_overlap && mean < best_mean)) {
        partner = &frames;
        best_overlap = overlap;
        best_mean = mean;
      }
    }
    if (partner == nullptr) {
      ++report.unmatched;
      continue;
    }
    DeviationSums s;
    s.trajectories = 1;
    ObjectClass gt_class = ObjectClass::kCar;
    for (const TrajectoryFrame& f : t.frames) {
      const auto it = partner->find(f.frame_index);
      if (it == partner->end()) continue;
      const GroundTruthRecord& g = *it->second;
      gt_class = g.object_class;
      s.pos += (f.position.head<2>() - g.box.center.head<2>()).norm();
      s.vel += (f.velocity.head<2>() - g.velocity.head<2>()).norm();
      s.acc += (f.acceleration.head<2>() - g.acceleration.head<2>()).norm();
      ++s.frames;
    }
    (IsVehicle(gt_class) ? veh : vru).Add(s);
  }
  DeviationSums all = veh;
  all.Add(vru);
  report.all = all.Finish();
  report.vehicle = veh.Finish();
  report.vru = vru.Finish();
  return report;
}

double SyncError(double v_max, double dt) {
  if (!(v_max >= 0.0) || !(dt >= 0.0)) {
    throw ValidationError("sync error needs v_max >= 0 and dt >= 0");
  }
  return v_max * dt;
}

EvalReport Evaluate(std::span<const Detection> dets,
                    std::span<const Trajectory> trajs,
                    std::span<const GroundTruthRecord> gt,
                    const EvalOptions& options) {
  EvalReport r;
  r.selection = options.deviation;
  r.ap = AveragePrecisionByClass(dets, gt, options.ap);
  const std::vector<MotHypothesis> hyps = HypothesesFrom(trajs);
  r.mot = ClearMot(hyps, gt, options.mot);
  for (ObjectClass c : kAllClasses) {
    std::vector<GroundTruthRecord> g;
    for (const GroundTruthRecord& x : gt) {
      if (x.object_class == c) g.push_back(x);
    }
    if (g.empty()) continue;
    std::vector<MotHypothesis> h;
    for (const MotHypothesis& x : hyps) {
      if (x.object_class == c) h.push_back(x);
    }
    r.mot_by_class[c] = ClearMot(h, g, options.mot);
  }
  r.deviation = MaeDeviation(trajs, gt, options.deviation);
  return r;
}

json ToJson(const ClearMotResult& mot) {
  return {{"mota", mot.mota},
          {"motp", Optional(mot.motp)},
          {"motp_distance_m", Optional(mot.motp_distance)},
          {"gt", mot.gt},
          {"matches", mot.matches},
          {"fp", mot.fp},
          {"fn", mot.fn},
          {"idsw", mot.idsw}};
}

json ToJson(const DeviationGroup& group) {
  return {{"position_m", Optional(group.position)},
          {"velocity_mps", Optional(group.velocity)},
          {"acceleration_mps2", Optional(group.acceleration)},
          {"trajectories", group.trajectories},
          {"frames", group.frames}};
}

json ToJson(const EvalReport& report) {
  json ap = json::object();
  for (const auto& [c, v] : report.ap) ap[std::string(ToString(c))] = Optional(v);
  json per_class = json::object();
  for (const auto& [c, m] : report.mot_by_class) {
    per_class[std::string(ToString(c))] = ToJson(m);
  }
  return {{"ap", ap},
          {"clear_mot", ToJson(report.mot)},
          {"clear_mot_by_class", per_class},
          {"deviation",
           {{"all", ToJson(report.deviation.all)},
            {"vehicle", ToJson(report.deviation.vehicle)},
            {"vru", ToJson(report.deviation.vru)},
            {"selected_trajectories", report.deviation.selected},
            {"unmatched_trajectories", report.deviation.unmatched}}},
          {"selection",
           {{"min_length_m", report.selection.min_length},
            {"min_frames", report.selection.min_frames}}}};
}

std::vector<GroundTruthRecord> RestrictGt(std::span<const GroundTruthRecord> gt,
                                          double min, double max) {
  std::vector<GroundTruthRecord> out;
  for (const GroundTruthRecord& g : gt) {
    const double x = g.box.center.x(), y = g.box.center.y();
    if (x >= min && x <= max && y >= min && y <= max) out.push_back(g);
  }
  return out;
}

}  // namespace infralidar
