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

#include <gtest/gtest.h>

#include "infralidar/metrics.h"
#include "oracles.h"

namespace infralidar {
namespace {

GroundTruthRecord Gt(std::int64_t f, std::uint32_t id, double x, double y,
                     ObjectClass c = ObjectClass::kCar) {
  GroundTruthRecord g;
  g.frame_index = f;
  g.actor_id = id;
  g.object_class = c;
  g.box.center = {x, y, 0.8};
  g.box.length = 4.5;
  g.box.width = 1.8;
  g.box.height = 1.6;
  return g;
}

Detection Det(std::int64_t f, double x, double y, double score) {
  Detection d;
  d.frame_index = f;
  d.score = score;
  d.box.center = {x, y, 0.8};
  d.box.length = 4.5;
  d.box.width = 1.8;
  d.box.height = 1.6;
  return d;
}

TEST(HeatMapTest, GridAndEdges) {
  HeatMap m;
  EXPECT_EQ(m.width(), 28);
  EXPECT_EQ(m.CellOf(0.0, 0.0), std::make_pair(14, 14));
  EXPECT_EQ(m.CellOf(-56.0, -56.0), std::make_pair(0, 0));
  EXPECT_EQ(m.CellOf(56.0, 56.0), std::make_pair(27, 27));
  EXPECT_FALSE(m.CellOf(56.01, 0.0).has_value());
  EXPECT_TRUE(m.Add(1.0, 1.0, 2.0));
  EXPECT_TRUE(m.Add(3.9, 0.1, 4.0));
  EXPECT_FALSE(m.Add(100.0, 0.0, 1.0));
  EXPECT_DOUBLE_EQ(m.Mean(14, 14), 3.0);
  EXPECT_EQ(m.Count(14, 14), 2);
  EXPECT_EQ(m.outside(), 1);
  EXPECT_EQ(m.CellCenter(14, 14), Eigen::Vector2d(2.0, 2.0));
  HeatMap other;
  other.Add(0.5, 0.5, 6.0);
  m.Merge(other);
  EXPECT_DOUBLE_EQ(m.Mean(14, 14), 4.0);
  EXPECT_THROW(m.Merge(HeatMap(-10, 10, 4)), ValidationError);
}

TEST(HeatMapTest, CsvLayout) {
  HeatMap m(0.0, 4.0, 2.0);
  m.Add(3.0, 1.0, 0.5);
  EXPECT_EQ(m.ToCsv(), "0,0.5\n0,0\n");
}

TEST(CoverageTest, FullAndPartialObservations) {
  const std::vector<GroundTruthRecord> gt = {Gt(0, 1, 0, 0)};
  PointCloudFrame frame;
  // Points on the near (-x) face only: full width and height, no length.
  for (double y = -0.9; y <= 0.9 + 1e-9; y += 0.1) {
    for (double z = 0.0; z <= 1.6 + 1e-9; z += 0.1) {
      frame.points.push_back({-2.25, y, z, 0.5});
    }
  }
  const auto obs = ObserveBoxes(frame, gt);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].points, frame.points.size());
  EXPECT_NEAR(obs[0].dims.width, 1.8, 1e-9);
  EXPECT_NEAR(obs[0].dims.height, 1.6, 1e-9);
  EXPECT_NEAR(obs[0].dims.length, 0.0, 1e-9);
  CoverageMaps maps;
  AccumulateCoverage(frame, gt, maps);
  EXPECT_NEAR(maps.width.Mean(14, 14), 1.0, 1e-9);
  EXPECT_NEAR(maps.length.Mean(14, 14), 0.0, 1e-9);
  HeatMap counts;
  AccumulatePointCounts(frame, gt, counts);
  EXPECT_DOUBLE_EQ(counts.Sum(14, 14), static_cast<double>(frame.size()));
}

TEST(ApTest, HandComputedCurve) {
  // Ranked: TP, FP, TP over two GT boxes. Interpolated precision is 1 up
  // to recall 0.5 and 2/3 beyond.
  const std::vector<GroundTruthRecord> gt = {Gt(0, 1, 0, 0), Gt(1, 1, 0, 0)};
  const std::vector<Detection> dets = {Det(0, 0.1, 0, 0.9),
                                       Det(0, 20, 0, 0.8),
                                       Det(1, 0.0, 0.1, 0.7)};
  EXPECT_NEAR(*AveragePrecision(dets, gt, 0.5, 41), 103.0 / 123.0, 1e-12);
  EXPECT_NEAR(*AveragePrecision(dets, gt, 0.5, 11), 28.0 / 33.0, 1e-12);
  EXPECT_FALSE(AveragePrecision(dets, {}, 0.5).has_value());
  EXPECT_DOUBLE_EQ(*AveragePrecision({}, gt, 0.5), 0.0);
}

TEST(ApTest, DuplicateDetectionIsFalsePositive) {
  const std::vector<GroundTruthRecord> gt = {Gt(0, 1, 0, 0)};
  const std::vector<Detection> dets = {Det(0, 0, 0, 0.9), Det(0, 0, 0, 0.8)};
  // Precision 1 at recall 1, the duplicate comes after.
  EXPECT_DOUBLE_EQ(*AveragePrecision(dets, gt, 0.5), 1.0);
}

TEST(ApTest, ThresholdsByClass) {
  ApOptions opts;
  EXPECT_DOUBLE_EQ(opts.Threshold(ObjectClass::kTruck), 0.5);
  EXPECT_DOUBLE_EQ(opts.Threshold(ObjectClass::kBicycle), 0.25);
  const std::vector<GroundTruthRecord> gt = {Gt(0, 1, 0, 0)};
  const auto by_class = AveragePrecisionByClass({}, gt, opts);
  EXPECT_TRUE(by_class.at(ObjectClass::kCar).has_value());
  EXPECT_FALSE(by_class.at(ObjectClass::kPedestrian).has_value());
}

MotHypothesis Hyp(std::int64_t f, std::uint32_t id, double x, double y) {
  return {f, id, ObjectClass::kCar, {x, y}};
}

TEST(ClearMotTest, IdentitySwitchMissAndFalsePositive) {
  const std::vector<GroundTruthRecord> gt = {
      Gt(0, 1, 0, 0), Gt(0, 2, 10, 0), Gt(1, 1, 1, 0),
      Gt(1, 2, 11, 0), Gt(2, 1, 2, 0), Gt(2, 2, 12, 0)};
  const std::vector<MotHypothesis> hyps = {
      Hyp(0, 1, 0.1, 0), Hyp(0, 2, 10.1, 0), Hyp(1, 1, 1.1, 0),
      Hyp(1, 3, 30, 30), Hyp(2, 1, 2.1, 0), Hyp(2, 4, 12.1, 0)};
  const ClearMotResult r = ClearMot(hyps, gt, ClearMotOptions{});
  EXPECT_EQ(r.gt, 6);
  EXPECT_EQ(r.matches, 5);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.fn, 1);
  EXPECT_EQ(r.idsw, 1);
  EXPECT_DOUBLE_EQ(r.mota, 0.5);
  EXPECT_NEAR(*r.motp_distance, 0.1, 1e-9);
  EXPECT_NEAR(*r.motp, 1.0 - 0.1 / 2.0, 1e-9);
}

TEST(ClearMotTest, KeepsCorrespondenceOverCloserHypothesis) {
  // Frame 1 offers a closer hypothesis, but the existing pair is still in
  // the gate and must be kept.
  const std::vector<GroundTruthRecord> gt = {Gt(0, 1, 0, 0), Gt(1, 1, 0, 0)};
  const std::vector<MotHypothesis> hyps = {Hyp(0, 1, 0.5, 0), Hyp(1, 1, 1.5, 0),
                                           Hyp(1, 2, 0.1, 0)};
  const ClearMotResult r = ClearMot(hyps, gt, ClearMotOptions{});
  EXPECT_EQ(r.idsw, 0);
  EXPECT_EQ(r.fp, 1);
  EXPECT_NEAR(*r.motp_distance, 1.0, 1e-12);
}

TEST(ClearMotTest, VruGateIsTighter) {
  const std::vector<GroundTruthRecord> gt = {
      Gt(0, 1, 0, 0, ObjectClass::kPedestrian)};
  std::vector<MotHypothesis> hyps = {Hyp(0, 1, 1.5, 0)};
  hyps[0].object_class = ObjectClass::kPedestrian;
  const ClearMotResult r = ClearMot(hyps, gt, ClearMotOptions{});
  EXPECT_EQ(r.matches, 0);
  EXPECT_DOUBLE_EQ(r.mota, -1.0);
  EXPECT_FALSE(r.motp.has_value());
  EXPECT_THROW(ClearMot(hyps, {}, ClearMotOptions{}), ValidationError);
}

TEST(ClearMotTest, AgreesWithExhaustiveMatcher) {
  std::vector<GroundTruthRecord> gt;
  std::vector<MotHypothesis> hyps;
  for (int f = 0; f < 5; ++f) {
    for (int k = 0; k < 4; ++k) gt.push_back(Gt(f, k + 1, k * 1.2, 0));
    for (int k = 0; k < 4; ++k) {
      hyps.push_back(Hyp(f, (k + f) % 4 + 1, k * 1.2 + 0.7, 0.3));
    }
  }
  const ClearMotResult a = ClearMot(hyps, gt, ClearMotOptions{});
  const ClearMotResult b =
      ClearMot(hyps, gt, ClearMotOptions{}, oracle::ExhaustiveAssignment);
  EXPECT_EQ(a.matches, b.matches);
  EXPECT_EQ(a.idsw, b.idsw);
  EXPECT_DOUBLE_EQ(a.mota, b.mota);
}

TEST(DeviationTest, FrameWeightedMean) {
  constexpr double kRate = 20.0;
  auto gt = oracle::StraightGt(1, ObjectClass::kCar, 0, 100, 0.0, 8.0, kRate);
  const auto gt2 =
      oracle::StraightGt(2, ObjectClass::kBicycle, 0, 60, 20.0, 8.0, kRate);
  const std::vector<Trajectory> est = {
      oracle::OffsetTrajectory(gt, 11, 0.1, kRate),
      oracle::OffsetTrajectory(gt2, 12, 0.4, kRate)};
  gt.insert(gt.end(), gt2.begin(), gt2.end());
  const DeviationReport r = MaeDeviation(est, gt, DeviationOptions{});
  EXPECT_NEAR(*r.all.position, 34.0 / 160.0, 1e-12);
  EXPECT_EQ(r.all.frames, 160u);
  EXPECT_EQ(r.all.trajectories, 2u);
  EXPECT_NEAR(*r.vehicle.position, 0.1, 1e-12);
  EXPECT_NEAR(*r.vru.position, 0.4, 1e-12);
  EXPECT_NEAR(*r.all.velocity, 0.0, 1e-12);
}

TEST(DeviationTest, SelectionAndUnmatched) {
  constexpr double kRate = 20.0;
  const auto gt =
      oracle::StraightGt(1, ObjectClass::kCar, 0, 100, 0.0, 8.0, kRate);
  const std::vector<GroundTruthRecord> first50(gt.begin(), gt.begin() + 50);
  const std::vector<Trajectory> est = {
      oracle::OffsetTrajectory(first50, 1, 0.0, kRate),  // 50 frames: dropped
      oracle::OffsetTrajectory(gt, 2, 5.0, kRate)};      // too far: unmatched
  const DeviationReport r = MaeDeviation(est, gt, DeviationOptions{});
  EXPECT_EQ(r.selected, 1u);
  EXPECT_EQ(r.unmatched, 1u);
  EXPECT_FALSE(r.all.position.has_value());
}

TEST(EvaluateTest, PerfectTrajectoriesScorePerfectly) {
  constexpr double kRate = 20.0;
  auto gt = oracle::StraightGt(1, ObjectClass::kCar, 0, 80, 0.0, 8.0, kRate);
  const auto gt2 =
      oracle::StraightGt(2, ObjectClass::kTruck, 0, 80, 10.0, 6.0, kRate);
  gt.insert(gt.end(), gt2.begin(), gt2.end());
  std::vector<Trajectory> est = {
      oracle::OffsetTrajectory(std::span(gt).first(80), 1, 0.0, kRate),
      oracle::OffsetTrajectory(std::span(gt).last(80), 2, 0.0, kRate)};
  std::vector<Detection> dets;
  for (const GroundTruthRecord& g : gt) {
    Detection d;
    d.frame_index = g.frame_index;
    d.object_class = g.object_class;
    d.score = 1.0;
    d.box = g.box;
    dets.push_back(d);
  }
  const EvalReport r = Evaluate(dets, est, gt, EvalOptions{});
  EXPECT_DOUBLE_EQ(r.mot.mota, 1.0);
  EXPECT_EQ(r.mot.idsw, 0);
  EXPECT_DOUBLE_EQ(*r.deviation.all.position, 0.0);
  EXPECT_DOUBLE_EQ(*r.ap.at(ObjectClass::kCar), 1.0);
  EXPECT_DOUBLE_EQ(*r.ap.at(ObjectClass::kTruck), 1.0);
  EXPECT_EQ(r.mot_by_class.size(), 2u);
  const nlohmann::json j = ToJson(r);
  EXPECT_EQ(j["clear_mot"]["mota"], 1.0);
  EXPECT_EQ(j["ap"]["pedestrian"], "n/a");
  EXPECT_EQ(j["deviation"]["all"]["frames"], 160);
}

TEST(SyncErrorTest, SpeedTimesOffset) {
  EXPECT_NEAR(SyncError(KmhToMs(23.0), 0.025), 0.1597, 1e-4);
  EXPECT_DOUBLE_EQ(SyncError(10.0, 0.0), 0.0);
  EXPECT_THROW(SyncError(-1.0, 0.1), ValidationError);
}

TEST(RestrictGtTest, ClosedSquare) {
  const std::vector<GroundTruthRecord> gt = {Gt(0, 1, 56, 0), Gt(0, 2, 56.1, 0),
                                             Gt(0, 3, -3, -56)};
  const auto r = RestrictGt(gt, -56, 56);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].actor_id, 3u);
}

}  // namespace
}  // namespace infralidar
