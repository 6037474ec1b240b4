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
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "infralidar/tracker.h"

namespace infralidar {
namespace {

Detection Det(std::int64_t frame, double x, double y,
              ObjectClass c = ObjectClass::kCar, double yaw = 0.0) {
  Detection d;
  d.frame_index = frame;
  d.object_class = c;
  d.score = 0.9;
  d.box.center = {x, y, 0.8};
  d.box.length = 4.5;
  d.box.width = 1.8;
  d.box.height = 1.6;
  d.box.yaw = yaw;
  d.num_points = 100;
  return d;
}

TrackState Fresh(const TrackerParams& params, double x = 0.0) {
  TrackState t;
  t.x.head<7>() << x, 0, 0.8, 0, 4.5, 1.8, 1.6;
  t.p = params.initial_covariance.asDiagonal();
  return t;
}

TEST(KalmanTest, PredictPropagatesCovariance) {
  TrackerParams params;
  TrackState t = Fresh(params);
  t.x(7) = 2.0;
  Predict(t, 0.5, params);
  EXPECT_DOUBLE_EQ(t.x(0), 1.0);
  const double p0 = params.initial_covariance(0);
  const double pv = params.initial_covariance(7);
  EXPECT_NEAR(t.p(0, 0), p0 + 0.25 * pv + 0.5 * params.process_noise(0),
              1e-12);
  EXPECT_NEAR(t.p(0, 7), 0.5 * pv, 1e-12);
  EXPECT_EQ(t.time_since_update, 1);
  EXPECT_THROW(Predict(t, 0.0, params), ValidationError);
}

TEST(KalmanTest, UpdateOnUncorrelatedStateIsScalarGain) {
  TrackerParams params;
  TrackState t = Fresh(params);
  Update(t, Det(0, 1.0, 0.0), params);
  const double p = params.initial_covariance(0);
  const double r = params.measurement_noise(0);
  EXPECT_NEAR(t.x(0), p / (p + r), 1e-12);
  EXPECT_NEAR(t.p(0, 0), p * r / (p + r), 1e-12);
  EXPECT_EQ(t.hits, 1);
  EXPECT_EQ(t.time_since_update, 0);
}

TEST(KalmanTest, OppositeYawIsFlipped) {
  TrackerParams params;
  TrackState t = Fresh(params);
  t.x(3) = 0.1;
  Update(t, Det(0, 0, 0, ObjectClass::kCar, 0.1 + std::numbers::pi), params);
  EXPECT_NEAR(t.x(3), 0.1, 1e-9);
}

TEST(AssociateTest, GatesClassesAndDistance) {
  TrackerParams params;
  std::vector<TrackState> tracks = {Fresh(params, 0.0), Fresh(params, 10.0)};
  tracks[1].object_class = ObjectClass::kTruck;
  const std::vector<Detection> dets = {Det(0, 10.2, 0), Det(0, 0.5, 0),
                                       Det(0, 30, 0)};
  const AssociationResult a = Associate(tracks, dets, params);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0], (std::pair<std::size_t, std::size_t>(0, 1)));
  EXPECT_EQ(a.unmatched_tracks, (std::vector<std::size_t>{1}));
  EXPECT_EQ(a.unmatched_dets, (std::vector<std::size_t>{0, 2}));
}

TEST(AssociateTest, IouMetric) {
  TrackerParams params;
  params.metric = MatchMetric::kBevIou;
  params.iou_threshold = 0.3;
  const std::vector<TrackState> tracks = {Fresh(params, 0.0)};
  const std::vector<Detection> near = {Det(0, 1.0, 0)};
  const std::vector<Detection> far = {Det(0, 4.0, 0)};
  EXPECT_EQ(Associate(tracks, near, params).matches.size(), 1u);
  EXPECT_EQ(Associate(tracks, far, params).matches.size(), 0u);
}

TEST(TrackerTest, ConstantVelocityTargetKeepsOneId) {
  TrackerParams params;
  std::vector<Detection> dets;
  for (int f = 0; f < 40; ++f) dets.push_back(Det(f, -20 + 0.5 * f, 3.0));
  const auto recs = RunTracker(dets, 0, 40, params);
  ASSERT_EQ(recs.size(), 40u);
  for (const TrackRecord& r : recs) EXPECT_EQ(r.track_id, 1u);
  EXPECT_NEAR(recs.back().velocity.x(), 10.0, 0.2);
  EXPECT_NEAR(recs.back().box.center.x(), -0.5, 0.05);
}

TEST(TrackerTest, BirthNeedsMinHitsAndDeathFollowsMaxAge) {
  TrackerParams params;
  Tracker tracker(params);
  // Confirmation is waived for the first min_hits frames.
  for (int f = 0; f < 3; ++f) {
    const std::vector<Detection> d = {Det(f, 0, 0)};
    EXPECT_EQ(tracker.Step(f, d).size(), 1u);
  }
  // A new object appearing later is reported only from its third hit.
  for (int f = 3; f < 6; ++f) {
    const std::vector<Detection> d = {Det(f, 0, 0), Det(f, 20, 0)};
    EXPECT_EQ(tracker.Step(f, d).size(), f < 5 ? 1u : 2u) << f;
  }
  // Missed for max_age frames the tracks survive, one more and they die.
  for (int f = 6; f < 9; ++f) EXPECT_TRUE(tracker.Step(f, {}).empty());
  EXPECT_TRUE(tracker.tracks().empty());
}

TEST(TrackerTest, CoastedTrackIsReacquired) {
  TrackerParams params;
  Tracker tracker(params);
  for (int f = 0; f < 10; ++f) {
    if (f == 5 || f == 6) {
      tracker.Step(f, {});
      continue;
    }
    const std::vector<Detection> d = {Det(f, 0.4 * f, 0)};
    const auto recs = tracker.Step(f, d);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].track_id, 1u);
  }
}

TEST(TrackerTest, RejectsOutOfOrderFrames) {
  Tracker tracker(TrackerParams{});
  tracker.Step(3, {});
  EXPECT_THROW(tracker.Step(3, {}), ValidationError);
  const std::vector<Detection> d = {Det(5, 0, 0)};
  EXPECT_THROW(tracker.Step(4, d), ValidationError);
  TrackerParams bad;
  bad.min_hits = 0;
  EXPECT_THROW(Tracker{bad}, ValidationError);
}

TEST(TracksCsvTest, RoundTripWithPoints) {
  TrackRecord r;
  r.frame_index = 7;
  r.track_id = 12;
  r.object_class = ObjectClass::kPedestrian;
  r.box.center = {1.25, 2.5, 0.9};
  r.box.length = 0.5;
  r.box.width = 0.45;
  r.box.height = 1.8;
  r.box.yaw = -0.7;
  r.velocity = {1.0 / 3.0, 0.0, 0.0};
  r.num_points = 42;
  const auto dir = std::filesystem::temp_directory_path();
  WriteTracksCsv(dir / "infralidar_tracks.csv", std::vector<TrackRecord>{r});
  WriteTrackPointsCsv(dir / "infralidar_track_points.csv",
                      std::vector<TrackRecord>{r});
  const auto back = ReadTracksCsv(dir / "infralidar_tracks.csv",
                                  dir / "infralidar_track_points.csv");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].track_id, 12u);
  EXPECT_EQ(back[0].velocity, r.velocity);
  EXPECT_EQ(back[0].num_points, 42u);
  EXPECT_EQ(back[0].object_class, ObjectClass::kPedestrian);
}

}  // namespace
}  // namespace infralidar
