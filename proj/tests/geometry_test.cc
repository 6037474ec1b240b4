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
#include <random>

#include <gtest/gtest.h>

#include "infralidar/csv.h"
#include "infralidar/frame_io.h"
#include "infralidar/geometry.h"
#include "infralidar/random.h"
#include "oracles.h"

namespace infralidar {
namespace {

constexpr double kPi = std::numbers::pi;

OrientedBox Box(double x, double y, double l, double w, double yaw) {
  OrientedBox b;
  b.center = {x, y, 0.5};
  b.length = l;
  b.width = w;
  b.height = 1.0;
  b.yaw = yaw;
  return b;
}

TEST(PoseTest, ComposeWithInverseIsIdentity) {
  const Pose p = Pose::FromYawPitchRoll({1, 2, 3}, 0.3, -0.2, 0.1);
  const Eigen::Vector3d x(4, -5, 6);
  const Pose id = Compose(p, p.Inverse());
  EXPECT_LT((id.Apply(x) - x).norm(), 1e-12);
  EXPECT_LT((p.Inverse().Apply(p.Apply(x)) - x).norm(), 1e-12);
}

TEST(PoseTest, PositivePitchTipsXAxisDown) {
  const Pose p = Pose::FromYawPitchRoll({0, 0, 0}, 0.0, 0.2, 0.0);
  EXPECT_LT(p.Apply({1, 0, 0}).z(), 0.0);
}

TEST(PoseTest, ComposeAppliesRightOperandFirst) {
  const Pose a = Pose::FromYawPitchRoll({1, 0, 0}, kPi / 2, 0, 0);
  const Pose b = Pose::FromYawPitchRoll({0, 2, 0}, 0, 0, 0);
  const Eigen::Vector3d x(1, 1, 1);
  EXPECT_LT((Compose(a, b).Apply(x) - a.Apply(b.Apply(x))).norm(), 1e-12);
}

TEST(PoseTest, ValidateRejectsNonFinite) {
  const Pose p(Eigen::Quaterniond::Identity(), {NAN, 0, 0});
  EXPECT_THROW(p.Validate(), ValidationError);
}

TEST(WrapAngleTest, RangeIsHalfOpen) {
  EXPECT_DOUBLE_EQ(WrapAngle(kPi), kPi);
  EXPECT_DOUBLE_EQ(WrapAngle(-kPi), kPi);
  EXPECT_NEAR(WrapAngle(3 * kPi + 0.1), -kPi + 0.1, 1e-12);
}

TEST(ObjectClassTest, NamesRoundTrip) {
  for (ObjectClass c : kAllClasses) {
    EXPECT_EQ(ParseObjectClass(ToString(c)), c);
  }
  EXPECT_FALSE(ParseObjectClass("bus").has_value());
  EXPECT_TRUE(IsVehicle(ObjectClass::kTruck));
  EXPECT_TRUE(IsVru(ObjectClass::kMotorcycle));
}

TEST(BevIouTest, IdenticalBoxesGiveOne) {
  const OrientedBox a = Box(1, 2, 4, 2, 0.7);
  EXPECT_NEAR(BevIou(a, a), 1.0, 1e-12);
}

TEST(BevIouTest, DisjointBoxesGiveZero) {
  EXPECT_EQ(BevIou(Box(0, 0, 2, 2, 0), Box(5, 0, 2, 2, 0.3)), 0.0);
}

TEST(BevIouTest, HalfShiftedSquares) {
  // Overlap 1 x 2 of two 2 x 2 squares: 2 / (4 + 4 - 2).
  EXPECT_NEAR(BevIou(Box(0, 0, 2, 2, 0), Box(1, 0, 2, 2, 0)), 1.0 / 3.0, 1e-12);
}

TEST(BevIouTest, SquareRotatedByNinetyDegreesIsUnchanged) {
  EXPECT_NEAR(BevIou(Box(0, 0, 4, 2, 0), Box(0, 0, 2, 4, kPi / 2)), 1.0, 1e-12);
}

TEST(BevIouTest, ZeroAreaThrows) {
  EXPECT_THROW(BevIou(Box(0, 0, 0, 2, 0), Box(0, 0, 2, 2, 0)), ValidationError);
}

TEST(BevIouTest, AgreesWithMonteCarlo) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.5, 4), yaw(-kPi, kPi), s(-1.5, 1.5);
  for (int i = 0; i < 10; ++i) {
    const OrientedBox a = Box(0, 0, d(rng), d(rng), yaw(rng));
    const OrientedBox b = Box(s(rng), s(rng), d(rng), d(rng), yaw(rng));
    EXPECT_NEAR(BevIou(a, b), oracle::MonteCarloBevIou(a, b, 200000, i), 0.01);
  }
}

TEST(PolygonTest, AreaAndClipping) {
  const std::vector<Eigen::Vector2d> sq = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const std::vector<Eigen::Vector2d> sq2 = {{1, 1}, {3, 1}, {3, 3}, {1, 3}};
  EXPECT_DOUBLE_EQ(PolygonArea(sq), 4.0);
  EXPECT_NEAR(PolygonArea(ClipConvexPolygon(sq, sq2)), 1.0, 1e-12);
}

TEST(BoxTest, ContainsIsClosed) {
  const OrientedBox b = Box(0, 0, 2, 2, 0);
  EXPECT_TRUE(b.Contains({1, 1, 1}));
  EXPECT_TRUE(b.Contains({0, 0, 0}));
  EXPECT_FALSE(b.Contains({1.01, 0, 0.5}));
}

TEST(BoxTest, MinBoxDimsClampsToGt) {
  const OrientedBox gt = Box(0, 0, 4, 2, kPi / 2);
  const std::vector<Point> pts = {{0, -1.5, 0.1, 1}, {0.5, 1.5, 0.9, 1},
                                  {0, 5, 0.5, 1}};
  const BoxDims d = MinBoxDims(pts, gt);
  EXPECT_NEAR(d.length, 4.0, 1e-12);  // 6.5 m clamped
  EXPECT_NEAR(d.width, 0.5, 1e-12);
  EXPECT_NEAR(d.height, 0.8, 1e-12);
  EXPECT_EQ(MinBoxDims(std::span<const Point>(pts).first(1), gt).length, 0.0);
}

TEST(PointGridTest, CandidatesCoverExactQuery) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  std::vector<Point> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back({u(rng), u(rng), 0, 1});
  const PointGrid2d grid(pts, 2.0);
  std::vector<std::size_t> cand;
  grid.Candidates(-3, -1, 4, 5, &cand);
  std::set<std::size_t> got(cand.begin(), cand.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].x >= -3 && pts[i].x <= 4 && pts[i].y >= -1 && pts[i].y <= 5) {
      EXPECT_TRUE(got.contains(i)) << i;
    }
  }
}

TEST(KeyedRngTest, DrawsArePureFunctionsOfKey) {
  const KeyedRng a(3), b(3), c(4);
  EXPECT_EQ(a.Bits(1, 2), b.Bits(1, 2));
  EXPECT_NE(a.Bits(1, 2), c.Bits(1, 2));
  EXPECT_NE(a.Bits(1, 2), a.Bits(1, 3));
  const double u = a.Uniform(9, 9);
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(CsvTest, DoublesRoundTripBitExactly) {
  const std::filesystem::path p =
      std::filesystem::temp_directory_path() / "infralidar_geometry_frame.csv";
  PointCloudFrame f;
  f.points = {{0.1, -1e-17, 123456.789012345, 0.3},
              {1.0 / 3.0, 2.0 / 7.0, -5e300, 0.0}};
  WriteFrameCsv(p, f);
  const PointCloudFrame g = ReadFrameCsv(p, 4, 7, 0.35);
  ASSERT_EQ(g.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(g.points[i].x, f.points[i].x);
    EXPECT_EQ(g.points[i].y, f.points[i].y);
    EXPECT_EQ(g.points[i].z, f.points[i].z);
    EXPECT_EQ(g.points[i].intensity, f.points[i].intensity);
  }
  EXPECT_EQ(g.origin(1).sensor_id, 4u);
  EXPECT_EQ(g.origin(1).ordinal, 1u);
  std::filesystem::remove(p);
}

TEST(CsvTest, MalformedRowReportsFileAndLine) {
  const std::filesystem::path p =
      std::filesystem::temp_directory_path() / "infralidar_bad_frame.csv";
  WriteFile(p, "x,y,z,intensity\n1,2,3,4\n1,2,oops,4\n");
  try {
    ReadFrameCsv(p, 1, 0, 0.0);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(p.string() + ":3"), std::string::npos)
        << e.what();
  }
  WriteFile(p, "a,b\n");
  EXPECT_THROW(ReadFrameCsv(p, 1, 0, 0.0), IoError);
  std::filesystem::remove(p);
}

TEST(FrameIoTest, FileNamePattern) {
  EXPECT_EQ(FrameFileName(3, 42), "s3_f000042.csv");
}

}  // namespace
}  // namespace infralidar
