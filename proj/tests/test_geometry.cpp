/*
 * Copyright 2026 The epialign Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "oracles.hpp"

using namespace epialign;

namespace {

CameraIntrinsics TestIntrinsics() {
  CameraIntrinsics k;
  k.fx = 520.0;
  k.fy = 510.0;
  k.cx = 319.5;
  k.cy = 239.5;
  k.width = 640;
  k.height = 480;
  return k;
}

CameraPose RandomPose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  CameraPose pose;
  pose.R = oracle::RandomRotation(rng);
  pose.t = {u(rng), u(rng), u(rng)};
  return pose;
}

}  // namespace

TEST_CASE("rot6d decode of canonical encodings") {
  Vector6d dr;
  dr << 1, 0, 0, 0, 1, 0;
  CHECK((Rot6dDecode(dr) - Eigen::Matrix3d::Identity()).norm() == 0.0);
  dr << 2, 0, 0, 0, 3, 0;
  CHECK((Rot6dDecode(dr) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
}

TEST_CASE("rot6d decode matches hand Gram-Schmidt") {
  Vector6d dr;
  dr << 1, 1, 0, 0, 1, 0;
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3d expected;
  expected << h, -h, 0, h, h, 0, 0, 0, 1;
  const Eigen::Matrix3d R = Rot6dDecode(dr);
  CHECK((R - expected).norm() < 1e-15);
  CHECK(std::abs(R.determinant() - 1.0) < 1e-15);
  CHECK(IsRotation(R));
}

TEST_CASE("rot6d decode rejects degenerate input") {
  Vector6d dr;
  dr << 0, 0, 0, 0, 1, 0;
  CHECK_THROWS_AS(Rot6dDecode(dr), Error);
  dr << 1, 0, 0, 2, 0, 0;
  try {
    Rot6dDecode(dr);
    FAIL("expected DegenerateRotation6D");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateRotation6D);
  }
}

TEST_CASE("rot6d encode") {
  Vector6d expected;
  expected << 1, 0, 0, 0, 1, 0;
  CHECK((Rot6dEncode(Eigen::Matrix3d::Identity()) - expected).norm() == 0.0);
  Eigen::Matrix3d rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  expected << 0, 1, 0, -1, 0, 0;
  CHECK((Rot6dEncode(rz) - expected).norm() == 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix3d R = oracle::RandomRotation(rng);
    CHECK((Rot6dDecode(Rot6dEncode(R)) - R).norm() < 1e-12);
  }
}

TEST_CASE("apply residual") {
  std::mt19937_64 rng(11);
  const CameraPose pose = RandomPose(rng);
  const CameraPose same = ApplyResidual(pose, PoseResidual::Identity());
  CHECK((same.R - pose.R).norm() == 0.0);
  CHECK((same.t - pose.t).norm() == 0.0);

  PoseResidual shift = PoseResidual::Identity();
  shift.dt = {1, 2, 3};
  const CameraPose moved = ApplyResidual(CameraPose{}, shift);
  CHECK((moved.t - Eigen::Vector3d(1, 2, 3)).norm() == 0.0);
  CHECK((moved.R - Eigen::Matrix3d::Identity()).norm() == 0.0);

  // The relative rotation error between the refined and original pose equals
  // the angle of the decoded residual rotation.
  for (int trial = 0; trial < 50; ++trial) {
    PoseResidual r;
    std::normal_distribution<double> n(0.0, 0.3);
    r.dr << 1 + n(rng), n(rng), n(rng), n(rng), 1 + n(rng), n(rng);
    const CameraPose base = RandomPose(rng);
    const CameraPose refined = ApplyResidual(base, r);
    const Eigen::Matrix3d D = Rot6dDecode(r.dr);
    const double angle = std::acos(std::clamp((D.trace() - 1.0) / 2.0, -1.0, 1.0));
    CHECK(std::abs(RotationAngleDeg(refined.R * base.R.transpose()) -
                   angle * 180.0 / M_PI) < 1e-6);
  }
}

TEST_CASE("relative pose blocks") {
  std::mt19937_64 rng(3);
  const CameraPose p = RandomPose(rng);
  const RelativePose self = ComputeRelativePose(p, p);
  CHECK((self.dR - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK(self.dt.norm() < 1e-14);

  for (int trial = 0; trial < 50; ++trial) {
    const CameraPose a = RandomPose(rng);
    const CameraPose b = RandomPose(rng);
    const RelativePose ab = ComputeRelativePose(a, b);
    const Eigen::Matrix4d E = oracle::RelativeHomogeneous(a, b);
    CHECK((ab.dR - E.topLeftCorner<3, 3>()).norm() < 1e-12);
    CHECK((ab.dt - E.topRightCorner<3, 1>()).norm() < 1e-12);
    CHECK(IsRotation(ab.dR));

    // Swapping the arguments transposes the rotation block, but the
    // translation blocks R_i^T (t_j - t_i) and R_j^T (t_i - t_j) are not
    // negatives of each other.
    const RelativePose ba = ComputeRelativePose(b, a);
    CHECK((ba.dR - ab.dR.transpose()).norm() < 1e-12);
    CHECK((ba.dt + ab.dt).norm() > 1e-6);
    CHECK((ba.dt + ab.dR.transpose() * ab.dt).norm() < 1e-12);
  }
}

TEST_CASE("fundamental matrix agrees with projection-matrix construction") {
  std::mt19937_64 rng(5);
  const CameraIntrinsics k = TestIntrinsics();
  for (int trial = 0; trial < 50; ++trial) {
    const CameraPose a = RandomPose(rng);
    const CameraPose b = RandomPose(rng);
    const Eigen::Matrix3d F = FundamentalMatrix(k, a, k, b);
    oracle::CameraL ca{k.K().cast<long double>(), a.R.cast<long double>(),
                       a.t.cast<long double>()};
    oracle::CameraL cb{k.K().cast<long double>(), b.R.cast<long double>(),
                       b.t.cast<long double>()};
    const Eigen::Matrix3d G = oracle::FundamentalFromProjections(ca, cb).cast<double>();
    CHECK(std::min((F - G).norm(), (F + G).norm()) < 1e-9);
    CHECK(std::abs(F.norm() - 1.0) < 1e-12);
    CHECK(std::abs(F.determinant()) < 1e-12);
  }
}

TEST_CASE("fundamental matrix rejects coincident centers") {
  const CameraIntrinsics k = TestIntrinsics();
  CameraPose a;
  CameraPose b;
  b.R = AxisAngleToRotation(Eigen::Vector3d(0, 0.3, 0));
  try {
    FundamentalMatrix(k, a, k, b);
    FAIL("expected DegenerateBaseline");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateBaseline);
  }
}

TEST_CASE("epipolar distance vanishes on exact correspondences") {
  std::mt19937_64 rng(9);
  const CameraIntrinsics k = TestIntrinsics();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CameraPose a;
  a.t = {0, 0, 5};
  CameraPose b = CameraPose::FromCenter(AxisAngleToRotation({0, 0.2, 0}),
                                        Eigen::Vector3d(-1.0, 0.1, -4.8));
  const Eigen::Matrix3d F = FundamentalMatrix(k, a, k, b);
  for (int n = 0; n < 100; ++n) {
    const Eigen::Vector3d X(u(rng), u(rng), u(rng));
    const Eigen::Vector2d x = Project(X, k, a);
    const Eigen::Vector2d xp = Project(X, k, b);
    CHECK(EpipolarDistance(x, xp, F, ResidualMode::kGeometric) < 1e-9);
    CHECK(EpipolarDistance(x, xp, F, ResidualMode::kAlgebraic) < 1e-9);
  }
}

TEST_CASE("geometric epipolar distance is the pixel distance to the line") {
  Eigen::Matrix3d F;
  F << 0, 0, 0, 0, 0, -1, 0, 1, 0;  // x' lies on the row of x
  const Eigen::Vector2d x(10.0, 20.0);
  CHECK(EpipolarDistance(x, {3.0, 23.0}, F) == doctest::Approx(3.0).epsilon(1e-15));
  // Algebraic form scales with the line normal.
  CHECK(EpipolarDistance(x, {3.0, 23.0}, 2.0 * F, ResidualMode::kAlgebraic) ==
        doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("geometric epipolar distance rejects a vanishing line normal") {
  Eigen::Matrix3d F = Eigen::Matrix3d::Zero();
  F(2, 2) = 1.0;
  try {
    EpipolarDistance({1.0, 1.0}, {2.0, 2.0}, F);
    FAIL("expected DegenerateEpipolarLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateEpipolarLine);
  }
  CHECK(EpipolarDistance({1.0, 1.0}, {2.0, 2.0}, F, ResidualMode::kAlgebraic) == 1.0);
}

TEST_CASE("project and unproject are inverse") {
  std::mt19937_64 rng(13);
  const CameraIntrinsics k = TestIntrinsics();
  std::uniform_real_distribution<double> px(0.0, 639.0), depth(0.5, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const CameraPose pose = RandomPose(rng);
    const Eigen::Vector2d pixel(px(rng), px(rng) * 0.75);
    const double z = depth(rng);
    const Eigen::Vector3d X = Unproject(pixel, z, k, pose);
    double back_depth = 0.0;
    CHECK((Project(X, k, pose, &back_depth) - pixel).norm() < 1e-9);
    CHECK(std::abs(back_depth - z) < 1e-12);
  }
  CHECK_THROWS_AS(Unproject({1.0, 1.0}, 0.0, k, CameraPose{}), Error);
  CHECK_THROWS_AS(Unproject({1.0, 1.0}, std::nan(""), k, CameraPose{}), Error);
}

TEST_CASE("camera center and intrinsics invariants") {
  std::mt19937_64 rng(17);
  const CameraPose pose = RandomPose(rng);
  CHECK((pose.R * pose.Center() + pose.t).norm() < 1e-12);
  const CameraPose rebuilt = CameraPose::FromCenter(pose.R, pose.Center());
  CHECK((rebuilt.t - pose.t).norm() < 1e-12);

  CameraIntrinsics k = TestIntrinsics();
  CHECK(k.IsValid());
  CHECK((k.K() * k.KInverse() - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  k.cx = 640.0;
  CHECK_FALSE(k.IsValid());
  k = TestIntrinsics();
  k.fx = 0.0;
  CHECK_FALSE(k.IsValid());
}

TEST_CASE("rotation predicate") {
  CHECK(IsRotation(Eigen::Matrix3d::Identity()));
  CHECK_FALSE(IsRotation(-Eigen::Matrix3d::Identity()));
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  R(0, 1) = 1e-6;
  CHECK_FALSE(IsRotation(R));
}

TEST_CASE("angles") {
  CHECK(RotationAngleDeg(Eigen::Matrix3d::Identity()) == 0.0);
  CHECK(RotationAngleDeg(AxisAngleToRotation({0, 0, M_PI / 2})) ==
        doctest::Approx(90.0).epsilon(1e-14));
  CHECK(RotationAngleDeg(AxisAngleToRotation({1e-9, 0, 0})) ==
        doctest::Approx(1e-9 * 180.0 / M_PI).epsilon(1e-6));
  CHECK(VectorAngleDeg({1, 0, 0}, {0, 2, 0}) == doctest::Approx(90.0));
  CHECK(VectorAngleDeg({1, 0, 0}, {-3, 0, 0}) == doctest::Approx(180.0));
  CHECK(VectorAngleDeg({0, 0, 0}, {1, 0, 0}) == 0.0);
}

TEST_CASE("residual mode names") {
  CHECK(ParseResidualMode("geometric") == ResidualMode::kGeometric);
  CHECK(ParseResidualMode("algebraic") == ResidualMode::kAlgebraic);
  CHECK(ResidualModeName(ResidualMode::kAlgebraic) == "algebraic");
  CHECK_THROWS_AS(ParseResidualMode("sampson"), Error);
}
