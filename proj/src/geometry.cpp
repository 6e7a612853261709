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

#include "geometry.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "error.hpp"

namespace epialign {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateNorm = 1e-12;

double RadToDeg(double rad) { return rad * 180.0 / kPi; }

}  // namespace

Eigen::Matrix3d CameraIntrinsics::K() const {
  Eigen::Matrix3d K;
  K << fx, 0.0, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return K;
}

Eigen::Matrix3d CameraIntrinsics::KInverse() const {
  Eigen::Matrix3d K_inv;
  K_inv << 1.0 / fx, 0.0, -cx / fx,
           0.0, 1.0 / fy, -cy / fy,
           0.0, 0.0, 1.0;
  return K_inv;
}

bool CameraIntrinsics::IsValid() const {
  return std::isfinite(fx) && std::isfinite(fy) && fx > 0.0 && fy > 0.0 &&
         width > 0 && height > 0 && cx >= 0.0 && cx < width && cy >= 0.0 &&
         cy < height;
}

void CameraIntrinsics::Validate() const {
  if (IsValid()) return;
  std::ostringstream msg;
  msg << "invalid intrinsics (fx=" << fx << ", fy=" << fy << ", cx=" << cx
      << ", cy=" << cy << ", width=" << width << ", height=" << height
      << "): need fx, fy > 0 and the principal point inside the image";
  throw Error(ErrorCode::kInvalidArgument, msg.str());
}

CameraPose CameraPose::FromCenter(const Eigen::Matrix3d& R,
                                  const Eigen::Vector3d& center) {
  return CameraPose{R, -R * center};
}

ResidualMode ParseResidualMode(const std::string& name) {
  if (name == "geometric") return ResidualMode::kGeometric;
  if (name == "algebraic") return ResidualMode::kAlgebraic;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown residual mode '" + name +
                  "' (expected 'geometric' or 'algebraic')");
}

std::string ResidualModeName(ResidualMode mode) {
  return mode == ResidualMode::kGeometric ? "geometric" : "algebraic";
}

bool IsRotation(const Eigen::Matrix3d& R, double tolerance) {
  if (!R.allFinite()) return false;
  const double orthogonality =
      (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
  return orthogonality <= tolerance && std::abs(R.determinant() - 1.0) <= tolerance;
}

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return S;
}

double RotationAngleDeg(const Eigen::Matrix3d& R) {
  // atan2 keeps precision near 0 and 180 degrees where acos does not.
  const Eigen::Vector3d axis(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0),
                             R(1, 0) - R(0, 1));
  const double sin_angle = 0.5 * axis.norm();
  const double cos_angle = 0.5 * (R.trace() - 1.0);
  return RadToDeg(std::atan2(sin_angle, cos_angle));
}

double VectorAngleDeg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  return RadToDeg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

Eigen::Matrix3d AxisAngleToRotation(const Eigen::Vector3d& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Eigen::Matrix3d Rot6dDecode(const Vector6d& dr) {
  const Eigen::Vector3d a1 = dr.head<3>();
  const Eigen::Vector3d a2 = dr.tail<3>();
  const double n1 = a1.norm();
  if (!(n1 > kDegenerateNorm)) {
    throw Error(ErrorCode::kDegenerateRotation6D,
                "first 6D column has vanishing norm");
  }
  const Eigen::Vector3d b1 = a1 / n1;
  const Eigen::Vector3d u = a2 - b1.dot(a2) * b1;
  const double nu = u.norm();
  if (!(nu > kDegenerateNorm * std::max(1.0, a2.norm()))) {
    throw Error(ErrorCode::kDegenerateRotation6D,
                "6D columns are parallel or the second column vanishes");
  }
  const Eigen::Vector3d b2 = u / nu;
  Eigen::Matrix3d R;
  R.col(0) = b1;
  R.col(1) = b2;
  R.col(2) = b1.cross(b2);
  return R;
}

Vector6d Rot6dEncode(const Eigen::Matrix3d& R) {
  Vector6d dr;
  dr.head<3>() = R.col(0);
  dr.tail<3>() = R.col(1);
  return dr;
}

CameraPose ApplyResidual(const CameraPose& pose, const PoseResidual& residual) {
  return CameraPose{Rot6dDecode(residual.dr) * pose.R, pose.t + residual.dt};
}

RelativePose ComputeRelativePose(const CameraPose& pose_i,
                                 const CameraPose& pose_j) {
  return RelativePose{pose_i.R.transpose() * pose_j.R,
                      pose_i.R.transpose() * (pose_j.t - pose_i.t)};
}

Eigen::Matrix3d FundamentalMatrix(const CameraIntrinsics& intrinsics_i,
                                  const CameraPose& pose_i,
                                  const CameraIntrinsics& intrinsics_j,
                                  const CameraPose& pose_j) {
  if ((pose_i.Center() - pose_j.Center()).norm() <= kDegenerateNorm) {
    throw Error(ErrorCode::kDegenerateBaseline,
                "camera centers coincide; epipolar geometry is undefined");
  }
  const Eigen::Matrix3d R_ij = pose_j.R * pose_i.R.transpose();
  const Eigen::Vector3d t_ij = pose_j.t - R_ij * pose_i.t;
  const Eigen::Matrix3d F = intrinsics_j.KInverse().transpose() * Skew(t_ij) *
                            R_ij * intrinsics_i.KInverse();
  return F / F.norm();
}

double EpipolarDistance(const Eigen::Vector2d& x, const Eigen::Vector2d& x_prime,
                        const Eigen::Matrix3d& F, ResidualMode mode) {
  const Eigen::Vector3d line = F * x.homogeneous();
  const double algebraic = std::abs(x_prime.homogeneous().dot(line));
  if (mode == ResidualMode::kAlgebraic) return algebraic;
  const double normal = std::hypot(line.x(), line.y());
  if (!(normal >= kDegenerateNorm)) {
    throw Error(ErrorCode::kDegenerateEpipolarLine,
                "epipolar line normal vanishes");
  }
  return algebraic / normal;
}

Eigen::Vector3d Unproject(const Eigen::Vector2d& pixel, double depth,
                          const CameraIntrinsics& intrinsics,
                          const CameraPose& pose) {
  if (!std::isfinite(depth) || depth <= 0.0) {
    std::ostringstream msg;
    msg << "depth must be positive and finite, got " << depth;
    throw Error(ErrorCode::kInvalidDepth, msg.str());
  }
  const Eigen::Vector3d camera =
      depth * (intrinsics.KInverse() * pixel.homogeneous());
  return pose.R.transpose() * (camera - pose.t);
}

Eigen::Vector2d Project(const Eigen::Vector3d& world,
                        const CameraIntrinsics& intrinsics,
                        const CameraPose& pose, double* depth) {
  const Eigen::Vector3d camera = pose.R * world + pose.t;
  if (depth != nullptr) *depth = camera.z();
  return Eigen::Vector2d(intrinsics.fx * camera.x() / camera.z() + intrinsics.cx,
                         intrinsics.fy * camera.y() / camera.z() + intrinsics.cy);
}

}  // namespace epialign
