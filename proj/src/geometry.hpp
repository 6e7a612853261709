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

#ifndef EPIALIGN_GEOMETRY_HPP_
#define EPIALIGN_GEOMETRY_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

namespace epialign {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Pinhole intrinsics in pixels. Pixel centers sit at integer coordinates.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  Eigen::Matrix3d K() const;
  Eigen::Matrix3d KInverse() const;
  bool IsValid() const;
  // Throws InvalidArgument naming the violated invariant.
  void Validate() const;
};

// World-to-camera extrinsics: X_cam = R * X_world + t.
struct CameraPose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  Eigen::Vector3d Center() const { return -R.transpose() * t; }
  // Camera forward (+z) axis expressed in the world frame.
  Eigen::Vector3d ForwardAxis() const { return R.row(2).transpose(); }

  static CameraPose FromCenter(const Eigen::Matrix3d& R,
                               const Eigen::Vector3d& center);
};

// Residual applied on top of a frozen pose. dr holds the two columns of the
// 6D rotation encoding.
struct PoseResidual {
  Vector6d dr = (Vector6d() << 1, 0, 0, 0, 1, 0).finished();
  Eigen::Vector3d dt = Eigen::Vector3d::Zero();

  static PoseResidual Identity() { return {}; }
};

struct RelativePose {
  Eigen::Matrix3d dR = Eigen::Matrix3d::Identity();
  Eigen::Vector3d dt = Eigen::Vector3d::Zero();
};

struct Frame {
  std::string id;
  CameraIntrinsics intrinsics;
  CameraPose pose;
};

struct CameraRig {
  std::vector<Frame> frames;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

enum class ResidualMode { kAlgebraic, kGeometric };

ResidualMode ParseResidualMode(const std::string& name);
std::string ResidualModeName(ResidualMode mode);

inline constexpr double kRotationTolerance = 1e-9;

bool IsRotation(const Eigen::Matrix3d& R, double tolerance = kRotationTolerance);

Eigen::Matrix3d Skew(const Eigen::Vector3d& v);

// Angle of a rotation matrix in degrees, in [0, 180].
double RotationAngleDeg(const Eigen::Matrix3d& R);

// Angle between two vectors in degrees, in [0, 180]. Zero vectors give 0.
double VectorAngleDeg(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

Eigen::Matrix3d AxisAngleToRotation(const Eigen::Vector3d& axis_angle);

// Gram-Schmidt on the two 3-vectors; third column is their cross product.
// Throws DegenerateRotation6D for a vanishing first column or parallel columns.
Eigen::Matrix3d Rot6dDecode(const Vector6d& dr);

// First two columns of R.
Vector6d Rot6dEncode(const Eigen::Matrix3d& R);

// R' = decode(dr) * R, t' = t + dt.
CameraPose ApplyResidual(const CameraPose& pose, const PoseResidual& residual);

// Block form of inv(E_i) * E_j: dR = R_i^T R_j, dt = R_i^T (t_j - t_i).
RelativePose ComputeRelativePose(const CameraPose& pose_i,
                                 const CameraPose& pose_j);

// Fundamental matrix mapping pixels of camera i to epipolar lines in camera
// j (x_j^T F x_i = 0), scaled to unit Frobenius norm.
Eigen::Matrix3d FundamentalMatrix(const CameraIntrinsics& intrinsics_i,
                                  const CameraPose& pose_i,
                                  const CameraIntrinsics& intrinsics_j,
                                  const CameraPose& pose_j);

// Geometric mode: distance in pixels from x_prime to the line F x.
// Algebraic mode: |x_prime^T F x| on homogeneous pixels.
double EpipolarDistance(const Eigen::Vector2d& x, const Eigen::Vector2d& x_prime,
                        const Eigen::Matrix3d& F,
                        ResidualMode mode = ResidualMode::kGeometric);

Eigen::Vector3d Unproject(const Eigen::Vector2d& pixel, double depth,
                          const CameraIntrinsics& intrinsics,
                          const CameraPose& pose);

// Pixel coordinates; depth (camera z) written to *depth when non-null.
Eigen::Vector2d Project(const Eigen::Vector3d& world,
                        const CameraIntrinsics& intrinsics,
                        const CameraPose& pose, double* depth = nullptr);

}  // namespace epialign

#endif  // EPIALIGN_GEOMETRY_HPP_
