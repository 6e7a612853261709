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

#include <cstdio>
#include <fstream>

#include <Eigen/Geometry>

#include "error.hpp"
#include "io.hpp"

namespace epialign::io {

namespace {

std::ofstream OpenText(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "' for writing");
  }
  out.precision(17);
  return out;
}

}  // namespace

Eigen::Vector4d RotationToQuaternion(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {q.w(), q.x(), q.y(), q.z()};
}

void ExportColmapText(const CameraRig& rig, const ScenePointCloud& cloud,
                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "cannot create '" + dir.string() + "'");
  }

  std::ofstream cameras = OpenText(dir / "cameras.txt");
  cameras << "# Camera list with one line of data per camera:\n"
          << "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n"
          << "# Number of cameras: " << rig.size() << "\n";
  for (std::size_t f = 0; f < rig.size(); ++f) {
    const CameraIntrinsics& k = rig.frames[f].intrinsics;
    cameras << f + 1 << " PINHOLE " << k.width << " " << k.height << " " << k.fx
            << " " << k.fy << " " << k.cx << " " << k.cy << "\n";
  }

  std::ofstream images = OpenText(dir / "images.txt");
  images << "# Image list with two lines of data per image:\n"
         << "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
         << "#   POINTS2D[] as (X, Y, POINT3D_ID)\n"
         << "# Number of images: " << rig.size() << "\n";
  for (std::size_t f = 0; f < rig.size(); ++f) {
    const Frame& frame = rig.frames[f];
    const Eigen::Vector4d q = RotationToQuaternion(frame.pose.R);
    images << f + 1 << " " << q[0] << " " << q[1] << " " << q[2] << " " << q[3]
           << " " << frame.pose.t[0] << " " << frame.pose.t[1] << " "
           << frame.pose.t[2] << " " << f + 1 << " " << frame.id << "\n\n";
  }

  std::ofstream points = OpenText(dir / "points3D.txt");
  points << "# 3D point list with one line of data per point:\n"
         << "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n"
         << "# Number of points: " << cloud.size() << "\n";
  const bool colored = cloud.colors.size() == cloud.points.size();
  for (std::size_t n = 0; n < cloud.size(); ++n) {
    const Eigen::Vector3d& p = cloud.points[n];
    const std::array<std::uint8_t, 3> color =
        colored ? cloud.colors[n] : std::array<std::uint8_t, 3>{128, 128, 128};
    points << n + 1 << " " << p[0] << " " << p[1] << " " << p[2] << " "
           << int(color[0]) << " " << int(color[1]) << " " << int(color[2])
           << " 0\n";
  }
  if (!cameras || !images || !points) {
    throw Error(ErrorCode::kIoError, "failed writing COLMAP files in '" + dir.string() + "'");
  }
}

}  // namespace epialign::io
