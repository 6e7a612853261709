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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "error.hpp"
#include "metrics.hpp"

namespace epialign {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinDepth = 1e-6;

double Unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// OpenCV-style camera (x right, y down, z forward) at `center` looking at
// `target`, with world +z as up.
CameraPose LookAt(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - center).normalized();
  Eigen::Vector3d up(0.0, 0.0, 1.0);
  if (forward.cross(up).norm() < 1e-6) up = Eigen::Vector3d(0.0, 1.0, 0.0);
  const Eigen::Vector3d right = forward.cross(up).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d R;
  R.row(0) = right.transpose();
  R.row(1) = down.transpose();
  R.row(2) = forward.transpose();
  return CameraPose::FromCenter(R, center);
}

std::vector<Eigen::Vector3d> CameraCenters(const SynthConfig& config,
                                           std::mt19937_64& rng) {
  std::vector<Eigen::Vector3d> centers;
  const double d = config.camera_distance;
  for (std::size_t n = 0; n < config.camera_count; ++n) {
    if (config.layout == CameraLayout::kOrbit) {
      const double angle = 2.0 * kPi * static_cast<double>(n) /
                           static_cast<double>(config.camera_count);
      centers.emplace_back(d * std::cos(angle), d * std::sin(angle),
                           config.orbit_height);
    } else {
      // Uniform on the upper hemisphere shell.
      const double z = Unit(rng);
      const double phi = 2.0 * kPi * Unit(rng);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      centers.emplace_back(d * r * std::cos(phi), d * r * std::sin(phi), d * z);
    }
  }
  return centers;
}

}  // namespace

CameraLayout ParseCameraLayout(const std::string& name) {
  if (name == "orbit") return CameraLayout::kOrbit;
  if (name == "shell" || name == "random-in-shell") return CameraLayout::kShell;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown camera layout '" + name + "' (expected orbit or shell)");
}

std::string CameraLayoutName(CameraLayout layout) {
  return layout == CameraLayout::kOrbit ? "orbit" : "shell";
}

void SynthConfig::Validate() const {
  std::ostringstream msg;
  if (camera_count < 1 || point_count < 1) {
    msg << "camera_count and point_count must be >= 1";
  } else if (width < 2 || height < 2 || !(focal_px > 0.0)) {
    msg << "image size must be at least 2x2 and focal_px positive";
  } else if (!(scene_radius > 0.0) || !(camera_distance > scene_radius)) {
    msg << "need 0 < scene_radius < camera_distance";
  } else if (!(noise.rotation_sigma_deg >= 0.0) ||
             !(noise.translation_sigma >= 0.0) || !(noise.pixel_sigma >= 0.0)) {
    msg << "noise sigmas must be >= 0";
  } else if (!(noise.outlier_fraction >= 0.0 && noise.outlier_fraction < 1.0)) {
    msg << "outlier_fraction must be in [0, 1), got " << noise.outlier_fraction;
  } else if (!(max_pair_angle_deg > 0.0 && max_pair_angle_deg <= 180.0)) {
    msg << "max_pair_angle_deg must be in (0, 180]";
  } else {
    return;
  }
  throw Error(ErrorCode::kInvalidArgument, msg.str());
}

SynthScene Generate(const SynthConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  SynthScene scene;

  const CameraIntrinsics intrinsics{config.focal_px, config.focal_px,
                                    0.5 * (config.width - 1),
                                    0.5 * (config.height - 1), config.width,
                                    config.height};
  const std::vector<Eigen::Vector3d> centers = CameraCenters(config, rng);
  for (std::size_t n = 0; n < centers.size(); ++n) {
    std::ostringstream id;
    id << "frame_" << std::setw(4) << std::setfill('0') << n;
    scene.rig.frames.push_back(
        Frame{id.str(), intrinsics, LookAt(centers[n], Eigen::Vector3d::Zero())});
  }

  scene.points.source = CloudSource::kExternal;
  while (scene.points.size() < config.point_count) {
    const Eigen::Vector3d p(2.0 * Unit(rng) - 1.0, 2.0 * Unit(rng) - 1.0,
                            2.0 * Unit(rng) - 1.0);
    if (p.squaredNorm() <= 1.0) scene.points.points.push_back(config.scene_radius * p);
  }

  if (config.anchor_first_camera) {
    const CameraPose anchor = scene.rig.frames[0].pose;
    for (Frame& frame : scene.rig.frames) {
      const Eigen::Matrix3d R = frame.pose.R * anchor.R.transpose();
      frame.pose = CameraPose{R, frame.pose.t - R * anchor.t};
    }
    scene.rig.frames[0].pose = CameraPose{};
    for (Eigen::Vector3d& p : scene.points.points) p = anchor.R * p + anchor.t;
  }

  // Z-buffer at the rounded pixel of every projection.
  const std::size_t n_frames = scene.rig.size();
  const std::size_t n_points = scene.points.size();
  std::vector<std::vector<Eigen::Vector2d>> pixels(
      n_frames, std::vector<Eigen::Vector2d>(n_points));
  std::vector<std::vector<double>> depth(n_frames, std::vector<double>(n_points));
  std::vector<std::vector<bool>> visible(n_frames, std::vector<bool>(n_points));
  for (std::size_t n = 0; n < n_frames; ++n) {
    const Frame& frame = scene.rig.frames[n];
    DepthMap map(config.width, config.height);
    std::vector<long> owner(std::size_t(config.width) * config.height, -1);
    std::vector<double> zbuf(owner.size(), 0.0);
    for (std::size_t k = 0; k < n_points; ++k) {
      double z = 0.0;
      const Eigen::Vector2d px =
          Project(scene.points.points[k], frame.intrinsics, frame.pose, &z);
      pixels[n][k] = px;
      depth[n][k] = z;
      if (!(z > kMinDepth) || px.x() < 0.0 || px.y() < 0.0 ||
          px.x() > config.width - 1 || px.y() > config.height - 1) {
        continue;
      }
      const std::size_t cell = std::size_t(std::lround(px.y())) * config.width +
                               std::size_t(std::lround(px.x()));
      if (owner[cell] < 0 || z < zbuf[cell]) {
        owner[cell] = static_cast<long>(k);
        zbuf[cell] = z;
      }
    }
    for (std::size_t cell = 0; cell < owner.size(); ++cell) {
      if (owner[cell] < 0) continue;
      visible[n][owner[cell]] = true;
      map.values[cell] = static_cast<float>(zbuf[cell]);
    }
    scene.depths.push_back(std::move(map));
  }

  for (std::size_t i = 0; i < n_frames; ++i) {
    for (std::size_t j = i + 1; j < n_frames; ++j) {
      if (ViewAngleDeg(scene.rig.frames[i].pose, scene.rig.frames[j].pose) >
          config.max_pair_angle_deg) {
        continue;
      }
      PairMatches pair;
      pair.frame_i = static_cast<std::uint32_t>(i);
      pair.frame_j = static_cast<std::uint32_t>(j);
      std::vector<std::size_t> ids;
      for (std::size_t k = 0; k < n_points; ++k) {
        if (!visible[i][k] || !visible[j][k]) continue;
        pair.correspondences.push_back(Correspondence{pixels[i][k], pixels[j][k], 1.0});
        ids.push_back(k);
      }
      if (pair.correspondences.empty()) continue;
      scene.matches.pairs.push_back(std::move(pair));
      scene.point_ids.push_back(std::move(ids));
    }
  }
  if (scene.matches.pairs.empty()) {
    throw Error(ErrorCode::kNoCovisibility,
                "no scene point is visible in two cameras");
  }
  return scene;
}

PerturbedScene Perturb(const CameraRig& rig, const MatchSet& matches,
                       const SynthNoise& noise, std::uint64_t seed,
                       double scene_radius, std::size_t gauge_frame) {
  if (!(noise.rotation_sigma_deg >= 0.0) || !(noise.translation_sigma >= 0.0) ||
      !(noise.pixel_sigma >= 0.0) ||
      !(noise.outlier_fraction >= 0.0 && noise.outlier_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid noise configuration");
  }
  std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  PerturbedScene out;
  out.rig = rig;
  out.matches = matches;

  const bool move_rotation = noise.rotation_sigma_deg > 0.0;
  const bool move_center = noise.translation_sigma > 0.0;
  for (std::size_t n = 0; n < rig.size(); ++n) {
    if (n == gauge_frame || (!move_rotation && !move_center)) continue;
    CameraPose& pose = out.rig.frames[n].pose;
    Eigen::Vector3d center = pose.Center();
    if (move_rotation) {
      Eigen::Vector3d axis(normal(rng), normal(rng), normal(rng));
      axis.normalize();
      const double angle =
          std::abs(normal(rng)) * noise.rotation_sigma_deg * kPi / 180.0;
      pose.R = AxisAngleToRotation(angle * axis) * pose.R;
    }
    if (move_center) {
      const double sigma = noise.translation_sigma * scene_radius;
      center += sigma * Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    }
    pose.t = -pose.R * center;
  }

  out.outliers.resize(matches.pairs.size());
  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    PairMatches& pair = out.matches.pairs[p];
    out.outliers[p].assign(pair.correspondences.size(), false);
    if (pair.frame_i >= rig.size() || pair.frame_j >= rig.size()) {
      throw Error(ErrorCode::kFrameMismatch, "pair references a missing frame");
    }
    const CameraIntrinsics& ki = rig.frames[pair.frame_i].intrinsics;
    const CameraIntrinsics& kj = rig.frames[pair.frame_j].intrinsics;
    const auto clamp_to = [](Eigen::Vector2d px, const CameraIntrinsics& k) {
      px.x() = std::clamp(px.x(), 0.0, k.width - 1.0);
      px.y() = std::clamp(px.y(), 0.0, k.height - 1.0);
      return px;
    };
    for (std::size_t k = 0; k < pair.correspondences.size(); ++k) {
      Correspondence& c = pair.correspondences[k];
      if (noise.pixel_sigma > 0.0) {
        c.x = clamp_to(c.x + noise.pixel_sigma * Eigen::Vector2d(normal(rng), normal(rng)), ki);
        c.x_prime = clamp_to(
            c.x_prime + noise.pixel_sigma * Eigen::Vector2d(normal(rng), normal(rng)), kj);
      }
      if (noise.outlier_fraction > 0.0 && Unit(rng) < noise.outlier_fraction) {
        c.x_prime = Eigen::Vector2d(Unit(rng) * (kj.width - 1.0),
                                    Unit(rng) * (kj.height - 1.0));
        out.outliers[p][k] = true;
        ++out.outlier_count;
      }
    }
  }

  if (rig.size() >= 2) {
    const PoseMetrics realized = PairwiseErrors(out.rig, rig, true);
    out.realized_mean_rre_deg = realized.mean_rre_deg;
    out.realized_mean_rte_deg = realized.mean_rte_deg;
  }
  return out;
}

}  // namespace epialign
