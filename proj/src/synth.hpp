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

#ifndef EPIALIGN_SYNTH_HPP_
#define EPIALIGN_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "pairing.hpp"
#include "pointcloud.hpp"

namespace epialign {

enum class CameraLayout { kOrbit, kShell };

CameraLayout ParseCameraLayout(const std::string& name);
std::string CameraLayoutName(CameraLayout layout);

struct SynthNoise {
  double rotation_sigma_deg = 0.0;
  double translation_sigma = 0.0;  // fraction of the scene radius
  double pixel_sigma = 0.0;        // px
  double outlier_fraction = 0.0;   // in [0, 1)
};

struct SynthConfig {
  CameraLayout layout = CameraLayout::kOrbit;
  std::size_t camera_count = 8;
  std::size_t point_count = 500;
  int width = 640;
  int height = 480;
  double focal_px = 500.0;
  double scene_radius = 1.0;     // points are uniform in a ball of this radius
  double camera_distance = 4.0;  // orbit / shell radius around the scene
  double orbit_height = 1.0;     // orbit elevation above the scene center
  // Pairs whose optical axes differ by more than this get no matches.
  double max_pair_angle_deg = 90.0;
  // Express the world in the first camera's frame (R = I, t = 0 for frame 0).
  bool anchor_first_camera = true;
  SynthNoise noise;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SynthScene {
  CameraRig rig;
  ScenePointCloud points;
  std::vector<DepthMap> depths;  // one per frame
  MatchSet matches;              // exact projections, i < j
  // Generating point index of every correspondence.
  std::vector<std::vector<std::size_t>> point_ids;
};

// Deterministic under config.seed. Matches cover points visible (positive
// depth, inside the image, front-most at their pixel) in both views. Throws
// NoCovisibility when no point is seen by two cameras.
SynthScene Generate(const SynthConfig& config);

struct PerturbedScene {
  CameraRig rig;
  MatchSet matches;
  std::vector<std::vector<bool>> outliers;  // per pair, per correspondence
  std::size_t outlier_count = 0;
  double realized_mean_rre_deg = 0.0;
  double realized_mean_rte_deg = 0.0;
};

// Rotations are left-composed with a random-axis rotation of angle
// |N(0, sigma)|, camera centers jittered by N(0, sigma * scene_radius) per
// axis, pixels jittered by N(0, pixel_sigma), and a Bernoulli fraction of
// correspondences get x' replaced by a uniform pixel. The gauge frame keeps
// its pose. All sigmas zero returns the inputs unchanged.
PerturbedScene Perturb(const CameraRig& rig, const MatchSet& matches,
                       const SynthNoise& noise, std::uint64_t seed,
                       double scene_radius = 1.0, std::size_t gauge_frame = 0);

}  // namespace epialign

#endif  // EPIALIGN_SYNTH_HPP_
