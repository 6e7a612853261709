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

#ifndef EPIALIGN_POINTCLOUD_HPP_
#define EPIALIGN_POINTCLOUD_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geometry.hpp"
#include "pairing.hpp"
#include "weighting.hpp"

namespace epialign {

enum class CloudSource { kMatched, kRandom, kExternal };

std::string CloudSourceName(CloudSource source);

struct ScenePointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<std::array<std::uint8_t, 3>> colors;  // empty or 1:1 with points
  // Distance between the two endpoint unprojections that produced each point
  // (matched clouds only).
  std::vector<double> consistency;
  CloudSource source = CloudSource::kExternal;

  std::size_t size() const { return points.size(); }
  bool has_colors() const { return !colors.empty(); }
};

// Row-major depth raster; non-positive or non-finite values are invalid.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), values(std::size_t(w) * h, 0.0f) {}

  float at(int x, int y) const { return values[std::size_t(y) * width + x]; }
  float& at(int x, int y) { return values[std::size_t(y) * width + x]; }
  bool IsValid(int x, int y) const;

  // Bilinear when all four taps are valid, else the nearest pixel if valid.
  std::optional<double> Sample(const Eigen::Vector2d& pixel) const;
};

struct PointSelectionStats {
  std::size_t considered = 0;
  std::size_t above_threshold = 0;
  std::size_t emitted_correspondences = 0;
  std::size_t skipped_invalid_depth = 0;
};

// For every correspondence with weight > threshold, unprojects both endpoints
// with their frame's sampled depth and emits both world points in
// (pair, correspondence, endpoint) order. `depths` is indexed by frame.
ScenePointCloud SelectMatchedPoints(const MatchSet& matches,
                                    const WeightTable& weights,
                                    const std::vector<std::optional<DepthMap>>& depths,
                                    const CameraRig& rig, double threshold,
                                    PointSelectionStats* stats = nullptr);

// `count` uniform samples in the bounding box of the camera centers, inflated
// 2x about its center. Zero-extent axes get a unit extent.
ScenePointCloud RandomCloud(const CameraRig& rig, std::size_t count,
                            std::uint64_t seed);

}  // namespace epialign

#endif  // EPIALIGN_POINTCLOUD_HPP_
