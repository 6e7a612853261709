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

#ifndef EPIALIGN_PAIRING_HPP_
#define EPIALIGN_PAIRING_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "geometry.hpp"

namespace epialign {

inline constexpr std::size_t kDefaultMaxCorrespondences = 4096;
inline constexpr double kDefaultPairAngleDeg = 30.0;

struct Correspondence {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();        // pixel in frame_i
  Eigen::Vector2d x_prime = Eigen::Vector2d::Zero();  // pixel in frame_j
  double confidence = 1.0;  // meaningful only when the pair has confidences
};

struct PairMatches {
  std::uint32_t frame_i = 0;
  std::uint32_t frame_j = 0;
  bool has_confidence = false;
  std::vector<Correspondence> correspondences;
};

struct MatchSet {
  std::vector<PairMatches> pairs;

  std::size_t TotalCorrespondences() const;
};

struct PairSelection {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // i < j, sorted
  std::vector<double> view_angle_deg;

  bool Contains(std::size_t a, std::size_t b) const;
};

// Angle between the optical axes of two cameras, degrees.
double ViewAngleDeg(const CameraPose& a, const CameraPose& b);

// All pairs (i < j) whose optical-axis angle is at most threshold_deg.
PairSelection SelectPairs(const CameraRig& rig, double threshold_deg);

// Keeps at most `cap` correspondences per pair: the highest-confidence ones
// when confidences exist, otherwise a uniform subsample whose generator is
// seeded from (seed, pair index). Retained entries keep their input order.
// When kept is non-null it receives the retained input indices per pair.
MatchSet CapCorrespondences(const MatchSet& matches, std::size_t cap,
                            std::uint64_t seed = 0,
                            std::vector<std::vector<std::size_t>>* kept = nullptr);

// Frame indices in range and distinct, pixels finite and inside their images,
// confidences in [0, 1]. Throws FrameMismatch / InvalidCorrespondence.
void ValidateMatches(const MatchSet& matches, const CameraRig& rig);

// True when the undirected graph over frame_count nodes is connected.
bool IsConnected(std::size_t frame_count,
                 const std::vector<std::pair<std::size_t, std::size_t>>& edges);

}  // namespace epialign

#endif  // EPIALIGN_PAIRING_HPP_
