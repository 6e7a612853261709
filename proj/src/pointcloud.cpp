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

#include "pointcloud.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "error.hpp"

namespace epialign {

std::string CloudSourceName(CloudSource source) {
  switch (source) {
    case CloudSource::kMatched: return "matched";
    case CloudSource::kRandom: return "random";
    case CloudSource::kExternal: return "external";
  }
  return "external";
}

bool DepthMap::IsValid(int x, int y) const {
  if (x < 0 || y < 0 || x >= width || y >= height) return false;
  const float d = at(x, y);
  return std::isfinite(d) && d > 0.0f;
}

std::optional<double> DepthMap::Sample(const Eigen::Vector2d& pixel) const {
  if (!pixel.allFinite()) return std::nullopt;
  const int x0 = static_cast<int>(std::floor(pixel.x()));
  const int y0 = static_cast<int>(std::floor(pixel.y()));
  if (IsValid(x0, y0) && IsValid(x0 + 1, y0) && IsValid(x0, y0 + 1) &&
      IsValid(x0 + 1, y0 + 1)) {
    const double fx = pixel.x() - x0;
    const double fy = pixel.y() - y0;
    const double top = (1.0 - fx) * at(x0, y0) + fx * at(x0 + 1, y0);
    const double bottom = (1.0 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1);
    return (1.0 - fy) * top + fy * bottom;
  }
  const int xn = static_cast<int>(std::lround(pixel.x()));
  const int yn = static_cast<int>(std::lround(pixel.y()));
  if (IsValid(xn, yn)) return static_cast<double>(at(xn, yn));
  return std::nullopt;
}

ScenePointCloud SelectMatchedPoints(const MatchSet& matches,
                                    const WeightTable& weights,
                                    const std::vector<std::optional<DepthMap>>& depths,
                                    const CameraRig& rig, double threshold,
                                    PointSelectionStats* stats) {
  if (!(threshold >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "weight threshold must be >= 0");
  }
  if (weights.weights.size() != matches.TotalCorrespondences()) {
    throw Error(ErrorCode::kInvalidArgument,
                "weight table does not align with the match set");
  }
  const auto depth_for = [&](std::uint32_t frame) -> const DepthMap& {
    if (frame >= rig.size()) {
      throw Error(ErrorCode::kFrameMismatch, "pair references a missing frame");
    }
    if (frame >= depths.size() || !depths[frame].has_value()) {
      throw Error(ErrorCode::kMissingDepthMap,
                  "no depth map for frame '" + rig.frames[frame].id + "'");
    }
    const DepthMap& map = *depths[frame];
    const CameraIntrinsics& k = rig.frames[frame].intrinsics;
    if (map.width != k.width || map.height != k.height) {
      std::ostringstream msg;
      msg << "depth map of frame '" << rig.frames[frame].id << "' is "
          << map.width << "x" << map.height << ", intrinsics say " << k.width
          << "x" << k.height;
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
    return map;
  };

  PointSelectionStats local;
  ScenePointCloud cloud;
  cloud.source = CloudSource::kMatched;
  std::size_t flat = 0;
  for (const PairMatches& pair : matches.pairs) {
    if (pair.correspondences.empty()) continue;
    const DepthMap& depth_i = depth_for(pair.frame_i);
    const DepthMap& depth_j = depth_for(pair.frame_j);
    const Frame& frame_i = rig.frames[pair.frame_i];
    const Frame& frame_j = rig.frames[pair.frame_j];
    for (const Correspondence& c : pair.correspondences) {
      const double w = weights.weights[flat++];
      ++local.considered;
      if (!(w > threshold)) continue;
      ++local.above_threshold;
      const std::optional<double> zi = depth_i.Sample(c.x);
      const std::optional<double> zj = depth_j.Sample(c.x_prime);
      if (!zi || !zj) {
        ++local.skipped_invalid_depth;
        continue;
      }
      const Eigen::Vector3d pi =
          Unproject(c.x, *zi, frame_i.intrinsics, frame_i.pose);
      const Eigen::Vector3d pj =
          Unproject(c.x_prime, *zj, frame_j.intrinsics, frame_j.pose);
      const double consistency = (pi - pj).norm();
      cloud.points.push_back(pi);
      cloud.points.push_back(pj);
      cloud.consistency.push_back(consistency);
      cloud.consistency.push_back(consistency);
      ++local.emitted_correspondences;
    }
  }
  if (stats != nullptr) *stats = local;
  return cloud;
}

ScenePointCloud RandomCloud(const CameraRig& rig, std::size_t count,
                            std::uint64_t seed) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "random cloud needs count >= 1");
  }
  if (rig.empty()) {
    throw Error(ErrorCode::kInsufficientFrames,
                "random cloud needs at least one camera");
  }
  Eigen::Vector3d lo = rig.frames[0].pose.Center();
  Eigen::Vector3d hi = lo;
  for (const Frame& frame : rig.frames) {
    lo = lo.cwiseMin(frame.pose.Center());
    hi = hi.cwiseMax(frame.pose.Center());
  }
  const Eigen::Vector3d center = 0.5 * (lo + hi);
  Eigen::Vector3d extent = hi - lo;
  for (int a = 0; a < 3; ++a) {
    if (extent[a] == 0.0) extent[a] = 1.0;
  }
  const Eigen::Vector3d box_lo = center - extent;  // half-extent doubled
  const Eigen::Vector3d box_size = 2.0 * extent;

  std::mt19937_64 rng(seed);
  const auto unit = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  ScenePointCloud cloud;
  cloud.source = CloudSource::kRandom;
  cloud.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = unit();
    const double y = unit();
    const double z = unit();
    cloud.points.emplace_back(box_lo + box_size.cwiseProduct(Eigen::Vector3d(x, y, z)));
  }
  return cloud;
}

}  // namespace epialign
