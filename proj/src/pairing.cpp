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

#include "pairing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "error.hpp"

namespace epialign {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double UnitUniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Knuth's selection sampling: k of n indices, increasing order.
std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t k,
                                       std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < n && out.size() < k; ++i) {
    const double remaining = static_cast<double>(n - i);
    const double needed = static_cast<double>(k - out.size());
    if (UnitUniform(rng) * remaining < needed) out.push_back(i);
  }
  return out;
}

}  // namespace

std::size_t MatchSet::TotalCorrespondences() const {
  std::size_t total = 0;
  for (const auto& pair : pairs) total += pair.correspondences.size();
  return total;
}

bool PairSelection::Contains(std::size_t a, std::size_t b) const {
  const auto key = std::make_pair(std::min(a, b), std::max(a, b));
  return std::binary_search(pairs.begin(), pairs.end(), key);
}

double ViewAngleDeg(const CameraPose& a, const CameraPose& b) {
  return VectorAngleDeg(a.ForwardAxis(), b.ForwardAxis());
}

PairSelection SelectPairs(const CameraRig& rig, double threshold_deg) {
  if (rig.size() < 2) {
    throw Error(ErrorCode::kInsufficientFrames,
                "pair selection needs at least 2 frames, got " +
                    std::to_string(rig.size()));
  }
  if (!(threshold_deg > 0.0 && threshold_deg <= 180.0)) {
    std::ostringstream msg;
    msg << "view-angle threshold must be in (0, 180], got " << threshold_deg;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  PairSelection selection;
  for (std::size_t i = 0; i < rig.size(); ++i) {
    for (std::size_t j = i + 1; j < rig.size(); ++j) {
      const double angle = ViewAngleDeg(rig.frames[i].pose, rig.frames[j].pose);
      if (angle <= threshold_deg) {
        selection.pairs.emplace_back(i, j);
        selection.view_angle_deg.push_back(angle);
      }
    }
  }
  return selection;
}

MatchSet CapCorrespondences(const MatchSet& matches, std::size_t cap,
                            std::uint64_t seed,
                            std::vector<std::vector<std::size_t>>* kept) {
  if (cap < 1) {
    throw Error(ErrorCode::kInvalidArgument, "correspondence cap must be >= 1");
  }
  MatchSet out;
  out.pairs.reserve(matches.pairs.size());
  if (kept != nullptr) kept->assign(matches.pairs.size(), {});

  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    const PairMatches& pair = matches.pairs[p];
    const std::size_t n = pair.correspondences.size();
    std::vector<std::size_t> indices;
    if (n <= cap) {
      indices.resize(n);
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    } else if (pair.has_confidence) {
      indices.resize(n);
      std::iota(indices.begin(), indices.end(), std::size_t{0});
      std::stable_sort(indices.begin(), indices.end(),
                       [&](std::size_t a, std::size_t b) {
                         return pair.correspondences[a].confidence >
                                pair.correspondences[b].confidence;
                       });
      indices.resize(cap);
      std::sort(indices.begin(), indices.end());
    } else {
      std::mt19937_64 rng(SplitMix64(seed ^ SplitMix64(p)));
      indices = SampleIndices(n, cap, rng);
    }

    PairMatches capped;
    capped.frame_i = pair.frame_i;
    capped.frame_j = pair.frame_j;
    capped.has_confidence = pair.has_confidence;
    capped.correspondences.reserve(indices.size());
    for (std::size_t idx : indices) {
      capped.correspondences.push_back(pair.correspondences[idx]);
    }
    out.pairs.push_back(std::move(capped));
    if (kept != nullptr) (*kept)[p] = std::move(indices);
  }
  return out;
}

void ValidateMatches(const MatchSet& matches, const CameraRig& rig) {
  const auto in_bounds = [](const Eigen::Vector2d& px,
                            const CameraIntrinsics& k) {
    return px.allFinite() && px.x() >= -0.5 && px.y() >= -0.5 &&
           px.x() <= k.width - 0.5 && px.y() <= k.height - 0.5;
  };
  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    const PairMatches& pair = matches.pairs[p];
    if (pair.frame_i >= rig.size() || pair.frame_j >= rig.size()) {
      std::ostringstream msg;
      msg << "pair " << p << " references frames (" << pair.frame_i << ", "
          << pair.frame_j << ") but the rig has " << rig.size() << " frames";
      throw Error(ErrorCode::kFrameMismatch, msg.str());
    }
    if (pair.frame_i == pair.frame_j) {
      throw Error(ErrorCode::kInvalidCorrespondence,
                  "pair " + std::to_string(p) + " matches a frame to itself");
    }
    const CameraIntrinsics& ki = rig.frames[pair.frame_i].intrinsics;
    const CameraIntrinsics& kj = rig.frames[pair.frame_j].intrinsics;
    for (std::size_t k = 0; k < pair.correspondences.size(); ++k) {
      const Correspondence& c = pair.correspondences[k];
      if (!in_bounds(c.x, ki) || !in_bounds(c.x_prime, kj)) {
        std::ostringstream msg;
        msg << "pair " << p << " correspondence " << k
            << " lies outside its image bounds";
        throw Error(ErrorCode::kInvalidCorrespondence, msg.str());
      }
      if (pair.has_confidence &&
          !(c.confidence >= 0.0 && c.confidence <= 1.0)) {
        std::ostringstream msg;
        msg << "pair " << p << " correspondence " << k << " confidence "
            << c.confidence << " outside [0, 1]";
        throw Error(ErrorCode::kInvalidCorrespondence, msg.str());
      }
    }
  }
}

bool IsConnected(std::size_t frame_count,
                 const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  if (frame_count <= 1) return true;
  std::vector<std::size_t> parent(frame_count);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = frame_count;
  for (const auto& [a, b] : edges) {
    const std::size_t ra = find(a);
    const std::size_t rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

}  // namespace epialign
