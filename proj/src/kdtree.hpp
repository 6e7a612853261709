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

#ifndef EPIALIGN_KDTREE_HPP_
#define EPIALIGN_KDTREE_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace epialign {

// Static 3D kd-tree answering exact nearest-neighbor queries.
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Eigen::Vector3d> points)
      : points_(points.begin(), points.end()), index_(points.size()) {
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    nodes_.reserve(points.size());
    if (!index_.empty()) Build(0, index_.size());
  }

  bool empty() const { return points_.empty(); }

  // Squared distance to the nearest stored point; +inf for an empty tree.
  double NearestSquaredDistance(const Eigen::Vector3d& query,
                                std::size_t* nearest = nullptr) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    if (!nodes_.empty()) Search(0, query, best, best_index);
    if (nearest != nullptr) *nearest = best_index;
    return best;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::size_t begin, end;  // range in index_
    int axis = -1;           // -1 for leaves
    double split = 0.0;
    std::size_t left = kNone, right = kNone;
  };

  std::size_t Build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    Eigen::Vector3d lo = points_[index_[begin]];
    Eigen::Vector3d hi = lo;
    for (std::size_t k = begin; k < end; ++k) {
      lo = lo.cwiseMin(points_[index_[k]]);
      hi = hi.cwiseMax(points_[index_[k]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid,
                     index_.begin() + end, [&](std::size_t a, std::size_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    const double split = points_[index_[mid]][axis];
    const std::size_t left = Build(begin, mid);
    const std::size_t right = Build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void Search(std::size_t id, const Eigen::Vector3d& query, double& best,
              std::size_t& best_index) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t k = node.begin; k < node.end; ++k) {
        const double d = (points_[index_[k]] - query).squaredNorm();
        if (d < best || (d == best && index_[k] < best_index)) {
          best = d;
          best_index = index_[k];
        }
      }
      return;
    }
    const double delta = query[node.axis] - node.split;
    const std::size_t near = delta < 0.0 ? node.left : node.right;
    const std::size_t far = delta < 0.0 ? node.right : node.left;
    Search(near, query, best, best_index);
    if (delta * delta <= best) Search(far, query, best, best_index);
  }

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace epialign

#endif  // EPIALIGN_KDTREE_HPP_
