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

#ifndef EPIALIGN_METRICS_HPP_
#define EPIALIGN_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geometry.hpp"

namespace epialign {

inline constexpr double kAucThresholdDeg = 30.0;
inline constexpr double kZeroBaselineNorm = 1e-9;

struct PairError {
  std::size_t i = 0;  // "from" frame (pred order)
  std::size_t j = 0;
  double rre_deg = 0.0;
  double rte_deg = 0.0;
  bool zero_baseline = false;  // GT relative translation vanished; RTE = 0
};

struct PoseMetrics {
  std::vector<PairError> pairs;
  double mean_rre_deg = 0.0;
  double mean_rte_deg = 0.0;
  double auc_at_30 = 0.0;
  std::size_t pair_count = 0;
  std::size_t zero_baseline_pairs = 0;
  bool order_invariant = false;

  std::vector<double> rre() const;
  std::vector<double> rte() const;
};

// Relative rotation / translation errors for every pair i < j of the
// prediction's frame order; with order_invariant each pair also contributes
// its (j, i) direction. GT frames are matched to predicted frames by id.
PoseMetrics PairwiseErrors(const CameraRig& pred, const CameraRig& gt,
                           bool order_invariant);

// PairwiseErrors followed by AUC@30.
PoseMetrics EvaluatePoses(const CameraRig& pred, const CameraRig& gt,
                          bool order_invariant);

// Exact area under the accuracy curve of max(RRE, RTE) on [0, threshold],
// normalized by the threshold.
double AucAtThreshold(std::span<const double> rre_deg,
                      std::span<const double> rte_deg, double threshold_deg);

inline double AucAt30(std::span<const double> rre_deg,
                      std::span<const double> rte_deg) {
  return AucAtThreshold(rre_deg, rte_deg, kAucThresholdDeg);
}

struct Similarity3 {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d Apply(const Eigen::Vector3d& x) const {
    return scale * (rotation * x) + translation;
  }
};

// Closed-form least-squares similarity mapping src onto dst. *degenerate is
// set when src or dst is coincident or collinear (or has < 3 points).
Similarity3 FitSimilarity(std::span<const Eigen::Vector3d> src,
                          std::span<const Eigen::Vector3d> dst,
                          bool* degenerate = nullptr);

struct TrajectoryMetrics {
  double ate_rmse = 0.0;
  Similarity3 similarity;
  bool degenerate = false;
  std::vector<std::string> ids;
  std::vector<Eigen::Vector3d> aligned_pred_centers;
  std::vector<Eigen::Vector3d> gt_centers;
};

// RMSE of camera centers after a similarity fit of pred onto gt.
TrajectoryMetrics AteRmse(const CameraRig& pred, const CameraRig& gt);

struct ChamferMetrics {
  double accuracy = 0.0;
  double completeness = 0.0;
  double overall = 0.0;
};

// Accuracy: mean NN distance pred -> gt. Completeness: gt -> pred.
ChamferMetrics Chamfer(std::span<const Eigen::Vector3d> pred,
                       std::span<const Eigen::Vector3d> gt);

// Chamfer after mapping pred through `prealign`.
ChamferMetrics Chamfer(std::span<const Eigen::Vector3d> pred,
                       std::span<const Eigen::Vector3d> gt,
                       const Similarity3& prealign);

// GT frame index for every predicted frame, matched by id.
std::vector<std::size_t> MatchFramesById(const CameraRig& pred,
                                         const CameraRig& gt);

}  // namespace epialign

#endif  // EPIALIGN_METRICS_HPP_
