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

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "error.hpp"
#include "kdtree.hpp"

namespace epialign {

namespace {

PairError MeasurePair(const CameraRig& pred, const CameraRig& gt,
                      const std::vector<std::size_t>& to_gt, std::size_t i,
                      std::size_t j) {
  const RelativePose rel_pred =
      ComputeRelativePose(pred.frames[i].pose, pred.frames[j].pose);
  const RelativePose rel_gt =
      ComputeRelativePose(gt.frames[to_gt[i]].pose, gt.frames[to_gt[j]].pose);
  PairError error;
  error.i = i;
  error.j = j;
  error.rre_deg = RotationAngleDeg(rel_gt.dR.transpose() * rel_pred.dR);
  if (rel_gt.dt.norm() < kZeroBaselineNorm) {
    error.zero_baseline = true;
    error.rte_deg = 0.0;
  } else {
    error.rte_deg = VectorAngleDeg(rel_gt.dt, rel_pred.dt);
  }
  return error;
}

bool IsDegenerateSpread(std::span<const Eigen::Vector3d> points) {
  if (points.size() < 3) return true;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : points) scatter += (p - mean) * (p - mean).transpose();
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(scatter).singularValues();
  // Rank below 2 means coincident or collinear centers.
  return !(sv[0] > 0.0) || sv[1] / sv[0] < 1e-12;
}

double MeanNearestDistance(std::span<const Eigen::Vector3d> queries,
                           const KdTree3& tree) {
  double sum = 0.0;
  for (const auto& q : queries) sum += std::sqrt(tree.NearestSquaredDistance(q));
  return sum / static_cast<double>(queries.size());
}

}  // namespace

std::vector<double> PoseMetrics::rre() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.rre_deg);
  return out;
}

std::vector<double> PoseMetrics::rte() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.rte_deg);
  return out;
}

std::vector<std::size_t> MatchFramesById(const CameraRig& pred,
                                         const CameraRig& gt) {
  if (pred.size() != gt.size()) {
    std::ostringstream msg;
    msg << "prediction has " << pred.size() << " frames, ground truth has "
        << gt.size();
    throw Error(ErrorCode::kFrameMismatch, msg.str());
  }
  std::unordered_map<std::string, std::size_t> gt_index;
  for (std::size_t n = 0; n < gt.size(); ++n) {
    if (!gt_index.emplace(gt.frames[n].id, n).second) {
      throw Error(ErrorCode::kFrameMismatch,
                  "duplicate ground-truth frame id '" + gt.frames[n].id + "'");
    }
  }
  std::vector<std::size_t> to_gt(pred.size());
  std::vector<bool> used(gt.size(), false);
  for (std::size_t n = 0; n < pred.size(); ++n) {
    const auto it = gt_index.find(pred.frames[n].id);
    if (it == gt_index.end() || used[it->second]) {
      throw Error(ErrorCode::kFrameMismatch,
                  "predicted frame '" + pred.frames[n].id +
                      "' has no unique ground-truth counterpart");
    }
    used[it->second] = true;
    to_gt[n] = it->second;
  }
  return to_gt;
}

PoseMetrics PairwiseErrors(const CameraRig& pred, const CameraRig& gt,
                           bool order_invariant) {
  if (pred.size() < 2) {
    throw Error(ErrorCode::kFrameMismatch,
                "pose evaluation needs at least 2 frames");
  }
  const std::vector<std::size_t> to_gt = MatchFramesById(pred, gt);
  PoseMetrics metrics;
  metrics.order_invariant = order_invariant;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      metrics.pairs.push_back(MeasurePair(pred, gt, to_gt, i, j));
      if (order_invariant) {
        metrics.pairs.push_back(MeasurePair(pred, gt, to_gt, j, i));
      }
    }
  }
  metrics.pair_count = metrics.pairs.size();
  // Sorted summation keeps the means independent of frame order.
  std::vector<double> rre = metrics.rre();
  std::vector<double> rte = metrics.rte();
  std::sort(rre.begin(), rre.end());
  std::sort(rte.begin(), rte.end());
  double sum_rre = 0.0;
  double sum_rte = 0.0;
  for (std::size_t k = 0; k < rre.size(); ++k) {
    sum_rre += rre[k];
    sum_rte += rte[k];
  }
  metrics.mean_rre_deg = sum_rre / static_cast<double>(metrics.pair_count);
  metrics.mean_rte_deg = sum_rte / static_cast<double>(metrics.pair_count);
  for (const auto& p : metrics.pairs) {
    if (p.zero_baseline) ++metrics.zero_baseline_pairs;
  }
  return metrics;
}

PoseMetrics EvaluatePoses(const CameraRig& pred, const CameraRig& gt,
                          bool order_invariant) {
  PoseMetrics metrics = PairwiseErrors(pred, gt, order_invariant);
  metrics.auc_at_30 = AucAt30(metrics.rre(), metrics.rte());
  return metrics;
}

double AucAtThreshold(std::span<const double> rre_deg,
                      std::span<const double> rte_deg, double threshold_deg) {
  if (rre_deg.size() != rte_deg.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "RRE and RTE sequences differ in length");
  }
  if (rre_deg.empty()) {
    throw Error(ErrorCode::kEmptySequence, "AUC of an empty error sequence");
  }
  std::vector<double> errors(rre_deg.size());
  for (std::size_t k = 0; k < errors.size(); ++k) {
    errors[k] = std::max(rre_deg[k], rte_deg[k]);
  }
  std::sort(errors.begin(), errors.end());
  // acc(theta) steps up by 1/N at each error; each pair with error e < T
  // contributes (T - e) / N to the integral over [0, T].
  double area = 0.0;
  for (double e : errors) {
    if (!(e < threshold_deg)) break;
    area += threshold_deg - e;
  }
  return area / (threshold_deg * static_cast<double>(errors.size()));
}

Similarity3 FitSimilarity(std::span<const Eigen::Vector3d> src,
                          std::span<const Eigen::Vector3d> dst,
                          bool* degenerate) {
  if (src.size() != dst.size() || src.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "similarity fit needs equally sized, non-empty point sets");
  }
  const bool flagged = IsDegenerateSpread(src) || IsDegenerateSpread(dst);
  if (degenerate != nullptr) *degenerate = flagged;

  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::Matrix3Xd S(3, n), D(3, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    S.col(k) = src[k];
    D.col(k) = dst[k];
  }
  Similarity3 sim;
  const Eigen::Vector3d src_mean = S.rowwise().mean();
  const Eigen::Vector3d dst_mean = D.rowwise().mean();
  if ((S.colwise() - src_mean).squaredNorm() == 0.0) {
    sim.translation = dst_mean - src_mean;
    return sim;
  }
  const Eigen::Matrix4d T = Eigen::umeyama(S, D, true);
  const Eigen::Matrix3d sR = T.topLeftCorner<3, 3>();
  sim.scale = std::cbrt(sR.determinant());
  sim.rotation = sR / sim.scale;
  sim.translation = T.topRightCorner<3, 1>();
  return sim;
}

TrajectoryMetrics AteRmse(const CameraRig& pred, const CameraRig& gt) {
  const std::vector<std::size_t> to_gt = MatchFramesById(pred, gt);
  TrajectoryMetrics metrics;
  std::vector<Eigen::Vector3d> pred_centers;
  for (std::size_t n = 0; n < pred.size(); ++n) {
    metrics.ids.push_back(pred.frames[n].id);
    pred_centers.push_back(pred.frames[n].pose.Center());
    metrics.gt_centers.push_back(gt.frames[to_gt[n]].pose.Center());
  }
  if (pred_centers.empty()) {
    throw Error(ErrorCode::kFrameMismatch, "trajectory has no frames");
  }
  metrics.similarity =
      FitSimilarity(pred_centers, metrics.gt_centers, &metrics.degenerate);
  double sum = 0.0;
  for (std::size_t n = 0; n < pred_centers.size(); ++n) {
    metrics.aligned_pred_centers.push_back(
        metrics.similarity.Apply(pred_centers[n]));
    sum += (metrics.aligned_pred_centers[n] - metrics.gt_centers[n]).squaredNorm();
  }
  metrics.ate_rmse = std::sqrt(sum / static_cast<double>(pred_centers.size()));
  return metrics;
}

ChamferMetrics Chamfer(std::span<const Eigen::Vector3d> pred,
                       std::span<const Eigen::Vector3d> gt) {
  if (pred.empty() || gt.empty()) {
    throw Error(ErrorCode::kEmptyCloud, "Chamfer distance of an empty cloud");
  }
  const KdTree3 gt_tree(gt);
  const KdTree3 pred_tree(pred);
  ChamferMetrics metrics;
  metrics.accuracy = MeanNearestDistance(pred, gt_tree);
  metrics.completeness = MeanNearestDistance(gt, pred_tree);
  metrics.overall = 0.5 * (metrics.accuracy + metrics.completeness);
  return metrics;
}

ChamferMetrics Chamfer(std::span<const Eigen::Vector3d> pred,
                       std::span<const Eigen::Vector3d> gt,
                       const Similarity3& prealign) {
  std::vector<Eigen::Vector3d> moved;
  moved.reserve(pred.size());
  for (const auto& p : pred) moved.push_back(prealign.Apply(p));
  return Chamfer(moved, gt);
}

}  // namespace epialign
