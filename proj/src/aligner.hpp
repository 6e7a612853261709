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

#ifndef EPIALIGN_ALIGNER_HPP_
#define EPIALIGN_ALIGNER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geometry.hpp"
#include "pairing.hpp"
#include "weighting.hpp"

namespace epialign {

enum class WeightingScheme { kAdaptive, kUniform, kConfidence };

WeightingScheme ParseWeightingScheme(const std::string& name);
std::string WeightingSchemeName(WeightingScheme scheme);

struct AlignerConfig {
  int iterations = 300;
  double lr0 = 5e-4;
  double lr1 = 1e-3;
  double lr2 = 1e-2;
  double b1 = 2.5;  // px
  double b2 = 7.5;  // px
  bool optimize_focal = false;
  std::size_t gauge_frame = 0;
  ResidualMode residual_mode = ResidualMode::kGeometric;

  WeightingScheme weighting = WeightingScheme::kAdaptive;
  double alpha = kDefaultAlpha;
  std::size_t histogram_bins = kDefaultHistogramBins;
  // 0 keeps the weights computed from the input cameras for the whole run.
  int reweight_every = 0;

  double pair_angle_deg = kDefaultPairAngleDeg;
  std::size_t max_correspondences = kDefaultMaxCorrespondences;
  std::uint64_t seed = 0;

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Validate() const;
};

// Layout of the flat optimization vector: per frame dr (6), dt (3) and, with
// focal optimization, one log focal scale.
struct ParameterLayout {
  std::size_t frame_count = 0;
  bool optimize_focal = false;
  std::size_t gauge_frame = 0;

  std::size_t stride() const { return optimize_focal ? 10 : 9; }
  std::size_t size() const { return frame_count * stride(); }
  std::size_t offset(std::size_t frame) const { return frame * stride(); }

  // dr = (1,0,0,0,1,0), dt = 0, log focal scale = 0 for every frame.
  Eigen::VectorXd Identity() const;
};

// Rig obtained by applying the residual parameters on top of `base`: each
// camera turns about its own center, R' = D R and t' = D t + dt with D the
// decoded rotation. The gauge frame is copied unchanged.
CameraRig ApplyParameters(const CameraRig& base, const Eigen::VectorXd& params,
                          const ParameterLayout& layout);

// Residuals below this are treated as exactly zero when differentiating |.|.
inline constexpr double kResidualDeadZone = 1e-10;

struct LossEvaluation {
  double loss = 0.0;
  double total_weight = 0.0;
  Eigen::VectorXd gradient;       // empty unless requested
  std::vector<double> residuals;  // flat (pair, correspondence); NaN if skipped
  std::size_t skipped = 0;        // DegenerateEpipolarLine correspondences
};

// Weighted epipolar loss sum(w e) / sum(w) at `base` + `params`, optionally
// with its gradient w.r.t. params. Gauge-frame gradient entries are zero.
LossEvaluation EvaluateLoss(const CameraRig& base, const MatchSet& matches,
                            const WeightTable& weights,
                            const Eigen::VectorXd& params,
                            const ParameterLayout& layout, ResidualMode mode,
                            bool with_gradient);

double WeightedEpipolarLoss(const CameraRig& rig, const MatchSet& matches,
                            const WeightTable& weights,
                            ResidualMode mode = ResidualMode::kGeometric);

Eigen::VectorXd LossGradient(const CameraRig& base, const MatchSet& matches,
                             const WeightTable& weights,
                             const Eigen::VectorXd& params,
                             const ParameterLayout& layout,
                             ResidualMode mode = ResidualMode::kGeometric);

// Flat per-correspondence residuals; NaN marks a degenerate epipolar line.
std::vector<double> EpipolarResiduals(const CameraRig& rig,
                                      const MatchSet& matches,
                                      ResidualMode mode,
                                      std::size_t* skipped = nullptr);

// Weights for flat residuals under config.weighting (alpha and bins from the
// config). NaN residuals take the density of the last histogram bin.
WeightTable CorrespondenceWeights(std::span<const double> residuals,
                                  const MatchSet& matches,
                                  const AlignerConfig& config,
                                  ResidualHistogram* histogram);

// Median of the finite entries. Throws EmptyResiduals when none are finite.
double MedianResidual(std::span<const double> residuals);

// lr0 below b1, lr2 above b2, lr1 on [b1, b2].
double SelectLearningRate(double median_residual, const AlignerConfig& config);

struct AlignmentReport {
  double initial_median_px = 0.0;
  double final_median_px = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double learning_rate = 0.0;
  std::vector<double> loss_trace;
  std::vector<double> rotation_delta_deg;
  std::vector<double> translation_delta;
  std::vector<double> focal_scale;  // exp(log scale); 1 without focal optimization
  std::size_t pairs_in_input = 0;
  std::size_t pairs_outside_view_angle = 0;
  std::size_t dropped_pairs = 0;  // no surviving correspondences
  std::size_t pairs_used = 0;
  std::size_t correspondences_used = 0;
  std::size_t skipped_degenerate = 0;  // summed over iterations
  bool pose_graph_connected = true;
  WeightingScheme weighting = WeightingScheme::kAdaptive;
  ResidualMode residual_mode = ResidualMode::kGeometric;
  int iterations = 0;
};

struct AlignmentResult {
  CameraRig rig;
  AlignmentReport report;
  MatchSet matches;     // pairs and correspondences actually optimized
  WeightTable weights;  // aligned with `matches`
  ResidualHistogram histogram;
};

// Pair filtering, capping, weighting from the input cameras, learning-rate
// selection and adaptive-moment descent over identity-seeded residuals.
AlignmentResult Align(const CameraRig& rig, const MatchSet& matches,
                      const AlignerConfig& config);

}  // namespace epialign

#endif  // EPIALIGN_ALIGNER_HPP_
