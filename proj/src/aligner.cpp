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

#include "aligner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "error.hpp"
#include "parallel.hpp"

namespace epialign {

namespace {

using Vector10d = Eigen::Matrix<double, 10, 1>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLineNormalFloor = 1e-12;
constexpr std::size_t kMinCorrespondences = 8;

// Current camera state of one frame under the residual parameters.
struct FrameState {
  Eigen::Matrix3d R0;
  Eigen::Vector3d t0;
  Vector6d dr;
  Eigen::Matrix3d R;
  Eigen::Vector3d t;
  Eigen::Matrix3d K_inv;
};

struct PairResult {
  double weighted_sum = 0.0;
  double weight_sum = 0.0;
  std::size_t skipped = 0;
  Vector10d grad_i = Vector10d::Zero();
  Vector10d grad_j = Vector10d::Zero();
};

std::vector<FrameState> BuildStates(const CameraRig& base,
                                    const Eigen::VectorXd& params,
                                    const ParameterLayout& layout) {
  std::vector<FrameState> states(base.size());
  for (std::size_t n = 0; n < base.size(); ++n) {
    const Frame& frame = base.frames[n];
    FrameState& s = states[n];
    s.R0 = frame.pose.R;
    s.t0 = frame.pose.t;
    s.K_inv = frame.intrinsics.KInverse();
    if (n == layout.gauge_frame) {
      s.dr = PoseResidual::Identity().dr;
      s.R = frame.pose.R;
      s.t = frame.pose.t;
      continue;
    }
    const std::size_t o = layout.offset(n);
    s.dr = params.segment<6>(o);
    const Eigen::Matrix3d D = Rot6dDecode(s.dr);
    s.R = D * frame.pose.R;
    s.t = D * frame.pose.t + params.segment<3>(o + 6);
    if (layout.optimize_focal) {
      const double inv_scale = std::exp(-params[o + 9]);
      s.K_inv.topRows<2>() *= inv_scale;
    }
  }
  return states;
}

// Gradient of a loss through the Gram-Schmidt decode, given dL/dR.
Vector6d Rot6dDecodeBackward(const Vector6d& dr, const Eigen::Matrix3d& grad_R) {
  const Eigen::Vector3d a1 = dr.head<3>();
  const Eigen::Vector3d a2 = dr.tail<3>();
  const double n1 = a1.norm();
  const Eigen::Vector3d b1 = a1 / n1;
  const Eigen::Vector3d u = a2 - b1.dot(a2) * b1;
  const double nu = u.norm();
  const Eigen::Vector3d b2 = u / nu;

  Eigen::Vector3d g_b1 = grad_R.col(0) + b2.cross(grad_R.col(2));
  const Eigen::Vector3d g_b2 = grad_R.col(1) + grad_R.col(2).cross(b1);
  const Eigen::Vector3d g_u = (g_b2 - b2 * b2.dot(g_b2)) / nu;
  const Eigen::Vector3d g_a2 = g_u - b1 * b1.dot(g_u);
  g_b1 -= a2 * b1.dot(g_u) + b1.dot(a2) * g_u;
  const Eigen::Vector3d g_a1 = (g_b1 - b1 * b1.dot(g_b1)) / n1;

  Vector6d g;
  g << g_a1, g_a2;
  return g;
}

// Residuals of one pair written to `residuals`; with weights, also the
// weighted sum and (optionally) the unnormalized gradient contribution.
PairResult EvaluatePair(const std::vector<FrameState>& states,
                        const PairMatches& pair, const double* weights,
                        ResidualMode mode, bool with_gradient,
                        bool optimize_focal, double* residuals) {
  PairResult result;
  const FrameState& A = states[pair.frame_i];
  const FrameState& B = states[pair.frame_j];

  const Eigen::Matrix3d R = B.R * A.R.transpose();
  const Eigen::Vector3d t = B.t - R * A.t;
  const Eigen::Vector3d center_i = -A.R.transpose() * A.t;
  const Eigen::Vector3d center_j = -B.R.transpose() * B.t;
  if ((center_i - center_j).norm() <= 1e-12) {
    std::ostringstream msg;
    msg << "frames " << pair.frame_i << " and " << pair.frame_j
        << " share a camera center";
    throw Error(ErrorCode::kDegenerateBaseline, msg.str());
  }
  const Eigen::Matrix3d M = Skew(t) * R;
  const Eigen::Matrix3d G = B.K_inv.transpose() * M * A.K_inv;
  const double g_norm = G.norm();

  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  Eigen::Vector3d v_sum = Eigen::Vector3d::Zero();
  const auto& corrs = pair.correspondences;
  for (std::size_t k = 0; k < corrs.size(); ++k) {
    const Eigen::Vector3d x = corrs[k].x.homogeneous();
    const Eigen::Vector3d xp = corrs[k].x_prime.homogeneous();
    const Eigen::Vector3d line = G * x;
    const double n = xp.dot(line);
    double e;
    double d = 0.0;
    if (mode == ResidualMode::kGeometric) {
      d = std::hypot(line.x(), line.y());
      if (!(d >= kLineNormalFloor * g_norm)) {
        residuals[k] = kNaN;
        ++result.skipped;
        continue;
      }
      e = std::abs(n) / d;
    } else {
      e = std::abs(n) / g_norm;
    }
    residuals[k] = e;
    if (weights == nullptr) continue;

    const double w = weights[k];
    result.weighted_sum += w * e;
    result.weight_sum += w;
    if (!with_gradient || e <= kResidualDeadZone || w == 0.0) continue;

    const double sign = n > 0.0 ? 1.0 : -1.0;
    if (mode == ResidualMode::kGeometric) {
      // de/dG = sign/d x' x^T - |n|/d^3 (l1, l2, 0) x^T
      const double c = std::abs(n) / (d * d * d);
      const Eigen::Vector3d v =
          (w * sign / d) * xp - (w * c) * Eigen::Vector3d(line.x(), line.y(), 0.0);
      S.noalias() += v * x.transpose();
    } else {
      // de/dG = sign (x' x^T / |G| - n G / |G|^3)
      S.noalias() += (w * sign / g_norm) * xp * x.transpose();
      v_sum.x() += w * sign * n;
    }
  }
  if (!with_gradient || weights == nullptr) return result;
  if (mode == ResidualMode::kAlgebraic) {
    S -= (v_sum.x() / (g_norm * g_norm * g_norm)) * G;
  }

  // Chain dL/dG back to both frames' parameters.
  const Eigen::Matrix3d SM = B.K_inv * S * A.K_inv.transpose();
  Eigen::Vector3d g_t;
  for (int a = 0; a < 3; ++a) {
    g_t[a] = SM.cwiseProduct(Skew(Eigen::Vector3d::Unit(a)) * R).sum();
  }
  Eigen::Matrix3d g_R = -Skew(t) * SM;
  g_R -= g_t * A.t.transpose();
  const Eigen::Matrix3d g_Rj = g_R * A.R;
  const Eigen::Matrix3d g_Ri = g_R.transpose() * B.R;

  const Eigen::Vector3d g_ti = -R.transpose() * g_t;
  result.grad_i.head<6>() = Rot6dDecodeBackward(
      A.dr, g_Ri * A.R0.transpose() + g_ti * A.t0.transpose());
  result.grad_i.segment<3>(6) = g_ti;
  result.grad_j.head<6>() = Rot6dDecodeBackward(
      B.dr, g_Rj * B.R0.transpose() + g_t * B.t0.transpose());
  result.grad_j.segment<3>(6) = g_t;

  if (optimize_focal) {
    Eigen::Matrix3d P = Eigen::Matrix3d::Identity();
    P(2, 2) = 0.0;
    result.grad_i[9] =
        (M.transpose() * B.K_inv * S).cwiseProduct(-P * A.K_inv).sum();
    result.grad_j[9] = (S * A.K_inv.transpose() * M.transpose())
                           .cwiseProduct(-B.K_inv.transpose() * P)
                           .sum();
  }
  return result;
}

std::vector<std::size_t> PairOffsets(const MatchSet& matches) {
  std::vector<std::size_t> offsets(matches.pairs.size() + 1, 0);
  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    offsets[p + 1] = offsets[p] + matches.pairs[p].correspondences.size();
  }
  return offsets;
}

void CheckLayout(const CameraRig& base, const Eigen::VectorXd& params,
                 const ParameterLayout& layout) {
  if (layout.frame_count != base.size() ||
      static_cast<std::size_t>(params.size()) != layout.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter vector does not match the rig");
  }
}

WeightTable ComputeWeights(const std::vector<double>& residuals,
                           const MatchSet& matches, const AlignerConfig& config,
                           ResidualHistogram* histogram) {
  std::vector<double> finite;
  finite.reserve(residuals.size());
  for (double e : residuals) {
    if (std::isfinite(e)) finite.push_back(e);
  }
  *histogram = BuildHistogram(finite, config.histogram_bins);
  switch (config.weighting) {
    case WeightingScheme::kUniform:
      return UniformWeights(residuals.size());
    case WeightingScheme::kConfidence:
      return ConfidenceWeights(matches);
    case WeightingScheme::kAdaptive:
      break;
  }
  // Degenerate correspondences take the tail density but stay out of the mean.
  WeightTable table = AdaptiveWeights(finite, *histogram, config.alpha);
  const double avg = table.avg_density;
  table.weights.resize(residuals.size());
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    table.weights[k] = std::pow(histogram->Density(residuals[k]) / avg, config.alpha);
  }
  return table;
}

}  // namespace

WeightTable CorrespondenceWeights(std::span<const double> residuals,
                                  const MatchSet& matches,
                                  const AlignerConfig& config,
                                  ResidualHistogram* histogram) {
  return ComputeWeights(std::vector<double>(residuals.begin(), residuals.end()),
                        matches, config, histogram);
}

WeightingScheme ParseWeightingScheme(const std::string& name) {
  if (name == "adaptive") return WeightingScheme::kAdaptive;
  if (name == "uniform") return WeightingScheme::kUniform;
  if (name == "confidence") return WeightingScheme::kConfidence;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown weighting scheme '" + name +
                  "' (expected adaptive, uniform or confidence)");
}

std::string WeightingSchemeName(WeightingScheme scheme) {
  switch (scheme) {
    case WeightingScheme::kAdaptive: return "adaptive";
    case WeightingScheme::kUniform: return "uniform";
    case WeightingScheme::kConfidence: return "confidence";
  }
  return "adaptive";
}

void AlignerConfig::Validate() const {
  std::ostringstream msg;
  if (iterations < 1) {
    msg << "iterations must be >= 1, got " << iterations;
  } else if (!(lr0 > 0.0 && lr0 <= lr1 && lr1 <= lr2)) {
    msg << "learning rates must satisfy 0 < lr0 <= lr1 <= lr2 (got " << lr0
        << ", " << lr1 << ", " << lr2 << ")";
  } else if (!(b1 > 0.0 && b1 < b2)) {
    msg << "residual bands must satisfy 0 < b1 < b2 (got " << b1 << ", " << b2
        << ")";
  } else if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    msg << "alpha must be a finite non-negative number, got " << alpha;
  } else if (histogram_bins < 1) {
    msg << "histogram_bins must be >= 1";
  } else if (!(pair_angle_deg > 0.0 && pair_angle_deg <= 180.0)) {
    msg << "pair angle must be in (0, 180], got " << pair_angle_deg;
  } else if (max_correspondences < 1) {
    msg << "max_correspondences must be >= 1";
  } else if (reweight_every < 0) {
    msg << "reweight_every must be >= 0";
  } else {
    return;
  }
  throw Error(ErrorCode::kInvalidArgument, msg.str());
}

Eigen::VectorXd ParameterLayout::Identity() const {
  Eigen::VectorXd params = Eigen::VectorXd::Zero(size());
  for (std::size_t n = 0; n < frame_count; ++n) {
    params[offset(n)] = 1.0;
    params[offset(n) + 4] = 1.0;
  }
  return params;
}

CameraRig ApplyParameters(const CameraRig& base, const Eigen::VectorXd& params,
                          const ParameterLayout& layout) {
  CheckLayout(base, params, layout);
  CameraRig rig = base;
  for (std::size_t n = 0; n < base.size(); ++n) {
    if (n == layout.gauge_frame) continue;
    const std::size_t o = layout.offset(n);
    const Eigen::Matrix3d D = Rot6dDecode(params.segment<6>(o));
    rig.frames[n].pose.R = D * base.frames[n].pose.R;
    rig.frames[n].pose.t = D * base.frames[n].pose.t + params.segment<3>(o + 6);
    if (layout.optimize_focal) {
      const double scale = std::exp(params[o + 9]);
      rig.frames[n].intrinsics.fx *= scale;
      rig.frames[n].intrinsics.fy *= scale;
    }
  }
  return rig;
}

LossEvaluation EvaluateLoss(const CameraRig& base, const MatchSet& matches,
                            const WeightTable& weights,
                            const Eigen::VectorXd& params,
                            const ParameterLayout& layout, ResidualMode mode,
                            bool with_gradient) {
  CheckLayout(base, params, layout);
  const std::vector<std::size_t> offsets = PairOffsets(matches);
  if (weights.weights.size() != offsets.back()) {
    std::ostringstream msg;
    msg << "weight table has " << weights.weights.size()
        << " entries but the match set has " << offsets.back()
        << " correspondences";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  for (const auto& pair : matches.pairs) {
    if (pair.frame_i >= base.size() || pair.frame_j >= base.size()) {
      throw Error(ErrorCode::kFrameMismatch, "pair references a missing frame");
    }
  }

  const std::vector<FrameState> states = BuildStates(base, params, layout);
  LossEvaluation eval;
  eval.residuals.assign(offsets.back(), kNaN);
  std::vector<PairResult> results(matches.pairs.size());
  ParallelFor(matches.pairs.size(), [&](std::size_t p) {
    results[p] = EvaluatePair(states, matches.pairs[p],
                              weights.weights.data() + offsets[p], mode,
                              with_gradient, layout.optimize_focal,
                              eval.residuals.data() + offsets[p]);
  });

  double weighted_sum = 0.0;
  const std::size_t stride = layout.stride();
  if (with_gradient) eval.gradient = Eigen::VectorXd::Zero(layout.size());
  for (std::size_t p = 0; p < results.size(); ++p) {
    weighted_sum += results[p].weighted_sum;
    eval.total_weight += results[p].weight_sum;
    eval.skipped += results[p].skipped;
    if (with_gradient) {
      const PairMatches& pair = matches.pairs[p];
      eval.gradient.segment(layout.offset(pair.frame_i), stride) +=
          results[p].grad_i.head(stride);
      eval.gradient.segment(layout.offset(pair.frame_j), stride) +=
          results[p].grad_j.head(stride);
    }
  }
  if (!(eval.total_weight > 0.0)) {
    throw Error(ErrorCode::kZeroTotalWeight,
                "sum of correspondence weights is zero");
  }
  eval.loss = weighted_sum / eval.total_weight;
  if (with_gradient) {
    eval.gradient /= eval.total_weight;
    if (layout.gauge_frame < layout.frame_count) {
      eval.gradient.segment(layout.offset(layout.gauge_frame), stride).setZero();
    }
  }
  return eval;
}

double WeightedEpipolarLoss(const CameraRig& rig, const MatchSet& matches,
                            const WeightTable& weights, ResidualMode mode) {
  ParameterLayout layout{rig.size(), false, rig.size()};
  return EvaluateLoss(rig, matches, weights, layout.Identity(), layout, mode,
                      false)
      .loss;
}

Eigen::VectorXd LossGradient(const CameraRig& base, const MatchSet& matches,
                             const WeightTable& weights,
                             const Eigen::VectorXd& params,
                             const ParameterLayout& layout, ResidualMode mode) {
  return EvaluateLoss(base, matches, weights, params, layout, mode, true)
      .gradient;
}

std::vector<double> EpipolarResiduals(const CameraRig& rig,
                                      const MatchSet& matches,
                                      ResidualMode mode, std::size_t* skipped) {
  ParameterLayout layout{rig.size(), false, rig.size()};
  const std::vector<FrameState> states =
      BuildStates(rig, layout.Identity(), layout);
  const std::vector<std::size_t> offsets = PairOffsets(matches);
  std::vector<double> residuals(offsets.back(), kNaN);
  std::vector<std::size_t> skipped_per_pair(matches.pairs.size(), 0);
  for (const auto& pair : matches.pairs) {
    if (pair.frame_i >= rig.size() || pair.frame_j >= rig.size()) {
      throw Error(ErrorCode::kFrameMismatch, "pair references a missing frame");
    }
  }
  ParallelFor(matches.pairs.size(), [&](std::size_t p) {
    skipped_per_pair[p] =
        EvaluatePair(states, matches.pairs[p], nullptr, mode, false, false,
                     residuals.data() + offsets[p])
            .skipped;
  });
  if (skipped != nullptr) {
    *skipped = 0;
    for (std::size_t s : skipped_per_pair) *skipped += s;
  }
  return residuals;
}

double MedianResidual(std::span<const double> residuals) {
  std::vector<double> finite;
  finite.reserve(residuals.size());
  for (double e : residuals) {
    if (std::isfinite(e)) finite.push_back(e);
  }
  if (finite.empty()) {
    throw Error(ErrorCode::kEmptyResiduals, "no finite residuals for the median");
  }
  const std::size_t mid = finite.size() / 2;
  std::nth_element(finite.begin(), finite.begin() + mid, finite.end());
  const double upper = finite[mid];
  if (finite.size() % 2 == 1) return upper;
  const double lower = *std::max_element(finite.begin(), finite.begin() + mid);
  return 0.5 * (lower + upper);
}

double SelectLearningRate(double median_residual, const AlignerConfig& config) {
  if (median_residual < config.b1) return config.lr0;
  if (median_residual > config.b2) return config.lr2;
  return config.lr1;
}

AlignmentResult Align(const CameraRig& rig, const MatchSet& matches,
                      const AlignerConfig& config) {
  config.Validate();
  if (rig.size() < 2) {
    throw Error(ErrorCode::kInsufficientFrames,
                "alignment needs at least 2 frames");
  }
  if (config.gauge_frame >= rig.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gauge frame index out of range");
  }
  for (const Frame& frame : rig.frames) frame.intrinsics.Validate();
  ValidateMatches(matches, rig);

  AlignmentResult result;
  AlignmentReport& report = result.report;
  report.weighting = config.weighting;
  report.residual_mode = config.residual_mode;
  report.iterations = config.iterations;
  report.pairs_in_input = matches.pairs.size();

  // View-angle filter, then the per-pair cap.
  const PairSelection selection = SelectPairs(rig, config.pair_angle_deg);
  MatchSet filtered;
  for (const PairMatches& pair : matches.pairs) {
    if (selection.Contains(pair.frame_i, pair.frame_j)) {
      filtered.pairs.push_back(pair);
    } else {
      ++report.pairs_outside_view_angle;
    }
  }
  filtered = CapCorrespondences(filtered, config.max_correspondences, config.seed);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (PairMatches& pair : filtered.pairs) {
    if (pair.correspondences.empty()) {
      ++report.dropped_pairs;
      continue;
    }
    edges.emplace_back(pair.frame_i, pair.frame_j);
    result.matches.pairs.push_back(std::move(pair));
  }
  const MatchSet& used = result.matches;
  report.pairs_used = used.pairs.size();
  report.correspondences_used = used.TotalCorrespondences();
  report.pose_graph_connected = IsConnected(rig.size(), edges);
  if (report.correspondences_used < kMinCorrespondences) {
    std::ostringstream msg;
    msg << "alignment needs at least " << kMinCorrespondences
        << " correspondences in selected pairs, got "
        << report.correspondences_used;
    throw Error(ErrorCode::kInsufficientCorrespondences, msg.str());
  }

  // Weights and learning rate come from the input cameras.
  std::size_t skipped = 0;
  const std::vector<double> initial =
      EpipolarResiduals(rig, used, config.residual_mode, &skipped);
  report.initial_median_px = MedianResidual(initial);
  result.weights = ComputeWeights(initial, used, config, &result.histogram);
  report.learning_rate = SelectLearningRate(report.initial_median_px, config);

  const ParameterLayout layout{rig.size(), config.optimize_focal,
                               config.gauge_frame};
  const std::size_t stride = layout.stride();
  const std::size_t gauge_offset = layout.offset(config.gauge_frame);
  Eigen::VectorXd params = layout.Identity();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(layout.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.size());
  double beta1_power = 1.0;
  double beta2_power = 1.0;
  report.loss_trace.reserve(config.iterations);

  for (int it = 0; it < config.iterations; ++it) {
    if (config.reweight_every > 0 && it > 0 && it % config.reweight_every == 0) {
      const CameraRig current = ApplyParameters(rig, params, layout);
      result.weights = ComputeWeights(
          EpipolarResiduals(current, used, config.residual_mode), used, config,
          &result.histogram);
    }
    const LossEvaluation eval =
        EvaluateLoss(rig, used, result.weights, params, layout,
                     config.residual_mode, true);
    report.loss_trace.push_back(eval.loss);
    report.skipped_degenerate += eval.skipped;
    if (it == 0) report.initial_loss = eval.loss;

    beta1_power *= config.beta1;
    beta2_power *= config.beta2;
    const double lr = report.learning_rate;
    for (std::size_t k = 0; k < layout.size(); ++k) {
      if (k >= gauge_offset && k < gauge_offset + stride) continue;
      const double g = eval.gradient[k];
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[k] / (1.0 - beta1_power);
      const double v_hat = v[k] / (1.0 - beta2_power);
      params[k] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }

  result.rig = ApplyParameters(rig, params, layout);
  const std::vector<double> final_residuals =
      EpipolarResiduals(result.rig, used, config.residual_mode);
  report.final_median_px = MedianResidual(final_residuals);
  report.final_loss = EvaluateLoss(rig, used, result.weights, params, layout,
                                   config.residual_mode, false)
                          .loss;
  for (std::size_t n = 0; n < rig.size(); ++n) {
    const CameraPose& before = rig.frames[n].pose;
    const CameraPose& after = result.rig.frames[n].pose;
    report.rotation_delta_deg.push_back(
        RotationAngleDeg(after.R * before.R.transpose()));
    report.translation_delta.push_back((after.t - before.t).norm());
    report.focal_scale.push_back(
        config.optimize_focal ? std::exp(params[layout.offset(n) + 9]) : 1.0);
  }
  return result;
}

}  // namespace epialign
