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

#include <cstring>
#include <new>
#include <string>

#include "aligner.hpp"
#include "epialign/epialign.h"
#include "error.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "report.hpp"

struct epi_rig {
  epialign::CameraRig rig;
};
struct epi_matches {
  epialign::MatchSet matches;
};
struct epi_cloud {
  epialign::ScenePointCloud cloud;
};
struct epi_weights {
  epialign::WeightTable table;
};

namespace {

using epialign::Error;
using epialign::ErrorCode;
using nlohmann::json;

thread_local std::string g_last_error;

epi_status StatusFor(ErrorCode code) {
  return static_cast<epi_status>(static_cast<int>(code) + 1);
}

epi_status Fail(epi_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into a status and the thread's message.
template <typename Fn>
epi_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return EPI_OK;
  } catch (const Error& e) {
    return Fail(StatusFor(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(EPI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(EPI_ERR_INTERNAL, e.what());
  }
}

void Require(bool condition, const char* what) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, what);
}

char* CopyString(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void Emit(const json& doc, char** report_json) {
  if (report_json) *report_json = CopyString(doc.dump(2));
}

epialign::AlignerConfig ToConfig(const epi_align_options& o) {
  epialign::AlignerConfig config;
  config.iterations = o.iterations;
  config.lr0 = o.lr0;
  config.lr1 = o.lr1;
  config.lr2 = o.lr2;
  config.b1 = o.b1;
  config.b2 = o.b2;
  config.alpha = o.alpha;
  config.pair_angle_deg = o.pair_angle_deg;
  config.max_correspondences = o.max_matches;
  config.histogram_bins = o.histogram_bins;
  config.gauge_frame = o.gauge_frame;
  config.reweight_every = o.reweight_every;
  config.optimize_focal = o.optimize_focal != 0;
  switch (o.residual_mode) {
    case EPI_RESIDUAL_GEOMETRIC:
      config.residual_mode = epialign::ResidualMode::kGeometric;
      break;
    case EPI_RESIDUAL_ALGEBRAIC:
      config.residual_mode = epialign::ResidualMode::kAlgebraic;
      break;
    default:
      throw Error(ErrorCode::kInvalidArgument, "unknown residual mode");
  }
  switch (o.weighting) {
    case EPI_WEIGHTING_ADAPTIVE:
      config.weighting = epialign::WeightingScheme::kAdaptive;
      break;
    case EPI_WEIGHTING_UNIFORM:
      config.weighting = epialign::WeightingScheme::kUniform;
      break;
    case EPI_WEIGHTING_CONFIDENCE:
      config.weighting = epialign::WeightingScheme::kConfidence;
      break;
    default:
      throw Error(ErrorCode::kInvalidArgument, "unknown weighting scheme");
  }
  config.seed = o.seed;
  config.Validate();
  return config;
}

}  // namespace

extern "C" {

const char* epi_version(void) { return "1.0.0"; }

const char* epi_status_name(epi_status status) {
  static const char* const kNames[] = {
      "Ok",
      "InvalidArgument",
      "DegenerateRotation6D",
      "DegenerateBaseline",
      "DegenerateEpipolarLine",
      "InvalidDepth",
      "InsufficientFrames",
      "EmptyResiduals",
      "MissingConfidence",
      "ZeroTotalWeight",
      "InsufficientCorrespondences",
      "FrameMismatch",
      "EmptySequence",
      "DegenerateTrajectory",
      "EmptyCloud",
      "MissingDepthMap",
      "NoCovisibility",
      "ParseError",
      "VersionMismatch",
      "RotationInvalid",
      "IoError",
      "InvalidCorrespondence",
      "Internal",
  };
  const int index = static_cast<int>(status);
  if (index < 0 || index > EPI_ERR_INTERNAL) return "Unknown";
  return kNames[index];
}

int epi_status_exit_code(epi_status status) {
  if (status == EPI_OK) return 0;
  if (status == EPI_ERR_INVALID_ARGUMENT) return 2;
  if (status == EPI_ERR_INTERNAL) return 3;
  const auto code = static_cast<ErrorCode>(static_cast<int>(status) - 1);
  return epialign::IsNumericalFailure(code) ? 4 : 3;
}

const char* epi_last_error(void) { return g_last_error.c_str(); }

void epi_string_free(char* text) { delete[] text; }

epi_status epi_rig_load(const char* path, epi_rig** out) {
  return Guard([&] {
    Require(path && out, "epi_rig_load: null argument");
    *out = new epi_rig{epialign::io::LoadRig(path)};
  });
}

epi_status epi_rig_save(const epi_rig* rig, const char* path) {
  return Guard([&] {
    Require(rig && path, "epi_rig_save: null argument");
    epialign::io::SaveRig(rig->rig, path);
  });
}

size_t epi_rig_frame_count(const epi_rig* rig) { return rig ? rig->rig.size() : 0; }

epi_status epi_rig_pose(const epi_rig* rig, size_t frame, double R[9], double t[3]) {
  return Guard([&] {
    Require(rig && R && t, "epi_rig_pose: null argument");
    Require(frame < rig->rig.size(), "epi_rig_pose: frame index out of range");
    const epialign::CameraPose& pose = rig->rig.frames[frame].pose;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) R[3 * r + c] = pose.R(r, c);
      t[r] = pose.t[r];
    }
  });
}

epi_status epi_rig_intrinsics(const epi_rig* rig, size_t frame, double k[4],
                              int size[2]) {
  return Guard([&] {
    Require(rig && k && size, "epi_rig_intrinsics: null argument");
    Require(frame < rig->rig.size(), "epi_rig_intrinsics: frame index out of range");
    const epialign::CameraIntrinsics& in = rig->rig.frames[frame].intrinsics;
    k[0] = in.fx;
    k[1] = in.fy;
    k[2] = in.cx;
    k[3] = in.cy;
    size[0] = in.width;
    size[1] = in.height;
  });
}

void epi_rig_free(epi_rig* rig) { delete rig; }

epi_status epi_matches_load(const char* path, epi_matches** out) {
  return Guard([&] {
    Require(path && out, "epi_matches_load: null argument");
    *out = new epi_matches{epialign::io::LoadMatches(path)};
  });
}

epi_status epi_matches_save(const epi_matches* matches, const char* path) {
  return Guard([&] {
    Require(matches && path, "epi_matches_save: null argument");
    epialign::io::SaveMatches(matches->matches, path);
  });
}

size_t epi_matches_pair_count(const epi_matches* matches) {
  return matches ? matches->matches.pairs.size() : 0;
}

size_t epi_matches_correspondence_count(const epi_matches* matches) {
  return matches ? matches->matches.TotalCorrespondences() : 0;
}

void epi_matches_free(epi_matches* matches) { delete matches; }

epi_status epi_cloud_load(const char* path, epi_cloud** out) {
  return Guard([&] {
    Require(path && out, "epi_cloud_load: null argument");
    *out = new epi_cloud{epialign::io::LoadPly(path)};
  });
}

epi_status epi_cloud_save(const epi_cloud* cloud, const char* path) {
  return Guard([&] {
    Require(cloud && path, "epi_cloud_save: null argument");
    epialign::io::SavePly(cloud->cloud, path);
  });
}

size_t epi_cloud_size(const epi_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

epi_status epi_cloud_point(const epi_cloud* cloud, size_t index, double xyz[3]) {
  return Guard([&] {
    Require(cloud && xyz, "epi_cloud_point: null argument");
    Require(index < cloud->cloud.size(), "epi_cloud_point: index out of range");
    for (int c = 0; c < 3; ++c) xyz[c] = cloud->cloud.points[index][c];
  });
}

epi_status epi_random_cloud(const epi_rig* rig, size_t count, uint64_t seed,
                            epi_cloud** out) {
  return Guard([&] {
    Require(rig && out, "epi_random_cloud: null argument");
    Require(count >= 1, "epi_random_cloud: count must be at least 1");
    *out = new epi_cloud{epialign::RandomCloud(rig->rig, count, seed)};
  });
}

void epi_cloud_free(epi_cloud* cloud) { delete cloud; }

epi_status epi_weights_load(const char* path, const epi_matches* matches,
                            epi_weights** out) {
  return Guard([&] {
    Require(path && matches && out, "epi_weights_load: null argument");
    *out = new epi_weights{epialign::io::LoadWeightsCsv(path, matches->matches)};
  });
}

size_t epi_weights_size(const epi_weights* weights) {
  return weights ? weights->table.weights.size() : 0;
}

void epi_weights_free(epi_weights* weights) { delete weights; }

void epi_align_options_init(epi_align_options* options) {
  if (!options) return;
  const epialign::AlignerConfig defaults;
  options->iterations = defaults.iterations;
  options->lr0 = defaults.lr0;
  options->lr1 = defaults.lr1;
  options->lr2 = defaults.lr2;
  options->b1 = defaults.b1;
  options->b2 = defaults.b2;
  options->alpha = defaults.alpha;
  options->pair_angle_deg = defaults.pair_angle_deg;
  options->max_matches = defaults.max_correspondences;
  options->histogram_bins = defaults.histogram_bins;
  options->gauge_frame = defaults.gauge_frame;
  options->reweight_every = defaults.reweight_every;
  options->optimize_focal = defaults.optimize_focal ? 1 : 0;
  options->residual_mode = EPI_RESIDUAL_GEOMETRIC;
  options->weighting = EPI_WEIGHTING_ADAPTIVE;
  options->seed = defaults.seed;
}

epi_status epi_align(const epi_rig* rig, const epi_matches* matches,
                     const epi_align_options* options, epi_rig** refined,
                     char** report_json) {
  return Guard([&] {
    Require(rig && matches && options && refined, "epi_align: null argument");
    const epialign::AlignerConfig config = ToConfig(*options);
    epialign::AlignmentResult result =
        epialign::Align(rig->rig, matches->matches, config);
    json report = epialign::ToJson(result.report);
    report["histogram"] = epialign::ToJson(result.histogram);
    Emit(report, report_json);
    *refined = new epi_rig{std::move(result.rig)};
  });
}

epi_status epi_compute_weights(const epi_rig* rig, const epi_matches* matches,
                               const epi_align_options* options,
                               const char* weights_csv, const char* histogram_csv,
                               char** report_json) {
  return Guard([&] {
    Require(rig && matches && options && weights_csv,
            "epi_compute_weights: null argument");
    const epialign::AlignerConfig config = ToConfig(*options);
    epialign::ValidateMatches(matches->matches, rig->rig);
    std::size_t skipped = 0;
    const std::vector<double> residuals = epialign::EpipolarResiduals(
        rig->rig, matches->matches, config.residual_mode, &skipped);
    epialign::ResidualHistogram histogram;
    const epialign::WeightTable table = epialign::CorrespondenceWeights(
        residuals, matches->matches, config, &histogram);
    epialign::io::SaveWeightsCsv(matches->matches, residuals, &histogram, table,
                                 weights_csv);
    if (histogram_csv) epialign::io::SaveHistogramCsv(histogram, histogram_csv);
    json report = {{"correspondences", residuals.size()},
                   {"skipped_degenerate", skipped},
                   {"median_px", epialign::MedianResidual(residuals)},
                   {"learning_rate",
                    epialign::SelectLearningRate(epialign::MedianResidual(residuals), config)},
                   {"weighting", epialign::WeightingSchemeName(config.weighting)},
                   {"residual_mode", epialign::ResidualModeName(config.residual_mode)},
                   {"alpha", config.alpha},
                   {"avg_density", table.avg_density},
                   {"histogram", epialign::ToJson(histogram)}};
    Emit(report, report_json);
  });
}

epi_status epi_eval_pose(const epi_rig* pred, const epi_rig* gt, int order_invariant,
                         const char* trajectory_csv, char** report_json) {
  return Guard([&] {
    Require(pred && gt, "epi_eval_pose: null argument");
    const epialign::PoseMetrics metrics =
        epialign::EvaluatePoses(pred->rig, gt->rig, order_invariant != 0);
    const epialign::TrajectoryMetrics trajectory = epialign::AteRmse(pred->rig, gt->rig);
    if (trajectory_csv) epialign::SaveTrajectoryCsv(trajectory, trajectory_csv);
    json report = epialign::ToJson(metrics, true);
    report["trajectory"] = epialign::ToJson(trajectory);
    Emit(report, report_json);
  });
}

epi_status epi_eval_points(const epi_cloud* pred, const epi_cloud* gt,
                           const epi_rig* pred_cameras, const epi_rig* gt_cameras,
                           char** report_json) {
  return Guard([&] {
    Require(pred && gt, "epi_eval_points: null argument");
    Require((pred_cameras == nullptr) == (gt_cameras == nullptr),
            "epi_eval_points: prealignment needs both camera rigs");
    json report;
    epialign::ChamferMetrics metrics;
    if (pred_cameras) {
      const epialign::TrajectoryMetrics trajectory =
          epialign::AteRmse(pred_cameras->rig, gt_cameras->rig);
      if (trajectory.degenerate) {
        throw Error(ErrorCode::kDegenerateTrajectory,
                    "camera centers do not determine a similarity");
      }
      metrics = epialign::Chamfer(pred->cloud.points, gt->cloud.points,
                                  trajectory.similarity);
      report["prealign"] = epialign::ToJson(trajectory);
    } else {
      metrics = epialign::Chamfer(pred->cloud.points, gt->cloud.points);
    }
    json chamfer = epialign::ToJson(metrics);
    report.update(chamfer);
    report["pred_points"] = pred->cloud.size();
    report["gt_points"] = gt->cloud.size();
    Emit(report, report_json);
  });
}

epi_status epi_select_points(const epi_rig* rig, const epi_matches* matches,
                             const epi_weights* weights, const char* depth_dir,
                             double threshold, epi_cloud** out, char** report_json) {
  return Guard([&] {
    Require(rig && matches && weights && depth_dir && out,
            "epi_select_points: null argument");
    epialign::ValidateMatches(matches->matches, rig->rig);
    const auto depths = epialign::io::LoadDepthDirectory(depth_dir, rig->rig);
    epialign::PointSelectionStats stats;
    epialign::ScenePointCloud cloud = epialign::SelectMatchedPoints(
        matches->matches, weights->table, depths, rig->rig, threshold, &stats);
    json report = epialign::ToJson(stats);
    report["threshold"] = threshold;
    report["points"] = cloud.size();
    Emit(report, report_json);
    *out = new epi_cloud{std::move(cloud)};
  });
}

epi_status epi_synth(const char* config_path, const char* out_dir, const uint64_t* seed,
                     char** report_json) {
  return Guard([&] {
    Require(config_path && out_dir, "epi_synth: null argument");
    epialign::SynthConfig config = epialign::io::LoadSynthConfig(config_path);
    if (seed) config.seed = *seed;
    Emit(epialign::WriteSynthDataset(config, out_dir), report_json);
  });
}

epi_status epi_export_colmap(const epi_rig* rig, const epi_cloud* cloud,
                             const char* dir) {
  return Guard([&] {
    Require(rig && dir, "epi_export_colmap: null argument");
    epialign::io::ExportColmapText(rig->rig, cloud ? cloud->cloud : epialign::ScenePointCloud{},
                                   dir);
  });
}

}  // extern "C"
