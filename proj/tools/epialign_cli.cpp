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

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "epialign/epialign.h"

namespace {

constexpr int kExitUsage = 2;

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using RigPtr = std::unique_ptr<epi_rig, Deleter<epi_rig, epi_rig_free>>;
using MatchesPtr = std::unique_ptr<epi_matches, Deleter<epi_matches, epi_matches_free>>;
using CloudPtr = std::unique_ptr<epi_cloud, Deleter<epi_cloud, epi_cloud_free>>;
using WeightsPtr = std::unique_ptr<epi_weights, Deleter<epi_weights, epi_weights_free>>;

// Carries a failed status out of a subcommand.
struct Failure {
  epi_status status;
};

void Check(epi_status status) {
  if (status != EPI_OK) throw Failure{status};
}

RigPtr LoadRig(const std::string& path) {
  epi_rig* rig = nullptr;
  Check(epi_rig_load(path.c_str(), &rig));
  return RigPtr(rig);
}

MatchesPtr LoadMatches(const std::string& path) {
  epi_matches* matches = nullptr;
  Check(epi_matches_load(path.c_str(), &matches));
  return MatchesPtr(matches);
}

CloudPtr LoadCloud(const std::string& path) {
  epi_cloud* cloud = nullptr;
  Check(epi_cloud_load(path.c_str(), &cloud));
  return CloudPtr(cloud);
}

std::string TakeString(char* text) {
  std::string out = text ? text : "";
  epi_string_free(text);
  return out;
}

void EmitReport(const std::string& json, const std::string& report_path) {
  if (report_path.empty()) {
    std::cout << json << "\n";
    return;
  }
  std::ofstream out(report_path, std::ios::trunc);
  out << json << "\n";
  if (!out) {
    std::cerr << "error: cannot write report '" << report_path << "'\n";
    throw Failure{EPI_ERR_IO};
  }
}

struct AlignFlags {
  epi_align_options options{};
  std::string residual_mode = "geometric";
  std::string weighting = "adaptive";
  bool optimize_focal = false;

  AlignFlags() { epi_align_options_init(&options); }

  void Resolve() {
    options.residual_mode =
        residual_mode == "algebraic" ? EPI_RESIDUAL_ALGEBRAIC : EPI_RESIDUAL_GEOMETRIC;
    if (weighting == "uniform") options.weighting = EPI_WEIGHTING_UNIFORM;
    else if (weighting == "confidence") options.weighting = EPI_WEIGHTING_CONFIDENCE;
    else options.weighting = EPI_WEIGHTING_ADAPTIVE;
    options.optimize_focal = optimize_focal ? 1 : 0;
  }
};

void AddWeightingFlags(CLI::App* cmd, AlignFlags* flags) {
  cmd->add_option("--alpha", flags->options.alpha, "Weight exponent")
      ->capture_default_str();
  cmd->add_option("--bins", flags->options.histogram_bins, "Residual histogram bins")
      ->capture_default_str();
  cmd->add_option("--residual-mode", flags->residual_mode, "geometric or algebraic")
      ->check(CLI::IsMember({"geometric", "algebraic"}))
      ->capture_default_str();
  cmd->add_option("--weighting", flags->weighting, "adaptive, uniform or confidence")
      ->check(CLI::IsMember({"adaptive", "uniform", "confidence"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epipolar global alignment and pose/geometry evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(epi_version()));

  std::string report_path;
  std::function<void()> run;

  // synth
  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--config", synth_config, "Scene config JSON")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the config seed");
  synth->add_option("--report", report_path, "Write the JSON report here");
  synth->callback([&] {
    run = [&] {
      char* report = nullptr;
      std::uint64_t seed = synth_seed.value_or(0);
      Check(epi_synth(synth_config.c_str(), synth_out.c_str(),
                      synth_seed ? &seed : nullptr, &report));
      EmitReport(TakeString(report), report_path);
    };
  });

  // align
  std::string align_cameras, align_matches, align_out;
  AlignFlags align_flags;
  CLI::App* align = app.add_subcommand("align", "Refine cameras against matches");
  align->add_option("--cameras", align_cameras, "Input camera rig JSON")->required();
  align->add_option("--matches", align_matches, "Match file")->required();
  align->add_option("--out", align_out, "Output directory")->required();
  align->add_option("--iterations", align_flags.options.iterations)->capture_default_str();
  align->add_option("--lr0", align_flags.options.lr0)->capture_default_str();
  align->add_option("--lr1", align_flags.options.lr1)->capture_default_str();
  align->add_option("--lr2", align_flags.options.lr2)->capture_default_str();
  align->add_option("--b1", align_flags.options.b1, "px")->capture_default_str();
  align->add_option("--b2", align_flags.options.b2, "px")->capture_default_str();
  align->add_option("--pair-angle-deg", align_flags.options.pair_angle_deg)
      ->capture_default_str();
  align->add_option("--max-matches", align_flags.options.max_matches,
                    "Correspondence cap per pair")
      ->capture_default_str();
  align->add_option("--gauge-frame", align_flags.options.gauge_frame)->capture_default_str();
  align->add_option("--reweight-every", align_flags.options.reweight_every,
                    "Recompute weights every N iterations (0 = frozen)")
      ->capture_default_str();
  align->add_flag("--optimize-focal", align_flags.optimize_focal,
                  "Optimize one log focal scale per camera");
  align->add_option("--seed", align_flags.options.seed, "Subsampling seed")
      ->capture_default_str();
  align->add_option("--report", report_path, "Write the JSON report here");
  AddWeightingFlags(align, &align_flags);
  align->callback([&] {
    run = [&] {
      align_flags.Resolve();
      RigPtr rig = LoadRig(align_cameras);
      MatchesPtr matches = LoadMatches(align_matches);
      epi_rig* refined = nullptr;
      char* report = nullptr;
      Check(epi_align(rig.get(), matches.get(), &align_flags.options, &refined, &report));
      RigPtr refined_ptr(refined);
      const std::string json = TakeString(report);
      const std::string out_dir = align_out + "/";
      Check(epi_rig_save(refined, (out_dir + "cameras.json").c_str()));
      std::ofstream(out_dir + "report.json", std::ios::trunc) << json << "\n";
      EmitReport(json, report_path);
    };
  });

  // weights
  std::string weights_cameras, weights_matches, weights_out, weights_histogram;
  AlignFlags weights_flags;
  CLI::App* weights = app.add_subcommand("weights", "Export residual weights as CSV");
  weights->add_option("--cameras", weights_cameras)->required();
  weights->add_option("--matches", weights_matches)->required();
  weights->add_option("--out", weights_out, "Weight table CSV")->required();
  weights->add_option("--histogram", weights_histogram, "Histogram CSV");
  weights->add_option("--report", report_path, "Write the JSON report here");
  AddWeightingFlags(weights, &weights_flags);
  weights->callback([&] {
    run = [&] {
      weights_flags.Resolve();
      RigPtr rig = LoadRig(weights_cameras);
      MatchesPtr matches = LoadMatches(weights_matches);
      char* report = nullptr;
      Check(epi_compute_weights(rig.get(), matches.get(), &weights_flags.options,
                                weights_out.c_str(),
                                weights_histogram.empty() ? nullptr
                                                          : weights_histogram.c_str(),
                                &report));
      EmitReport(TakeString(report), report_path);
    };
  });

  // eval-pose
  std::string pose_pred, pose_gt, pose_csv;
  bool order_invariant = false;
  CLI::App* eval_pose = app.add_subcommand("eval-pose", "RRE, RTE, AUC@30 and ATE");
  eval_pose->add_option("--pred", pose_pred)->required();
  eval_pose->add_option("--gt", pose_gt)->required();
  eval_pose->add_flag("--order-invariant", order_invariant,
                      "Count both directions of every pair");
  eval_pose->add_option("--trajectory-csv", pose_csv, "Aligned camera centers");
  eval_pose->add_option("--report", report_path, "Write the JSON report here");
  eval_pose->callback([&] {
    run = [&] {
      RigPtr pred = LoadRig(pose_pred);
      RigPtr gt = LoadRig(pose_gt);
      char* report = nullptr;
      Check(epi_eval_pose(pred.get(), gt.get(), order_invariant ? 1 : 0,
                          pose_csv.empty() ? nullptr : pose_csv.c_str(), &report));
      EmitReport(TakeString(report), report_path);
    };
  });

  // eval-points
  std::string points_pred, points_gt, points_pred_cams, points_gt_cams;
  bool prealign = false;
  CLI::App* eval_points = app.add_subcommand("eval-points", "Chamfer metrics");
  eval_points->add_option("--pred", points_pred, "Predicted PLY")->required();
  eval_points->add_option("--gt", points_gt, "Ground-truth PLY")->required();
  eval_points->add_flag("--prealign", prealign,
                        "Map pred through the camera-center similarity first");
  eval_points->add_option("--pred-cameras", points_pred_cams, "Rig of the prediction");
  eval_points->add_option("--gt-cameras", points_gt_cams, "Ground-truth rig");
  eval_points->add_option("--report", report_path, "Write the JSON report here");
  eval_points->callback([&] {
    if (prealign && (points_pred_cams.empty() || points_gt_cams.empty())) {
      throw CLI::ValidationError("--prealign", "needs --pred-cameras and --gt-cameras");
    }
    run = [&] {
      CloudPtr pred = LoadCloud(points_pred);
      CloudPtr gt = LoadCloud(points_gt);
      RigPtr pred_cams, gt_cams;
      if (prealign) {
        pred_cams = LoadRig(points_pred_cams);
        gt_cams = LoadRig(points_gt_cams);
      }
      char* report = nullptr;
      Check(epi_eval_points(pred.get(), gt.get(), pred_cams.get(), gt_cams.get(), &report));
      EmitReport(TakeString(report), report_path);
    };
  });

  // select-points
  std::string select_cameras, select_matches, select_weights, select_depth, select_out;
  double threshold = 0.3;
  CLI::App* select = app.add_subcommand("select-points", "Point cloud from weighted matches");
  select->add_option("--cameras", select_cameras)->required();
  select->add_option("--matches", select_matches)->required();
  select->add_option("--weights", select_weights, "Weight table CSV")->required();
  select->add_option("--depth-dir", select_depth, "Directory of <frame id>.pfm")->required();
  select->add_option("--threshold", threshold, "Keep weights strictly above this")
      ->capture_default_str();
  select->add_option("--out", select_out, "Output PLY")->required();
  select->add_option("--report", report_path, "Write the JSON report here");
  select->callback([&] {
    run = [&] {
      RigPtr rig = LoadRig(select_cameras);
      MatchesPtr matches = LoadMatches(select_matches);
      epi_weights* table = nullptr;
      Check(epi_weights_load(select_weights.c_str(), matches.get(), &table));
      WeightsPtr table_ptr(table);
      epi_cloud* cloud = nullptr;
      char* report = nullptr;
      Check(epi_select_points(rig.get(), matches.get(), table, select_depth.c_str(),
                              threshold, &cloud, &report));
      CloudPtr cloud_ptr(cloud);
      Check(epi_cloud_save(cloud, select_out.c_str()));
      EmitReport(TakeString(report), report_path);
    };
  });

  // random-points
  std::string random_cameras, random_out;
  std::size_t random_count = 500000;
  std::uint64_t random_seed = 0;
  CLI::App* random = app.add_subcommand(
      "random-points", "Uniform points in the inflated camera bounding box");
  random->add_option("--cameras", random_cameras)->required();
  random->add_option("--count", random_count)->capture_default_str();
  random->add_option("--seed", random_seed)->capture_default_str();
  random->add_option("--out", random_out, "Output PLY")->required();
  random->callback([&] {
    run = [&] {
      RigPtr rig = LoadRig(random_cameras);
      epi_cloud* cloud = nullptr;
      Check(epi_random_cloud(rig.get(), random_count, random_seed, &cloud));
      CloudPtr cloud_ptr(cloud);
      Check(epi_cloud_save(cloud, random_out.c_str()));
    };
  });

  // export-colmap
  std::string colmap_cameras, colmap_points, colmap_out;
  CLI::App* colmap = app.add_subcommand("export-colmap", "Write a COLMAP text model");
  colmap->add_option("--cameras", colmap_cameras)->required();
  colmap->add_option("--points", colmap_points, "PLY for points3D.txt");
  colmap->add_option("--out", colmap_out, "Output directory")->required();
  colmap->callback([&] {
    run = [&] {
      RigPtr rig = LoadRig(colmap_cameras);
      CloudPtr cloud;
      if (!colmap_points.empty()) cloud = LoadCloud(colmap_points);
      Check(epi_export_colmap(rig.get(), cloud.get(), colmap_out.c_str()));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    run();
  } catch (const Failure& failure) {
    const char* message = epi_last_error();
    std::cerr << "error: " << (*message ? message : epi_status_name(failure.status))
              << "\n";
    return epi_status_exit_code(failure.status);
  }
  return 0;
}
