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

#include "error.hpp"
#include "io.hpp"
#include "report.hpp"

namespace epialign {

using nlohmann::json;

namespace {

json Vec3(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

void WriteText(const std::filesystem::path& path, const std::string& text) {
  io::WriteFileBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

}  // namespace

json ToJson(const AlignmentReport& report) {
  return {{"initial_median_px", report.initial_median_px},
          {"final_median_px", report.final_median_px},
          {"initial_loss", report.initial_loss},
          {"final_loss", report.final_loss},
          {"learning_rate", report.learning_rate},
          {"iterations", report.iterations},
          {"weighting", WeightingSchemeName(report.weighting)},
          {"residual_mode", ResidualModeName(report.residual_mode)},
          {"pairs_in_input", report.pairs_in_input},
          {"pairs_outside_view_angle", report.pairs_outside_view_angle},
          {"dropped_pairs", report.dropped_pairs},
          {"pairs_used", report.pairs_used},
          {"correspondences_used", report.correspondences_used},
          {"skipped_degenerate", report.skipped_degenerate},
          {"pose_graph_connected", report.pose_graph_connected},
          {"rotation_delta_deg", report.rotation_delta_deg},
          {"translation_delta", report.translation_delta},
          {"focal_scale", report.focal_scale},
          {"loss_trace", report.loss_trace}};
}

json ToJson(const ResidualHistogram& histogram) {
  return {{"clip_range", {histogram.clip_min, histogram.clip_max}},
          {"n_bins", histogram.n_bins()},
          {"bin_edges", histogram.bin_edges},
          {"densities", histogram.densities},
          {"counts", histogram.counts},
          {"overflow", histogram.overflow},
          {"tail_density", histogram.tail_density}};
}

json ToJson(const PoseMetrics& metrics, bool include_pairs) {
  json doc = {{"mean_rre_deg", metrics.mean_rre_deg},
              {"mean_rte_deg", metrics.mean_rte_deg},
              {"auc_at_30", metrics.auc_at_30},
              {"pair_count", metrics.pair_count},
              {"zero_baseline_pairs", metrics.zero_baseline_pairs},
              {"order_invariant", metrics.order_invariant}};
  if (include_pairs) {
    json pairs = json::array();
    for (const PairError& e : metrics.pairs) {
      pairs.push_back({{"i", e.i},
                       {"j", e.j},
                       {"rre_deg", e.rre_deg},
                       {"rte_deg", e.rte_deg},
                       {"zero_baseline", e.zero_baseline}});
    }
    doc["pairs"] = std::move(pairs);
  }
  return doc;
}

json ToJson(const TrajectoryMetrics& metrics) {
  json rotation = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rotation.push_back(metrics.similarity.rotation(r, c));
  }
  return {{"ate_rmse", metrics.ate_rmse},
          {"degenerate", metrics.degenerate},
          {"frames", metrics.ids.size()},
          {"similarity",
           {{"scale", metrics.similarity.scale},
            {"rotation", rotation},
            {"translation", Vec3(metrics.similarity.translation)}}}};
}

json ToJson(const ChamferMetrics& metrics) {
  return {{"accuracy", metrics.accuracy},
          {"completeness", metrics.completeness},
          {"overall", metrics.overall}};
}

json ToJson(const PointSelectionStats& stats) {
  return {{"considered", stats.considered},
          {"above_threshold", stats.above_threshold},
          {"emitted_correspondences", stats.emitted_correspondences},
          {"skipped_invalid_depth", stats.skipped_invalid_depth}};
}

json ToJson(const SynthConfig& config) {
  return {{"layout", CameraLayoutName(config.layout)},
          {"camera_count", config.camera_count},
          {"point_count", config.point_count},
          {"width", config.width},
          {"height", config.height},
          {"focal_px", config.focal_px},
          {"scene_radius", config.scene_radius},
          {"camera_distance", config.camera_distance},
          {"orbit_height", config.orbit_height},
          {"max_pair_angle_deg", config.max_pair_angle_deg},
          {"anchor_first_camera", config.anchor_first_camera},
          {"seed", config.seed},
          {"noise",
           {{"rotation_sigma_deg", config.noise.rotation_sigma_deg},
            {"translation_sigma", config.noise.translation_sigma},
            {"pixel_sigma", config.noise.pixel_sigma},
            {"outlier_fraction", config.noise.outlier_fraction}}}};
}

void SaveTrajectoryCsv(const TrajectoryMetrics& metrics,
                       const std::filesystem::path& path) {
  std::string text = "id,pred_x,pred_y,pred_z,gt_x,gt_y,gt_z\n";
  char buffer[256];
  for (std::size_t n = 0; n < metrics.ids.size(); ++n) {
    const Eigen::Vector3d& p = metrics.aligned_pred_centers[n];
    const Eigen::Vector3d& g = metrics.gt_centers[n];
    std::snprintf(buffer, sizeof(buffer), ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  p[0], p[1], p[2], g[0], g[1], g[2]);
    text += metrics.ids[n] + buffer;
  }
  WriteText(path, text);
}

json WriteSynthDataset(const SynthConfig& config, const std::filesystem::path& dir) {
  config.Validate();
  const SynthScene scene = Generate(config);
  const PerturbedScene noisy = Perturb(scene.rig, scene.matches, config.noise,
                                       config.seed, config.scene_radius);

  io::SaveRig(noisy.rig, dir / "cameras.json");
  io::SaveMatches(noisy.matches, dir / "matches.epmt");
  for (std::size_t f = 0; f < scene.rig.size(); ++f) {
    io::SavePfm(scene.depths[f], io::DepthPath(dir / "depth", scene.rig.frames[f]));
  }
  io::SaveRig(scene.rig, dir / "gt" / "cameras.json");
  io::SaveMatches(scene.matches, dir / "gt" / "matches.epmt");
  io::SavePly(scene.points, dir / "gt" / "points.ply");

  json outliers = json::array();
  for (std::size_t p = 0; p < noisy.outliers.size(); ++p) {
    for (std::size_t c = 0; c < noisy.outliers[p].size(); ++c) {
      if (noisy.outliers[p][c]) outliers.push_back({p, c});
    }
  }
  json sidecar = {{"config", ToJson(config)},
                  {"frames", scene.rig.size()},
                  {"points", scene.points.size()},
                  {"pairs", scene.matches.pairs.size()},
                  {"correspondences", scene.matches.TotalCorrespondences()},
                  {"outlier_count", noisy.outlier_count},
                  {"realized_mean_rre_deg", noisy.realized_mean_rre_deg},
                  {"realized_mean_rte_deg", noisy.realized_mean_rte_deg},
                  {"outliers", outliers}};
  WriteText(dir / "gt" / "sidecar.json", sidecar.dump(2) + "\n");
  sidecar.erase("outliers");
  sidecar["out"] = dir.string();
  return sidecar;
}

}  // namespace epialign
