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

#ifndef EPIALIGN_REPORT_HPP_
#define EPIALIGN_REPORT_HPP_

#include <filesystem>

#include "aligner.hpp"
#include "json.hpp"
#include "metrics.hpp"
#include "pointcloud.hpp"
#include "synth.hpp"
#include "weighting.hpp"

namespace epialign {

nlohmann::json ToJson(const AlignmentReport& report);
nlohmann::json ToJson(const ResidualHistogram& histogram);
// Summary statistics; per-pair errors only when include_pairs is set.
nlohmann::json ToJson(const PoseMetrics& metrics, bool include_pairs = false);
nlohmann::json ToJson(const TrajectoryMetrics& metrics);
nlohmann::json ToJson(const ChamferMetrics& metrics);
nlohmann::json ToJson(const PointSelectionStats& stats);
nlohmann::json ToJson(const SynthConfig& config);

// id, aligned predicted center, GT center per frame.
void SaveTrajectoryCsv(const TrajectoryMetrics& metrics,
                       const std::filesystem::path& path);

// Generates and perturbs a scene, then writes
//   cameras.json, matches.epmt, depth/<id>.pfm     (noisy inputs)
//   gt/cameras.json, gt/matches.epmt, gt/points.ply, gt/sidecar.json
// into `dir`. Returns the sidecar document.
nlohmann::json WriteSynthDataset(const SynthConfig& config,
                                 const std::filesystem::path& dir);

}  // namespace epialign

#endif  // EPIALIGN_REPORT_HPP_
