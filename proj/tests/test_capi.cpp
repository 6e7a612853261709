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

#include <epialign/epialign.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
  fs::path root;
  Workspace() {
    std::random_device rd;
    root = fs::temp_directory_path() / ("epialign_capi_" + std::to_string(rd()));
    fs::create_directories(root);
    std::ofstream(root / "synth.json")
        << R"({"camera_count": 16, "point_count": 400, "seed": 3,
              "noise": {"rotation_sigma_deg": 0.5, "translation_sigma": 0.01,
                        "pixel_sigma": 0.3}})";
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  std::string operator/(const std::string& name) const { return (root / name).string(); }
};

json TakeJson(char* text) {
  REQUIRE(text != nullptr);
  json doc = json::parse(text);
  epi_string_free(text);
  return doc;
}

}  // namespace

TEST_CASE("status names and exit codes") {
  CHECK(std::string(epi_version()).size() > 0);
  CHECK(std::string(epi_status_name(EPI_OK)) == "Ok");
  CHECK(std::string(epi_status_name(EPI_ERR_PARSE)) == "ParseError");
  CHECK(std::string(epi_status_name(EPI_ERR_INVALID_CORRESPONDENCE)) == "InvalidCorrespondence");
  CHECK(epi_status_exit_code(EPI_OK) == 0);
  CHECK(epi_status_exit_code(EPI_ERR_INVALID_ARGUMENT) == 2);
  CHECK(epi_status_exit_code(EPI_ERR_PARSE) == 3);
  CHECK(epi_status_exit_code(EPI_ERR_IO) == 3);
  CHECK(epi_status_exit_code(EPI_ERR_INVALID_CORRESPONDENCE) == 3);
  CHECK(epi_status_exit_code(EPI_ERR_DEGENERATE_ROTATION_6D) == 4);
  CHECK(epi_status_exit_code(EPI_ERR_ZERO_TOTAL_WEIGHT) == 4);
  CHECK(epi_status_exit_code(EPI_ERR_INTERNAL) == 3);
}

TEST_CASE("errors set the last error message") {
  epi_rig* rig = nullptr;
  CHECK(epi_rig_load("/nonexistent/cameras.json", &rig) == EPI_ERR_IO);
  CHECK(rig == nullptr);
  CHECK(std::string(epi_last_error()).find("/nonexistent/cameras.json") != std::string::npos);
  CHECK(epi_rig_load(nullptr, &rig) == EPI_ERR_INVALID_ARGUMENT);
  CHECK(epi_rig_load("x", nullptr) == EPI_ERR_INVALID_ARGUMENT);

  Workspace ws;
  std::ofstream(ws / "bad.json") << "{\"format_version\": 7, \"convention\": "
                                    "\"world_to_camera\", \"frames\": []}";
  CHECK(epi_rig_load((ws / "bad.json").c_str(), &rig) == EPI_ERR_VERSION_MISMATCH);
  std::ofstream(ws / "short.epmt") << "EPMT";
  epi_matches* matches = nullptr;
  CHECK(epi_matches_load((ws / "short.epmt").c_str(), &matches) == EPI_ERR_PARSE);
  CHECK(std::string(epi_last_error()).find("truncated") != std::string::npos);
  epi_string_free(nullptr);
  epi_rig_free(nullptr);
  epi_matches_free(nullptr);
  epi_cloud_free(nullptr);
  epi_weights_free(nullptr);
}

TEST_CASE("synth, align, evaluate") {
  Workspace ws;
  char* report = nullptr;
  const uint64_t seed = 11;
  REQUIRE(epi_synth((ws / "synth.json").c_str(), (ws / "data").c_str(), &seed, &report) == EPI_OK);
  const json synth = TakeJson(report);
  CHECK(synth["config"]["seed"] == 11);

  epi_rig* noisy = nullptr;
  epi_rig* gt = nullptr;
  epi_matches* matches = nullptr;
  REQUIRE(epi_rig_load((ws / "data/cameras.json").c_str(), &noisy) == EPI_OK);
  REQUIRE(epi_rig_load((ws / "data/gt/cameras.json").c_str(), &gt) == EPI_OK);
  REQUIRE(epi_matches_load((ws / "data/matches.epmt").c_str(), &matches) == EPI_OK);
  CHECK(epi_rig_frame_count(noisy) == 16);
  CHECK(epi_matches_pair_count(matches) > 0);
  CHECK(epi_matches_correspondence_count(matches) > 100);

  double R[9], t[3], k[4];
  int size[2];
  REQUIRE(epi_rig_pose(gt, 0, R, t) == EPI_OK);
  CHECK(R[0] == 1.0);
  CHECK(R[4] == 1.0);
  CHECK(t[2] == 0.0);
  REQUIRE(epi_rig_intrinsics(gt, 0, k, size) == EPI_OK);
  CHECK(k[0] == 500.0);
  CHECK(size[0] == 640);
  CHECK(epi_rig_pose(gt, 99, R, t) == EPI_ERR_INVALID_ARGUMENT);

  epi_align_options options;
  epi_align_options_init(&options);
  CHECK(options.iterations == 300);
  CHECK(options.histogram_bins == 100);
  CHECK(options.alpha == 0.5);
  epi_rig* refined = nullptr;
  REQUIRE(epi_align(noisy, matches, &options, &refined, &report) == EPI_OK);
  const json align = TakeJson(report);
  CHECK(align["final_median_px"].get<double>() < align["initial_median_px"].get<double>());
  CHECK(align["histogram"]["densities"].size() == 100);

  REQUIRE(epi_eval_pose(noisy, gt, 1, nullptr, &report) == EPI_OK);
  const json before = TakeJson(report);
  REQUIRE(epi_eval_pose(refined, gt, 1, (ws / "traj.csv").c_str(), &report) == EPI_OK);
  const json after = TakeJson(report);
  CHECK(after["mean_rre_deg"].get<double>() < before["mean_rre_deg"].get<double>());
  CHECK(after["auc_at_30"].get<double>() >= before["auc_at_30"].get<double>());
  CHECK(fs::exists(ws / "traj.csv"));

  REQUIRE(epi_rig_save(refined, (ws / "refined.json").c_str()) == EPI_OK);
  epi_rig* reloaded = nullptr;
  REQUIRE(epi_rig_load((ws / "refined.json").c_str(), &reloaded) == EPI_OK);
  double R2[9], t2[3];
  epi_rig_pose(refined, 5, R, t);
  epi_rig_pose(reloaded, 5, R2, t2);
  CHECK(std::memcmp(R, R2, sizeof R) == 0);
  CHECK(std::memcmp(t, t2, sizeof t) == 0);

  options.iterations = 0;
  CHECK(epi_align(noisy, matches, &options, &refined, &report) == EPI_ERR_INVALID_ARGUMENT);

  epi_rig_free(reloaded);
  epi_rig_free(refined);
  epi_matches_free(matches);
  epi_rig_free(gt);
  epi_rig_free(noisy);
}

TEST_CASE("weights, point selection and clouds") {
  Workspace ws;
  char* report = nullptr;
  REQUIRE(epi_synth((ws / "synth.json").c_str(), (ws / "data").c_str(), nullptr, &report) ==
          EPI_OK);
  epi_string_free(report);
  epi_rig* rig = nullptr;
  epi_matches* matches = nullptr;
  REQUIRE(epi_rig_load((ws / "data/gt/cameras.json").c_str(), &rig) == EPI_OK);
  REQUIRE(epi_matches_load((ws / "data/gt/matches.epmt").c_str(), &matches) == EPI_OK);

  epi_align_options options;
  epi_align_options_init(&options);
  REQUIRE(epi_compute_weights(rig, matches, &options, (ws / "w.csv").c_str(),
                              (ws / "h.csv").c_str(), &report) == EPI_OK);
  const json weights = TakeJson(report);
  CHECK(weights["correspondences"] == epi_matches_correspondence_count(matches));
  CHECK(fs::exists(ws / "h.csv"));

  epi_weights* w = nullptr;
  REQUIRE(epi_weights_load((ws / "w.csv").c_str(), matches, &w) == EPI_OK);
  CHECK(epi_weights_size(w) == epi_matches_correspondence_count(matches));

  epi_cloud* selected = nullptr;
  REQUIRE(epi_select_points(rig, matches, w, (ws / "data/depth").c_str(), 0.3, &selected,
                            &report) == EPI_OK);
  const json stats = TakeJson(report);
  CHECK(epi_cloud_size(selected) == 2 * stats["emitted_correspondences"].get<size_t>());
  epi_cloud* unused = nullptr;
  CHECK(epi_select_points(rig, matches, w, (ws / "missing").c_str(), 0.3, &unused, &report) ==
        EPI_ERR_IO);
  fs::create_directories(ws / "empty");
  CHECK(epi_select_points(rig, matches, w, (ws / "empty").c_str(), 0.3, &unused, &report) ==
        EPI_ERR_MISSING_DEPTH_MAP);
  CHECK(unused == nullptr);

  epi_cloud* gt_points = nullptr;
  REQUIRE(epi_cloud_load((ws / "data/gt/points.ply").c_str(), &gt_points) == EPI_OK);
  REQUIRE(epi_eval_points(selected, gt_points, nullptr, nullptr, &report) == EPI_OK);
  const json chamfer = TakeJson(report);
  CHECK(chamfer["accuracy"].get<double>() < 1e-5);
  CHECK(epi_eval_points(selected, gt_points, rig, nullptr, &report) == EPI_ERR_INVALID_ARGUMENT);

  epi_cloud* random = nullptr;
  REQUIRE(epi_random_cloud(rig, 1000, 5, &random) == EPI_OK);
  CHECK(epi_cloud_size(random) == 1000);
  double xyz[3];
  CHECK(epi_cloud_point(random, 0, xyz) == EPI_OK);
  CHECK(std::isfinite(xyz[0]));
  CHECK(epi_cloud_point(random, 1000, xyz) == EPI_ERR_INVALID_ARGUMENT);
  REQUIRE(epi_cloud_save(random, (ws / "random.ply").c_str()) == EPI_OK);

  REQUIRE(epi_export_colmap(rig, selected, (ws / "colmap").c_str()) == EPI_OK);
  CHECK(fs::exists(ws / "colmap/images.txt"));
  REQUIRE(epi_export_colmap(rig, nullptr, (ws / "colmap2").c_str()) == EPI_OK);

  epi_cloud_free(random);
  epi_cloud_free(gt_points);
  epi_cloud_free(selected);
  epi_weights_free(w);
  epi_matches_free(matches);
  epi_rig_free(rig);
}
