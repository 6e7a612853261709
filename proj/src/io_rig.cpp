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

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

#include "error.hpp"
#include "io.hpp"

namespace epialign::io {

using nlohmann::json;

namespace {

double RequireNumber(const json& node, const std::string& path) {
  if (!node.is_number()) {
    throw Error(ErrorCode::kParseError, path + ": expected a number");
  }
  return node.get<double>();
}

int RequireInt(const json& node, const std::string& path) {
  if (!node.is_number_integer()) {
    throw Error(ErrorCode::kParseError, path + ": expected an integer");
  }
  return node.get<int>();
}

const json& RequireField(const json& node, const char* key,
                         const std::string& path) {
  if (!node.is_object() || !node.contains(key)) {
    throw Error(ErrorCode::kParseError,
                path + ": missing field '" + key + "'");
  }
  return node.at(key);
}

}  // namespace

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  }
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                "cannot open '" + path.string() + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
  }
}

CameraRig ParseRig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "camera rig JSON at byte " << e.byte << ": " << e.what();
    throw Error(ErrorCode::kParseError, msg.str());
  }
  const int version = RequireInt(RequireField(doc, "format_version", "$"),
                                 "$.format_version");
  if (version != kRigFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "camera rig format_version " + std::to_string(version) +
                    " (supported: " + std::to_string(kRigFormatVersion) + ")");
  }
  const json& convention = RequireField(doc, "convention", "$");
  if (!convention.is_string() || convention.get<std::string>() != "world_to_camera") {
    throw Error(ErrorCode::kParseError,
                "$.convention: expected \"world_to_camera\"");
  }
  const json& frames = RequireField(doc, "frames", "$");
  if (!frames.is_array()) {
    throw Error(ErrorCode::kParseError, "$.frames: expected an array");
  }

  CameraRig rig;
  std::set<std::string> ids;
  for (std::size_t n = 0; n < frames.size(); ++n) {
    const std::string path = "$.frames[" + std::to_string(n) + "]";
    const json& f = frames[n];
    Frame frame;
    const json& id = RequireField(f, "id", path);
    if (!id.is_string()) {
      throw Error(ErrorCode::kParseError, path + ".id: expected a string");
    }
    frame.id = id.get<std::string>();
    if (!ids.insert(frame.id).second) {
      throw Error(ErrorCode::kParseError,
                  path + ".id: duplicate frame id '" + frame.id + "'");
    }
    CameraIntrinsics& k = frame.intrinsics;
    k.width = RequireInt(RequireField(f, "width", path), path + ".width");
    k.height = RequireInt(RequireField(f, "height", path), path + ".height");
    k.fx = RequireNumber(RequireField(f, "fx", path), path + ".fx");
    k.fy = RequireNumber(RequireField(f, "fy", path), path + ".fy");
    k.cx = RequireNumber(RequireField(f, "cx", path), path + ".cx");
    k.cy = RequireNumber(RequireField(f, "cy", path), path + ".cy");
    if (!k.IsValid()) {
      throw Error(ErrorCode::kParseError,
                  path + ": intrinsics violate fx, fy > 0 and principal point "
                         "inside the image");
    }
    const json& R = RequireField(f, "R", path);
    const json& t = RequireField(f, "t", path);
    if (!R.is_array() || R.size() != 9) {
      throw Error(ErrorCode::kParseError, path + ".R: expected 9 numbers");
    }
    if (!t.is_array() || t.size() != 3) {
      throw Error(ErrorCode::kParseError, path + ".t: expected 3 numbers");
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        frame.pose.R(r, c) = RequireNumber(
            R[3 * r + c], path + ".R[" + std::to_string(3 * r + c) + "]");
      }
      frame.pose.t[r] =
          RequireNumber(t[r], path + ".t[" + std::to_string(r) + "]");
    }
    if (!IsRotation(frame.pose.R)) {
      throw Error(ErrorCode::kRotationInvalid,
                  path + ".R is not a rotation (R^T R = I and det R = 1 "
                         "within 1e-9)");
    }
    rig.frames.push_back(std::move(frame));
  }
  return rig;
}

std::string SerializeRig(const CameraRig& rig) {
  json frames = json::array();
  for (const Frame& frame : rig.frames) {
    json R = json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) R.push_back(frame.pose.R(r, c));
    }
    frames.push_back({{"id", frame.id},
                      {"width", frame.intrinsics.width},
                      {"height", frame.intrinsics.height},
                      {"fx", frame.intrinsics.fx},
                      {"fy", frame.intrinsics.fy},
                      {"cx", frame.intrinsics.cx},
                      {"cy", frame.intrinsics.cy},
                      {"R", R},
                      {"t", {frame.pose.t[0], frame.pose.t[1], frame.pose.t[2]}}});
  }
  json doc = {{"format_version", kRigFormatVersion},
              {"convention", "world_to_camera"},
              {"frames", frames}};
  return doc.dump(2) + "\n";
}

CameraRig LoadRig(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return ParseRig(std::string(bytes.begin(), bytes.end()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void SaveRig(const CameraRig& rig, const std::filesystem::path& path) {
  const std::string text = SerializeRig(rig);
  WriteFileBytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                 text.size()));
}

SynthConfig ParseSynthConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "synth config JSON at byte " << e.byte << ": " << e.what();
    throw Error(ErrorCode::kParseError, msg.str());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "$: expected an object");
  }
  static const std::set<std::string> kKnown = {
      "layout", "camera_count", "point_count", "width", "height", "focal_px",
      "scene_radius", "camera_distance", "orbit_height", "max_pair_angle_deg",
      "anchor_first_camera", "noise", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.count(key)) {
      throw Error(ErrorCode::kParseError, "$." + key + ": unknown field");
    }
  }
  SynthConfig cfg;
  try {
    if (doc.contains("layout")) cfg.layout = ParseCameraLayout(doc["layout"].get<std::string>());
    if (doc.contains("camera_count")) cfg.camera_count = doc["camera_count"].get<std::size_t>();
    if (doc.contains("point_count")) cfg.point_count = doc["point_count"].get<std::size_t>();
    if (doc.contains("width")) cfg.width = doc["width"].get<int>();
    if (doc.contains("height")) cfg.height = doc["height"].get<int>();
    if (doc.contains("focal_px")) cfg.focal_px = doc["focal_px"].get<double>();
    if (doc.contains("scene_radius")) cfg.scene_radius = doc["scene_radius"].get<double>();
    if (doc.contains("camera_distance")) cfg.camera_distance = doc["camera_distance"].get<double>();
    if (doc.contains("orbit_height")) cfg.orbit_height = doc["orbit_height"].get<double>();
    if (doc.contains("max_pair_angle_deg")) cfg.max_pair_angle_deg = doc["max_pair_angle_deg"].get<double>();
    if (doc.contains("anchor_first_camera")) cfg.anchor_first_camera = doc["anchor_first_camera"].get<bool>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("noise")) {
      const json& noise = doc["noise"];
      if (!noise.is_object()) {
        throw Error(ErrorCode::kParseError, "$.noise: expected an object");
      }
      cfg.noise.rotation_sigma_deg = noise.value("rotation_sigma_deg", 0.0);
      cfg.noise.translation_sigma = noise.value("translation_sigma", 0.0);
      cfg.noise.pixel_sigma = noise.value("pixel_sigma", 0.0);
      cfg.noise.outlier_fraction = noise.value("outlier_fraction", 0.0);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("synth config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

SynthConfig LoadSynthConfig(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  return ParseSynthConfig(std::string(bytes.begin(), bytes.end()));
}

}  // namespace epialign::io
