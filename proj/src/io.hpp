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

#ifndef EPIALIGN_IO_HPP_
#define EPIALIGN_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "pairing.hpp"
#include "pointcloud.hpp"
#include "synth.hpp"
#include "weighting.hpp"

namespace epialign::io {

inline constexpr int kRigFormatVersion = 1;
inline constexpr std::uint32_t kMatchFormatVersion = 1;
inline constexpr char kMatchMagic[4] = {'E', 'P', 'M', 'T'};

// Whole-file helpers; both throw IoError naming the path.
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

// Camera rig JSON document, world-to-camera convention.
CameraRig ParseRig(const std::string& text);
std::string SerializeRig(const CameraRig& rig);
CameraRig LoadRig(const std::filesystem::path& path);
void SaveRig(const CameraRig& rig, const std::filesystem::path& path);

// Binary little-endian correspondence file. Coordinates are stored as f32.
MatchSet DecodeMatches(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodeMatches(const MatchSet& matches);
MatchSet LoadMatches(const std::filesystem::path& path);
void SaveMatches(const MatchSet& matches, const std::filesystem::path& path);
// Exact byte size of EncodeMatches(matches).
std::size_t EncodedMatchSize(const MatchSet& matches);

// Grayscale Portable Float Map, written little-endian, bottom row first.
DepthMap DecodePfm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodePfm(const DepthMap& depth);
DepthMap LoadPfm(const std::filesystem::path& path);
void SavePfm(const DepthMap& depth, const std::filesystem::path& path);

// `<dir>/<frame id>.pfm` for every frame; absent files give nullopt.
std::vector<std::optional<DepthMap>> LoadDepthDirectory(
    const std::filesystem::path& dir, const CameraRig& rig);
std::filesystem::path DepthPath(const std::filesystem::path& dir,
                                const Frame& frame);

// Vertex positions (and colors when present) from ascii or binary PLY;
// written as binary little-endian with float x, y, z and uchar colors.
ScenePointCloud DecodePly(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodePly(const ScenePointCloud& cloud);
ScenePointCloud LoadPly(const std::filesystem::path& path);
void SavePly(const ScenePointCloud& cloud, const std::filesystem::path& path);

// cameras.txt (PINHOLE), images.txt and points3D.txt in COLMAP text format.
void ExportColmapText(const CameraRig& rig, const ScenePointCloud& cloud,
                      const std::filesystem::path& dir);
// (w, x, y, z) with w >= 0.
Eigen::Vector4d RotationToQuaternion(const Eigen::Matrix3d& R);

// Weight table as CSV rows (pair, correspondence, frames, residual, density,
// weight); `residuals` may be empty.
void SaveWeightsCsv(const MatchSet& matches, std::span<const double> residuals,
                    const ResidualHistogram* histogram,
                    const WeightTable& weights, const std::filesystem::path& path);
// Rows missing from the file give weight 0.
WeightTable LoadWeightsCsv(const std::filesystem::path& path,
                           const MatchSet& matches);
void SaveHistogramCsv(const ResidualHistogram& histogram,
                      const std::filesystem::path& path);

SynthConfig ParseSynthConfig(const std::string& text);
SynthConfig LoadSynthConfig(const std::filesystem::path& path);

}  // namespace epialign::io

#endif  // EPIALIGN_IO_HPP_
