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

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "byteio.hpp"
#include "error.hpp"
#include "io.hpp"

namespace epialign::io {

namespace {

// Reads one whitespace-delimited header token and consumes the single
// whitespace byte that terminates it.
std::string HeaderToken(std::span<const std::uint8_t> bytes, std::size_t* pos) {
  while (*pos < bytes.size() && std::isspace(bytes[*pos])) ++*pos;
  std::string token;
  while (*pos < bytes.size() && !std::isspace(bytes[*pos])) {
    token.push_back(static_cast<char>(bytes[*pos]));
    ++*pos;
  }
  if (token.empty() || *pos >= bytes.size()) {
    throw Error(ErrorCode::kParseError, "PFM header is truncated");
  }
  ++*pos;
  return token;
}

int ParseDimension(const std::string& token, const char* name) {
  char* end = nullptr;
  const long value = std::strtol(token.c_str(), &end, 10);
  if (*end != '\0' || value <= 0 || value > (1L << 20)) {
    throw Error(ErrorCode::kParseError,
                std::string("PFM ") + name + " '" + token + "' is not a positive integer");
  }
  return static_cast<int>(value);
}

}  // namespace

DepthMap DecodePfm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string magic = HeaderToken(bytes, &pos);
  if (magic == "PF") {
    throw Error(ErrorCode::kParseError,
                "PFM: color maps ('PF') are not supported, expected 'Pf'");
  }
  if (magic != "Pf") {
    throw Error(ErrorCode::kParseError, "PFM: bad magic '" + magic + "'");
  }
  const int width = ParseDimension(HeaderToken(bytes, &pos), "width");
  const int height = ParseDimension(HeaderToken(bytes, &pos), "height");
  const std::string scale_token = HeaderToken(bytes, &pos);
  char* end = nullptr;
  const double scale = std::strtod(scale_token.c_str(), &end);
  if (*end != '\0' || !std::isfinite(scale) || scale == 0.0) {
    throw Error(ErrorCode::kParseError, "PFM: bad scale '" + scale_token + "'");
  }
  const bool little = scale < 0.0;
  const std::size_t expected = pos + std::size_t(width) * height * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kParseError,
                "PFM length mismatch: expected " + std::to_string(expected) +
                    " bytes, file has " + std::to_string(bytes.size()));
  }
  DepthMap depth(width, height);
  const std::uint8_t* data = bytes.data() + pos;
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      const float raw = detail::LoadRaw<float>(data + (std::size_t(row) * width + x) * 4);
      depth.at(x, y) = little ? detail::FromLittle(raw) : detail::FromBig(raw);
    }
  }
  return depth;
}

std::vector<std::uint8_t> EncodePfm(const DepthMap& depth) {
  std::vector<std::uint8_t> out;
  detail::AppendString(&out, "Pf\n" + std::to_string(depth.width) + " " +
                                 std::to_string(depth.height) + "\n-1.0\n");
  out.reserve(out.size() + depth.values.size() * 4);
  for (int y = depth.height - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width; ++x) detail::AppendLittle(&out, depth.at(x, y));
  }
  return out;
}

DepthMap LoadPfm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodePfm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void SavePfm(const DepthMap& depth, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodePfm(depth));
}

std::filesystem::path DepthPath(const std::filesystem::path& dir,
                                const Frame& frame) {
  return dir / (frame.id + ".pfm");
}

std::vector<std::optional<DepthMap>> LoadDepthDirectory(
    const std::filesystem::path& dir, const CameraRig& rig) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "'" + dir.string() + "' is not a directory");
  }
  std::vector<std::optional<DepthMap>> depths(rig.size());
  for (std::size_t f = 0; f < rig.size(); ++f) {
    const std::filesystem::path path = DepthPath(dir, rig.frames[f]);
    if (!std::filesystem::exists(path)) continue;
    DepthMap depth = LoadPfm(path);
    const CameraIntrinsics& k = rig.frames[f].intrinsics;
    if (depth.width != k.width || depth.height != k.height) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": depth map is " + std::to_string(depth.width) +
                      "x" + std::to_string(depth.height) + ", frame is " +
                      std::to_string(k.width) + "x" + std::to_string(k.height));
    }
    depths[f] = std::move(depth);
  }
  return depths;
}

}  // namespace epialign::io
