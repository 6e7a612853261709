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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

#include "byteio.hpp"
#include "error.hpp"
#include "io.hpp"

namespace epialign::io {

namespace {

enum class PlyFormat { kAscii, kBinaryLittle, kBinaryBig };

struct PlyType {
  std::size_t size = 0;
  bool is_float = false;
  bool is_signed = false;
};

PlyType ParsePlyType(const std::string& name) {
  static const std::map<std::string, PlyType> kTypes = {
      {"char", {1, false, true}},    {"int8", {1, false, true}},
      {"uchar", {1, false, false}},  {"uint8", {1, false, false}},
      {"short", {2, false, true}},   {"int16", {2, false, true}},
      {"ushort", {2, false, false}}, {"uint16", {2, false, false}},
      {"int", {4, false, true}},     {"int32", {4, false, true}},
      {"uint", {4, false, false}},   {"uint32", {4, false, false}},
      {"float", {4, true, true}},    {"float32", {4, true, true}},
      {"double", {8, true, true}},   {"float64", {8, true, true}},
  };
  auto it = kTypes.find(name);
  if (it == kTypes.end()) {
    throw Error(ErrorCode::kParseError, "PLY: unknown property type '" + name + "'");
  }
  return it->second;
}

struct PlyProperty {
  std::string name;
  PlyType type;
  bool is_list = false;
  PlyType count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

class PlyBody {
 public:
  PlyBody(std::span<const std::uint8_t> bytes, std::size_t pos, PlyFormat format)
      : bytes_(bytes), pos_(pos), format_(format) {
    if (format_ == PlyFormat::kAscii) {
      text_.str(std::string(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end()));
    }
  }

  double Read(const PlyType& type) {
    if (format_ == PlyFormat::kAscii) {
      std::string token;
      if (!(text_ >> token)) {
        throw Error(ErrorCode::kParseError, "PLY: ascii body ends early");
      }
      char* end = nullptr;
      const double value = std::strtod(token.c_str(), &end);
      if (*end != '\0') {
        throw Error(ErrorCode::kParseError, "PLY: bad ascii value '" + token + "'");
      }
      return value;
    }
    if (bytes_.size() - pos_ < type.size) {
      throw Error(ErrorCode::kParseError,
                  "PLY: binary body truncated at byte " + std::to_string(pos_));
    }
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += type.size;
    const bool big = format_ == PlyFormat::kBinaryBig;
    auto fix = [big](auto v) { return big ? detail::FromBig(v) : detail::FromLittle(v); };
    if (type.is_float) {
      return type.size == 4 ? double(fix(detail::LoadRaw<float>(p)))
                            : fix(detail::LoadRaw<double>(p));
    }
    switch (type.size) {
      case 1:
        return type.is_signed ? double(detail::LoadRaw<std::int8_t>(p))
                              : double(detail::LoadRaw<std::uint8_t>(p));
      case 2:
        return type.is_signed ? double(fix(detail::LoadRaw<std::int16_t>(p)))
                              : double(fix(detail::LoadRaw<std::uint16_t>(p)));
      default:
        return type.is_signed ? double(fix(detail::LoadRaw<std::int32_t>(p)))
                              : double(fix(detail::LoadRaw<std::uint32_t>(p)));
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  PlyFormat format_;
  std::istringstream text_;
};

}  // namespace

ScenePointCloud DecodePly(std::span<const std::uint8_t> bytes) {
  const std::string head(bytes.begin(),
                         bytes.begin() + static_cast<std::ptrdiff_t>(
                                             std::min<std::size_t>(bytes.size(), 1 << 16)));
  const std::size_t marker = head.find("end_header");
  if (head.rfind("ply", 0) != 0 || marker == std::string::npos) {
    throw Error(ErrorCode::kParseError, "PLY: missing 'ply' magic or end_header");
  }
  std::size_t body = head.find('\n', marker);
  if (body == std::string::npos) {
    throw Error(ErrorCode::kParseError, "PLY: header is not newline-terminated");
  }
  ++body;

  std::istringstream header(head.substr(0, marker));
  std::string line;
  std::getline(header, line);
  std::optional<PlyFormat> format;
  std::vector<PlyElement> elements;
  while (std::getline(header, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::string keyword;
    words >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string name, version;
      words >> name >> version;
      if (name == "ascii") format = PlyFormat::kAscii;
      else if (name == "binary_little_endian") format = PlyFormat::kBinaryLittle;
      else if (name == "binary_big_endian") format = PlyFormat::kBinaryBig;
      else throw Error(ErrorCode::kParseError, "PLY: unknown format '" + name + "'");
    } else if (keyword == "element") {
      PlyElement element;
      long long count = -1;
      words >> element.name >> count;
      if (element.name.empty() || count < 0) {
        throw Error(ErrorCode::kParseError, "PLY: malformed element line '" + line + "'");
      }
      element.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(element));
    } else if (keyword == "property") {
      if (elements.empty()) {
        throw Error(ErrorCode::kParseError, "PLY: property before any element");
      }
      PlyProperty property;
      std::string type;
      words >> type;
      if (type == "list") {
        std::string count_type, item_type;
        words >> count_type >> item_type;
        property.is_list = true;
        property.count_type = ParsePlyType(count_type);
        property.type = ParsePlyType(item_type);
      } else {
        property.type = ParsePlyType(type);
      }
      words >> property.name;
      if (property.name.empty()) {
        throw Error(ErrorCode::kParseError, "PLY: malformed property line '" + line + "'");
      }
      elements.back().properties.push_back(property);
    } else {
      throw Error(ErrorCode::kParseError, "PLY: unknown header keyword '" + keyword + "'");
    }
  }
  if (!format) throw Error(ErrorCode::kParseError, "PLY: missing format line");

  ScenePointCloud cloud;
  PlyBody reader(bytes, body, *format);
  bool seen_vertex = false;
  for (const PlyElement& element : elements) {
    if (element.name != "vertex") {
      for (std::size_t n = 0; n < element.count; ++n) {
        for (const PlyProperty& property : element.properties) {
          const std::size_t items =
              property.is_list ? static_cast<std::size_t>(reader.Read(property.count_type)) : 1;
          for (std::size_t k = 0; k < items; ++k) reader.Read(property.type);
        }
      }
      continue;
    }
    seen_vertex = true;
    int xyz[3] = {-1, -1, -1};
    int rgb[3] = {-1, -1, -1};
    for (std::size_t k = 0; k < element.properties.size(); ++k) {
      const std::string& name = element.properties[k].name;
      const int index = static_cast<int>(k);
      if (name == "x") xyz[0] = index;
      if (name == "y") xyz[1] = index;
      if (name == "z") xyz[2] = index;
      if (name == "red" || name == "r") rgb[0] = index;
      if (name == "green" || name == "g") rgb[1] = index;
      if (name == "blue" || name == "b") rgb[2] = index;
    }
    if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0) {
      throw Error(ErrorCode::kParseError, "PLY: vertex element lacks x, y, z");
    }
    const bool colored = rgb[0] >= 0 && rgb[1] >= 0 && rgb[2] >= 0;
    std::vector<double> values(element.properties.size());
    for (std::size_t n = 0; n < element.count; ++n) {
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const PlyProperty& property = element.properties[k];
        if (property.is_list) {
          const auto items = static_cast<std::size_t>(reader.Read(property.count_type));
          for (std::size_t m = 0; m < items; ++m) reader.Read(property.type);
          values[k] = 0.0;
        } else {
          values[k] = reader.Read(property.type);
        }
      }
      const Eigen::Vector3d point(values[xyz[0]], values[xyz[1]], values[xyz[2]]);
      if (!point.allFinite()) {
        throw Error(ErrorCode::kParseError,
                    "PLY: vertex " + std::to_string(n) + " is not finite");
      }
      cloud.points.push_back(point);
      if (colored) {
        std::array<std::uint8_t, 3> color;
        for (int c = 0; c < 3; ++c) {
          color[c] = static_cast<std::uint8_t>(std::clamp(values[rgb[c]], 0.0, 255.0));
        }
        cloud.colors.push_back(color);
      }
    }
  }
  if (!seen_vertex) throw Error(ErrorCode::kParseError, "PLY: no vertex element");
  cloud.source = CloudSource::kExternal;
  return cloud;
}

std::vector<std::uint8_t> EncodePly(const ScenePointCloud& cloud) {
  const bool colored = cloud.has_colors() && cloud.colors.size() == cloud.points.size();
  std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                       std::to_string(cloud.points.size()) +
                       "\nproperty float x\nproperty float y\nproperty float z\n";
  if (colored) {
    header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  header += "end_header\n";
  std::vector<std::uint8_t> out;
  detail::AppendString(&out, header);
  for (std::size_t n = 0; n < cloud.points.size(); ++n) {
    for (int c = 0; c < 3; ++c) {
      detail::AppendLittle(&out, static_cast<float>(cloud.points[n][c]));
    }
    if (colored) out.insert(out.end(), cloud.colors[n].begin(), cloud.colors[n].end());
  }
  return out;
}

ScenePointCloud LoadPly(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodePly(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void SavePly(const ScenePointCloud& cloud, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodePly(cloud));
}

}  // namespace epialign::io
