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

#include <cmath>
#include <sstream>

#include "byteio.hpp"
#include "error.hpp"
#include "io.hpp"

namespace epialign::io {

using detail::AppendLittle;
using detail::FromLittle;
using detail::LoadRaw;

namespace {

constexpr std::size_t kFileHeaderBytes = 12;
constexpr std::size_t kPairHeaderBytes = 13;

[[noreturn]] void Truncated(std::size_t expected, std::size_t actual,
                            const std::string& what) {
  std::ostringstream msg;
  msg << "match file truncated in " << what << ": expected at least "
      << expected << " bytes, file has " << actual;
  throw Error(ErrorCode::kParseError, msg.str());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void Need(std::size_t n, const std::string& what) const {
    if (bytes_.size() - pos_ < n) Truncated(pos_ + n, bytes_.size(), what);
  }
  template <typename T>
  T Read() {
    T value = FromLittle(LoadRaw<T>(bytes_.data() + pos_));
    pos_ += sizeof(T);
    return value;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t EncodedMatchSize(const MatchSet& matches) {
  std::size_t size = kFileHeaderBytes;
  for (const PairMatches& pair : matches.pairs) {
    size += kPairHeaderBytes +
            pair.correspondences.size() * (pair.has_confidence ? 5 : 4) * 4;
  }
  return size;
}

std::vector<std::uint8_t> EncodeMatches(const MatchSet& matches) {
  std::vector<std::uint8_t> out;
  out.reserve(EncodedMatchSize(matches));
  out.insert(out.end(), kMatchMagic, kMatchMagic + 4);
  AppendLittle<std::uint32_t>(&out, kMatchFormatVersion);
  AppendLittle<std::uint32_t>(&out, static_cast<std::uint32_t>(matches.pairs.size()));
  for (const PairMatches& pair : matches.pairs) {
    AppendLittle<std::uint32_t>(&out, static_cast<std::uint32_t>(pair.frame_i));
    AppendLittle<std::uint32_t>(&out, static_cast<std::uint32_t>(pair.frame_j));
    AppendLittle<std::uint32_t>(
        &out, static_cast<std::uint32_t>(pair.correspondences.size()));
    out.push_back(pair.has_confidence ? 1 : 0);
    for (const Correspondence& c : pair.correspondences) {
      AppendLittle<float>(&out, static_cast<float>(c.x.x()));
      AppendLittle<float>(&out, static_cast<float>(c.x.y()));
      AppendLittle<float>(&out, static_cast<float>(c.x_prime.x()));
      AppendLittle<float>(&out, static_cast<float>(c.x_prime.y()));
      if (pair.has_confidence) {
        AppendLittle<float>(&out, static_cast<float>(c.confidence));
      }
    }
  }
  return out;
}

MatchSet DecodeMatches(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.Need(kFileHeaderBytes, "the file header");
  if (std::memcmp(bytes.data(), kMatchMagic, 4) != 0) {
    throw Error(ErrorCode::kParseError, "match file: bad magic, expected 'EPMT'");
  }
  in.Read<std::uint32_t>();
  const auto version = in.Read<std::uint32_t>();
  if (version != kMatchFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "match file version " + std::to_string(version) +
                    " (supported: " + std::to_string(kMatchFormatVersion) + ")");
  }
  const auto pair_count = in.Read<std::uint32_t>();

  MatchSet matches;
  for (std::uint32_t p = 0; p < pair_count; ++p) {
    const std::string where = "pair " + std::to_string(p);
    in.Need(kPairHeaderBytes, where + " header");
    PairMatches pair;
    pair.frame_i = in.Read<std::uint32_t>();
    pair.frame_j = in.Read<std::uint32_t>();
    const auto count = in.Read<std::uint32_t>();
    const auto flag = in.Read<std::uint8_t>();
    if (flag > 1) {
      throw Error(ErrorCode::kParseError,
                  "match file " + where + ": has_confidence byte must be 0 or 1");
    }
    pair.has_confidence = flag == 1;
    const std::size_t floats = pair.has_confidence ? 5 : 4;
    const std::size_t body = std::size_t(count) * floats * 4;
    if (in.remaining() < body) Truncated(in.pos() + body, bytes.size(), where + " records");
    pair.correspondences.resize(count);
    for (Correspondence& c : pair.correspondences) {
      float v[5] = {0, 0, 0, 0, 1};
      for (std::size_t k = 0; k < floats; ++k) {
        v[k] = in.Read<float>();
        if (!std::isfinite(v[k])) {
          throw Error(ErrorCode::kParseError,
                      "match file " + where + ": non-finite value at byte " +
                          std::to_string(in.pos() - 4));
        }
      }
      c.x = {v[0], v[1]};
      c.x_prime = {v[2], v[3]};
      c.confidence = v[4];
    }
    matches.pairs.push_back(std::move(pair));
  }
  if (in.remaining() != 0) {
    std::ostringstream msg;
    msg << "match file length mismatch: expected " << in.pos()
        << " bytes, file has " << bytes.size();
    throw Error(ErrorCode::kParseError, msg.str());
  }
  return matches;
}

MatchSet LoadMatches(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return DecodeMatches(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void SaveMatches(const MatchSet& matches, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeMatches(matches));
}

}  // namespace epialign::io
