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

#ifndef EPIALIGN_BYTEIO_HPP_
#define EPIALIGN_BYTEIO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace epialign::io::detail {

template <typename T>
T ByteSwap(T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  for (std::size_t k = 0; k < sizeof(T) / 2; ++k) {
    std::swap(raw[k], raw[sizeof(T) - 1 - k]);
  }
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

template <typename T>
T FromLittle(T value) {
  if constexpr (std::endian::native == std::endian::big) return ByteSwap(value);
  return value;
}

template <typename T>
T FromBig(T value) {
  if constexpr (std::endian::native == std::endian::little) return ByteSwap(value);
  return value;
}

template <typename T>
void AppendLittle(std::vector<std::uint8_t>* out, T value) {
  value = FromLittle(value);
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out->insert(out->end(), p, p + sizeof(T));
}

template <typename T>
T LoadRaw(const std::uint8_t* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

inline void AppendString(std::vector<std::uint8_t>* out, const std::string& s) {
  out->insert(out->end(), s.begin(), s.end());
}

}  // namespace epialign::io::detail

#endif  // EPIALIGN_BYTEIO_HPP_
