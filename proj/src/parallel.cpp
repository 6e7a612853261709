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

#include "parallel.hpp"

#include <cstdlib>
#include <string>

namespace epialign {

std::size_t WorkerCount() {
  std::size_t requested = 0;
  if (const char* env = std::getenv("EPIALIGN_THREADS")) {
    try {
      requested = static_cast<std::size_t>(std::stoul(env));
    } catch (...) {
      requested = 0;
    }
  }
  if (requested == 0) {
    requested = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  return requested;
}

}  // namespace epialign
