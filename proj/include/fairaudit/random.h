// Copyright 2026 The Fairaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRAUDIT_RANDOM_H_
#define FAIRAUDIT_RANDOM_H_

#include <cstdint>
#include <random>

namespace fairaudit {

// Mixes a master seed and a stream index into an independent 64-bit seed
// (splitmix64 finalizer applied twice). Every parallel or per-trial random
// stream in the library is derived this way so results do not depend on
// scheduling.
inline uint64_t DeriveSeed(uint64_t master, uint64_t stream) {
  auto mix = [](uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

using Engine = std::mt19937_64;

inline Engine MakeEngine(uint64_t master, uint64_t stream) {
  return Engine(DeriveSeed(master, stream));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double UniformUnit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace fairaudit

#endif  // FAIRAUDIT_RANDOM_H_
