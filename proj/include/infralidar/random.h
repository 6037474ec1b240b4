// Copyright 2026 The Infralidar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INFRALIDAR_RANDOM_H_
#define INFRALIDAR_RANDOM_H_

#include <cstdint>
#include <utility>

namespace infralidar {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, stream, index), so results do not depend on evaluation order.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) : seed_(seed) {}

  /// 64 random bits for the given key.
  std::uint64_t Bits(std::uint64_t stream, std::uint64_t index) const;
  /// Uniform in [0, 1) with 53 random bits.
  double Uniform(std::uint64_t stream, std::uint64_t index) const;
  /// Two independent standard normals (Box-Muller) for one key.
  std::pair<double, double> NormalPair(std::uint64_t stream,
                                       std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// splitmix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

/// Builds a stream id from a purpose tag and up to two integers.
std::uint64_t StreamKey(std::uint64_t tag, std::uint64_t a,
                        std::uint64_t b = 0);

/// Stream tags; values are part of the on-disk determinism contract.
enum StreamTag : std::uint64_t {
  kPointNoiseStream = 0x504f494e54ULL,
  kPoseNoiseStream = 0x504f5345ULL,
  kGroundSampleStream = 0x47524e44ULL,
  kTrafficStream = 0x54524146ULL,
};

}  // namespace infralidar

#endif  // INFRALIDAR_RANDOM_H_
