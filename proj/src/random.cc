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

#include "infralidar/random.h"

#include <cmath>
#include <numbers>

namespace infralidar {

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t StreamKey(std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  return Mix64(Mix64(Mix64(tag) ^ a) ^ b);
}

std::uint64_t KeyedRng::Bits(std::uint64_t stream, std::uint64_t index) const {
  return Mix64(Mix64(seed_ ^ Mix64(stream)) + index);
}

double KeyedRng::Uniform(std::uint64_t stream, std::uint64_t index) const {
  return static_cast<double>(Bits(stream, index) >> 11) * 0x1.0p-53;
}

std::pair<double, double> KeyedRng::NormalPair(std::uint64_t stream,
                                               std::uint64_t index) const {
  const std::uint64_t bits = Bits(stream, index);
  const std::uint64_t bits2 = Mix64(bits ^ 0x6a09e667f3bcc909ULL);
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(bits2 >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace infralidar
