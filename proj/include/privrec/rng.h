// Copyright 2026 The PrivRec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random streams. Every (seed, stream) pair names an
// independent SplitMix64 sequence, so the draw for one round never depends on
// how many draws another round consumed.

#ifndef PRIVREC_RNG_H_
#define PRIVREC_RNG_H_

#include <cstdint>

namespace privrec {

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t StreamKey(uint64_t seed, uint64_t stream) {
  return Mix64(Mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

// 53-bit uniform in [0, 1).
constexpr double ToUnit(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential generator over one stream; satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = uint64_t;

  constexpr StreamRng(uint64_t seed, uint64_t stream)
      : state_(StreamKey(seed, stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr double Uniform() { return ToUnit((*this)()); }

 private:
  uint64_t state_;
};

// The single uniform used to sample round `t` of an episode seeded `seed`.
constexpr double RoundUniform(uint64_t seed, int t) {
  return StreamRng(seed, static_cast<uint64_t>(t)).Uniform();
}

}  // namespace privrec

#endif  // PRIVREC_RNG_H_
