// Copyright 2026 The emoint Authors
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

#ifndef EMOINT_COMMON_RNG_H_
#define EMOINT_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace emoint {

// Seeded generator with platform-independent derived distributions. The
// standard library's distributions are implementation-defined, so uniform,
// index and normal draws are built directly on the mt19937_64 bit stream,
// which the standard does pin down.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextBits() { return engine_(); }

  // Uniform in the open interval (0, 1).
  double Uniform();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Index(std::uint64_t n);

  double Normal(double mean, double sd);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with a stream discriminator so that sub-steps of one
// stage draw from independent streams.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace emoint

#endif  // EMOINT_COMMON_RNG_H_
