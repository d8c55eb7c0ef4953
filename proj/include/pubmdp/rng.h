// Copyright 2026 The pubmdp Authors.
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

#ifndef PUBMDP_RNG_H_
#define PUBMDP_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pubmdp {

// Seeded random stream with draw helpers that do not depend on
// implementation-defined standard-library distributions. All randomness in
// the project flows through named child streams of one root seed, so a run
// is reproducible from its seed alone and adding draws to one consumer never
// perturbs another.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : seed_(seed), engine_(seed) {}

  // Child stream keyed by (this stream's seed, label). Children created with
  // the same label are identical; drawing from the parent does not affect
  // previously created children.
  RandomStream Child(std::string_view label) const;

  uint64_t Bits() { return engine_(); }

  // Uniform integer in [0, n). Requires n > 0.
  int UniformInt(int n);

  // Uniform double in [0, 1).
  double UniformDouble();

  // Standard normal via Box-Muller.
  double Gaussian();

  // Index sampled from an unnormalized nonnegative weight vector.
  int SampleIndex(const std::vector<double>& weights);

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  bool have_spare_gaussian_ = false;
  double spare_gaussian_ = 0.0;
};

}  // namespace pubmdp

#endif  // PUBMDP_RNG_H_
