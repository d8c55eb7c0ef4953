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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pubmdp/rng.h"

namespace pubmdp {
namespace {

TEST_CASE("same seed reproduces the same sequence") {
  RandomStream a(17);
  RandomStream b(17);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.Bits() == b.Bits());
  }
}

TEST_CASE("different seeds diverge") {
  RandomStream a(1);
  RandomStream b(2);
  int differing = 0;
  for (int i = 0; i < 16; ++i) {
    if (a.Bits() != b.Bits()) ++differing;
  }
  CHECK(differing > 0);
}

TEST_CASE("copies replay the original stream") {
  RandomStream a(5);
  a.Bits();
  RandomStream b = a;
  for (int i = 0; i < 50; ++i) {
    CHECK(a.Bits() == b.Bits());
  }
}

TEST_CASE("child streams are stable and independent of parent position") {
  RandomStream parent(99);
  RandomStream before = parent.Child("worker");
  parent.Bits();
  parent.Bits();
  RandomStream after = parent.Child("worker");
  for (int i = 0; i < 20; ++i) {
    CHECK(before.Bits() == after.Bits());
  }
}

TEST_CASE("child streams with different labels differ") {
  RandomStream parent(99);
  RandomStream a = parent.Child("alpha");
  RandomStream b = parent.Child("beta");
  int differing = 0;
  for (int i = 0; i < 16; ++i) {
    if (a.Bits() != b.Bits()) ++differing;
  }
  CHECK(differing > 0);
}

TEST_CASE("uniform int stays in bounds and covers the range") {
  RandomStream rng(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    int draw = rng.UniformInt(5);
    REQUIRE(draw >= 0);
    REQUIRE(draw < 5);
    ++counts[draw];
  }
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("uniform double lies in the half-open unit interval") {
  RandomStream rng(7);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double draw = rng.UniformDouble();
    REQUIRE(draw >= 0.0);
    REQUIRE(draw < 1.0);
    sum += draw;
  }
  CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("gaussian has roughly standard moments") {
  RandomStream rng(11);
  double sum = 0.0;
  double sum_sq = 0.0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    double draw = rng.Gaussian();
    sum += draw;
    sum_sq += draw * draw;
  }
  double mean = sum / kDraws;
  double variance = sum_sq / kDraws - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(variance == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sample index respects weights and skips zeros") {
  RandomStream rng(13);
  std::vector<double> weights = {0.0, 1.0, 3.0};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 8000; ++i) {
    ++counts[rng.SampleIndex(weights)];
  }
  CHECK(counts[0] == 0);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > counts[1]);
  double ratio = static_cast<double>(counts[2]) / counts[1];
  CHECK(ratio == doctest::Approx(3.0).epsilon(0.15));
}

}  // namespace
}  // namespace pubmdp
