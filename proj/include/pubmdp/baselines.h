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

#ifndef PUBMDP_BASELINES_H_
#define PUBMDP_BASELINES_H_

#include <cstdint>
#include <vector>

#include "pubmdp/exact.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/rng.h"

namespace pubmdp {

// Tabular independent learners on the underlying game (not the belief MDP).
// Every agent keeps its own Q table over its own information states and
// updates at every step, no-op rows included, so values bootstrap through
// steps where the agent only waits.
//
//   kIql  independent Q-learning with learning rate alpha.
//   kHql  hysteretic: alpha on nonnegative temporal-difference errors,
//         beta (<= alpha) on negative ones.
//   kVdn  one joint temporal-difference error on the sum of the agents'
//         chosen-action values, applied with alpha to every summand.
//   kSad  IQL whose training keys append, step by step, the greedy actions
//         every teammate computed at its own decision point, while the
//         executed action may still be exploratory. Evaluation replays the
//         same keys with greedy actions throughout.
enum class BaselineAlgorithm { kIql, kHql, kVdn, kSad };

struct BaselineConfig {
  BaselineAlgorithm algorithm = BaselineAlgorithm::kIql;
  int64_t episodes = 100'000;
  double initial_epsilon = 1.0;
  double initial_alpha = 0.1;
  // HQL only. Must lie in [0, initial_alpha]; decays on alpha's schedule.
  double hysteretic_beta = 0.0;
  // Episode counts at which the linear schedules hit exactly 0; defaults to
  // the episode budget when nonpositive.
  int64_t epsilon_decay_episodes = 0;
  int64_t alpha_decay_episodes = 0;
  // Exact greedy evaluation cadence for the learning curve.
  int64_t eval_every = 100;
};

struct BaselineResult {
  std::vector<CurvePoint> curve;
  double final_greedy_value = 0.0;
  double best_greedy_value = 0.0;
  JointPolicy final_greedy_policy;
};

BaselineResult TrainBaseline(const GameTree& tree,
                             const BaselineConfig& config, RandomStream* rng);

}  // namespace pubmdp

#endif  // PUBMDP_BASELINES_H_
