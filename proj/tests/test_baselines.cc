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
#include "doctest.h"

#include <memory>
#include <vector>

#include "pubmdp/baselines.h"
#include "pubmdp/exact.h"
#include "pubmdp/fosg.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/games.h"
#include "pubmdp/rng.h"

namespace pubmdp {
namespace {

// One player, one hidden coin, one guess.
std::shared_ptr<const FiniteGame> BuildGuessGame() {
  ExplicitGameBuilder builder("guess", 1, 1);
  ObsId start = builder.AddPublicObs("(start)");
  ObsId done = builder.AddPublicObs("(done)");
  ObsId heads = builder.AddPrivateObs(0, "heads");
  ObsId tails = builder.AddPrivateObs(0, "tails");
  ActionId say_heads = builder.AddAction(0, "say-heads");
  ActionId say_tails = builder.AddAction(0, "say-tails");
  WorldId world_heads = builder.AddWorld("heads", false);
  WorldId world_tails = builder.AddWorld("tails", false);
  WorldId over = builder.AddWorld("over", true);
  builder.AddInitialOutcome(world_heads, 0.5, start, {heads});
  builder.AddInitialOutcome(world_tails, 0.5, start, {tails});
  builder.SetLegalActions(world_heads, 0, {say_heads, say_tails});
  builder.SetLegalActions(world_tails, 0, {say_heads, say_tails});
  for (WorldId world : {world_heads, world_tails}) {
    for (ActionId action : {say_heads, say_tails}) {
      double reward = (world == world_heads) == (action == say_heads) ? 1 : 0;
      builder.AddTransition(world, {action},
                            {{over, 1.0, reward, done, {heads}}});
    }
  }
  return builder.Build();
}

BaselineResult Train(const GameTree& tree, BaselineAlgorithm algorithm,
                     uint64_t seed, int64_t episodes,
                     double hysteretic_beta = 0.0) {
  BaselineConfig config;
  config.algorithm = algorithm;
  config.episodes = episodes;
  config.eval_every = 50;
  config.initial_alpha = 0.2;
  config.hysteretic_beta = hysteretic_beta;
  RandomStream rng(seed);
  return TrainBaseline(tree, config, &rng);
}

TEST_CASE("training is bit deterministic for a fixed seed") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:A"));
  for (BaselineAlgorithm algorithm :
       {BaselineAlgorithm::kIql, BaselineAlgorithm::kHql,
        BaselineAlgorithm::kVdn, BaselineAlgorithm::kSad}) {
    BaselineResult first = Train(tree, algorithm, 5, 2000, 0.05);
    BaselineResult second = Train(tree, algorithm, 5, 2000, 0.05);
    REQUIRE(first.curve.size() == second.curve.size());
    for (size_t i = 0; i < first.curve.size(); ++i) {
      CHECK(first.curve[i].greedy_value == second.curve[i].greedy_value);
    }
    CHECK(first.final_greedy_value == second.final_greedy_value);
  }
}

TEST_CASE("hysteresis with beta equal to alpha is exactly independent learning") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:C"));
  BaselineResult iql = Train(tree, BaselineAlgorithm::kIql, 11, 3000);
  BaselineResult hql = Train(tree, BaselineAlgorithm::kHql, 11, 3000,
                             /*hysteretic_beta=*/0.2);
  REQUIRE(iql.curve.size() == hql.curve.size());
  for (size_t i = 0; i < iql.curve.size(); ++i) {
    CHECK(iql.curve[i].greedy_value == hql.curve[i].greedy_value);
    CHECK(iql.curve[i].best_value == hql.curve[i].best_value);
  }
  CHECK(iql.final_greedy_value == hql.final_greedy_value);
}

TEST_CASE("a joint error over one agent reduces to independent learning") {
  GameTree tree = GameTree::Build(BuildGuessGame());
  BaselineResult iql = Train(tree, BaselineAlgorithm::kIql, 17, 2000);
  BaselineResult vdn = Train(tree, BaselineAlgorithm::kVdn, 17, 2000);
  REQUIRE(iql.curve.size() == vdn.curve.size());
  for (size_t i = 0; i < iql.curve.size(); ++i) {
    CHECK(iql.curve[i].greedy_value == vdn.curve[i].greedy_value);
  }
  CHECK(iql.final_greedy_value == 1.0);
  CHECK(vdn.final_greedy_value == 1.0);
}

TEST_CASE("greedy values never beat the optimum") {
  for (const char* name : {"tiny_hanabi:A", "tiny_hanabi:C", "trade_comm:2x2"}) {
    CAPTURE(name);
    GameTree tree = GameTree::Build(MakeGame(name));
    double optimum = BackwardInduction(tree).root_value;
    for (BaselineAlgorithm algorithm :
         {BaselineAlgorithm::kIql, BaselineAlgorithm::kHql,
          BaselineAlgorithm::kVdn, BaselineAlgorithm::kSad}) {
      BaselineResult result = Train(tree, algorithm, 23, 1500, 0.02);
      CHECK(result.best_greedy_value <= optimum + 1e-9);
      for (const CurvePoint& point : result.curve) {
        CHECK(point.greedy_value <= optimum + 1e-9);
      }
      CHECK(EvaluateJointPolicy(tree, result.final_greedy_policy) ==
            doctest::Approx(result.final_greedy_value).epsilon(1e-12));
    }
  }
}

TEST_CASE("independent learners find the no-signalling ceiling somewhere") {
  // The variant where acting on your own card alone caps the payoff strictly
  // below the optimum: independent learning reliably sticks to that ceiling.
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:C"));
  double optimum = BackwardInduction(tree).root_value;
  int failures = 0;
  for (uint64_t seed = 0; seed < 4; ++seed) {
    BaselineResult result = Train(tree, BaselineAlgorithm::kIql, seed, 20000);
    if (result.best_greedy_value < optimum - 1e-9) ++failures;
  }
  CHECK(failures >= 1);
}

TEST_CASE("augmented training keys still learn coordinated play") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:A"));
  BaselineResult result = Train(tree, BaselineAlgorithm::kSad, 3, 20000);
  CHECK(result.best_greedy_value >= 1.75);
  CHECK(result.best_greedy_value <= 2.25 + 1e-9);
}

TEST_CASE("a zero budget reports the untrained greedy policy") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:A"));
  BaselineResult result = Train(tree, BaselineAlgorithm::kIql, 7, 0);
  REQUIRE(result.curve.size() == 1);
  CHECK(result.curve[0].episode == 0);
  CHECK(result.final_greedy_value == result.curve[0].greedy_value);
  CHECK(result.best_greedy_value == result.final_greedy_value);
  CHECK(EvaluateJointPolicy(tree, result.final_greedy_policy) ==
        doctest::Approx(result.final_greedy_value).epsilon(1e-12));
}

}  // namespace
}  // namespace pubmdp
