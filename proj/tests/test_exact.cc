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
#include <cstdio>
#include <map>
#include <string>

#include "doctest.h"
#include "pubmdp/exact.h"
#include "pubmdp/games.h"

#ifndef PUBMDP_TEST_DATA_DIR
#error "PUBMDP_TEST_DATA_DIR must point at the golden file directory"
#endif

namespace pubmdp {
namespace {

std::string GoldenPath(const std::string& file) {
  return std::string(PUBMDP_TEST_DATA_DIR) + "/" + file;
}

const std::map<std::string, double>& GoldenValues() {
  static const std::map<std::string, double> values =
      ReadOracleGolden(GoldenPath("oracle_values.txt"));
  return values;
}

TEST_CASE("hand-derived optima") {
  // Independently derivable closed forms: E pays 10 on perfect
  // coordination, F's optimum averages 7/3, the trading games pay 1 when
  // utterances can name every item and 1/2 when two items share one
  // utterance.
  const std::map<std::string, double>& golden = GoldenValues();
  CHECK(golden.at("tiny_hanabi:A") == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(golden.at("tiny_hanabi:B") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(golden.at("tiny_hanabi:C") == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(golden.at("tiny_hanabi:D") == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(golden.at("tiny_hanabi:E") == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(golden.at("tiny_hanabi:F") ==
        doctest::Approx(7.0 / 3.0).epsilon(1e-9));
  CHECK(golden.at("trade_comm:1x1") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(golden.at("trade_comm:2x1") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(golden.at("trade_comm:2x2") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("backward induction reproduces every golden value") {
  for (const auto& [name, value] : GoldenValues()) {
    CAPTURE(name);
    GameTree tree = GameTree::Build(MakeGame(name));
    BackwardInductionResult result = BackwardInduction(tree, {});
    CHECK(result.root_value == doctest::Approx(value).epsilon(1e-9));
    CHECK(result.greedy_policy_value ==
          doctest::Approx(result.root_value).epsilon(1e-12));
  }
}

TEST_CASE("brute force agrees with backward induction") {
  for (const char* name :
       {"tiny_hanabi:A", "tiny_hanabi:B", "tiny_hanabi:C", "tiny_hanabi:D",
        "tiny_hanabi:E", "tiny_hanabi:F", "trade_comm:1x1", "trade_comm:2x1",
        "trade_comm:2x2"}) {
    CAPTURE(name);
    GameTree tree = GameTree::Build(MakeGame(name));
    BruteForceResult brute = BruteForceOptimal(tree, {});
    BackwardInductionResult induced = BackwardInduction(tree, {});
    CHECK(std::abs(brute.value - induced.root_value) <= 1e-9);
    CHECK(EvaluateJointPolicy(tree, brute.policy) ==
          doctest::Approx(brute.value).epsilon(1e-12));
  }
}

TEST_CASE("one-shot closure changes nothing but the assignment count") {
  for (const char* name : {"tiny_hanabi:C", "tiny_hanabi:F", "trade_comm:2x1"}) {
    CAPTURE(name);
    GameTree tree = GameTree::Build(MakeGame(name));
    BruteForceOptions with;
    BruteForceOptions without;
    without.use_closure = false;
    BruteForceResult fast = BruteForceOptimal(tree, with);
    BruteForceResult slow = BruteForceOptimal(tree, without);
    CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-12));
    CHECK(fast.assignments_enumerated < slow.assignments_enumerated);
  }
}

TEST_CASE("pruned search keeps the exact optimum") {
  for (const char* name : {"tiny_hanabi:A", "tiny_hanabi:E", "trade_comm:2x2"}) {
    CAPTURE(name);
    GameTree tree = GameTree::Build(MakeGame(name));
    BruteForceOptions pruned;
    pruned.prune = true;
    BruteForceResult fast = BruteForceOptimal(tree, pruned);
    BruteForceResult full = BruteForceOptimal(tree, {});
    CHECK(fast.value == doctest::Approx(full.value).epsilon(1e-12));
    CHECK(fast.assignments_enumerated <= full.assignments_enumerated);
  }
}

TEST_CASE("belief graph structure on the smallest signalling game") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:A"));
  BeliefGraph graph = BuildBeliefGraph(tree);
  CHECK(graph.nodes.size() == 31);
  CHECK(graph.nodes[graph.root()].depth == 0);
  CHECK_FALSE(graph.nodes[graph.root()].terminal);
  // Root: player one picks one of 2 actions for each of 2 cards.
  CHECK(graph.nodes[graph.root()].edges.size() == 4);
  for (const BeliefGraph::Edge& edge : graph.nodes[graph.root()].edges) {
    double mass = 0.0;
    for (const auto& [child, probability] : edge.children) {
      CHECK(probability > 0.0);
      mass += probability;
      CHECK(graph.nodes[child].depth == 1);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("belief graph enforces its caps") {
  GameTree tree = GameTree::Build(MakeGame("trade_comm:3x3"));
  CHECK_THROWS(BuildBeliefGraph(tree, /*prescription_cap=*/1'000'000,
                                /*node_cap=*/1'000'000));
}

TEST_CASE("value iteration converges in decision-depth sweeps") {
  struct Case {
    const char* name;
    int depth;
  };
  for (const Case& test_case : {Case{"tiny_hanabi:B", 2},
                                Case{"trade_comm:2x2", 3}}) {
    CAPTURE(test_case.name);
    GameTree tree = GameTree::Build(MakeGame(test_case.name));
    BeliefGraph graph = BuildBeliefGraph(tree);
    ValueIterationResult result = ValueIteration(graph);
    CHECK(result.sweeps_to_converge == test_case.depth);
    BackwardInductionResult induced = BackwardInduction(tree, {});
    CHECK(result.root_value ==
          doctest::Approx(induced.root_value).epsilon(1e-12));
  }
}

TEST_CASE("graph q-learning approaches the optimum and never exceeds it") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:A"));
  BeliefGraph graph = BuildBeliefGraph(tree);
  QLearningConfig config;
  config.episodes = 20000;
  config.eval_every = 500;
  RandomStream rng(4);
  QLearningResult result = PubMdpQLearning(tree, graph, config, &rng);
  CHECK(result.best_greedy_value == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(result.final_greedy_value == doctest::Approx(2.25).epsilon(1e-9));
  for (const CurvePoint& point : result.curve) {
    CHECK(point.greedy_value <= 2.25 + 1e-9);
    CHECK(point.best_value <= 2.25 + 1e-9);
  }
  // Curve covers episode 0 and the final episode, and best is monotone.
  REQUIRE(!result.curve.empty());
  CHECK(result.curve.front().episode == 0);
  CHECK(result.curve.back().episode == 20000);
  for (size_t i = 1; i < result.curve.size(); ++i) {
    CHECK(result.curve[i].best_value >= result.curve[i - 1].best_value);
  }
  CHECK(EvaluateJointPolicy(tree, result.final_greedy_policy) ==
        doctest::Approx(result.final_greedy_value).epsilon(1e-12));
}

TEST_CASE("q-learning with a zero budget reports the untrained policy") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:B"));
  BeliefGraph graph = BuildBeliefGraph(tree);
  QLearningConfig config;
  config.episodes = 0;
  RandomStream rng(1);
  QLearningResult result = PubMdpQLearning(tree, graph, config, &rng);
  REQUIRE(result.curve.size() == 1);
  CHECK(result.curve[0].episode == 0);
  CHECK(result.best_greedy_value == result.curve[0].greedy_value);
}

TEST_CASE("oracle golden io round-trips") {
  std::map<std::string, double> values = {{"g:one", 1.25},
                                          {"g:two", -0.333333333}};
  std::string path = "oracle_roundtrip_tmp.txt";
  WriteOracleGolden(path, values);
  std::map<std::string, double> reread = ReadOracleGolden(path);
  std::remove(path.c_str());
  REQUIRE(reread.size() == 2);
  CHECK(reread.at("g:one") == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(reread.at("g:two") == doctest::Approx(-0.333333333).epsilon(1e-9));
}

}  // namespace
}  // namespace pubmdp
