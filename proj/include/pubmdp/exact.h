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

#ifndef PUBMDP_EXACT_H_
#define PUBMDP_EXACT_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pubmdp/belief.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/rng.h"

namespace pubmdp {

// Exact solver for the one-shot team decision problem that remains at a
// public state all of whose continuations end the game: choose one action
// per (player, information state) to maximize the weighted expected final
// reward over that public state's histories. Solved by enumerating every
// assignment for all players but one and optimizing the remaining player row
// by row, which is exact because the histories partition by that player's
// information states. Solutions are memoized per (public state, exact weight
// vector), so repeated queries from policy enumeration and from backward
// induction are shared.
class LastLevelCloser {
 public:
  explicit LastLevelCloser(const GameTree& tree);

  // True when the public state is nonterminal and every joint action at every
  // one of its histories ends the game.
  bool Closable(int public_state) const {
    return closable_[public_state];
  }

  struct Solution {
    // Maximum of sum over histories of weight * expected final step reward.
    // Unnormalized: scales linearly with the weight vector.
    double value = 0.0;
    // Chosen legal index per (player, row in the public state's canonical
    // information-state order); -1 on rows that touch no positive-weight
    // history (any choice is payoff-equivalent there).
    std::vector<std::vector<int>> rows;
  };

  // `stub_weights` is aligned with the public state's stub list; entries are
  // nonnegative reach masses. Throws when the public state is not closable
  // or the enumeration exceeds `enumeration_cap`.
  const Solution& Solve(int public_state,
                        const std::vector<double>& stub_weights,
                        uint64_t enumeration_cap = 100'000'000);

  // Index of a node within its public state's stub list.
  int StubPosition(int node_id) const { return stub_position_[node_id]; }

 private:
  struct PublicCache {
    bool ready = false;
    std::vector<std::vector<int>> row_legal_counts;  // [player][row]
    std::vector<std::vector<int>> stub_rows;         // [stub][player] -> row
    std::vector<std::vector<double>> stub_rewards;   // [stub][joint index]
    std::vector<std::vector<uint64_t>> stub_strides;  // [stub][player]
  };

  const PublicCache& CacheFor(int public_state);

  const GameTree& tree_;
  std::vector<uint8_t> closable_;
  std::vector<int> stub_position_;
  std::vector<PublicCache> cache_;
  std::unordered_map<std::string, Solution> memo_;
};

struct BruteForceOptions {
  // Bound on the number of enumerated policy assignments: the product over
  // open decision slots, and separately each closure's internal enumeration.
  uint64_t policy_cap = 100'000'000;
  // Solve all-terminal public states with the closure instead of enumerating
  // their decision slots; required for games whose last level is too large
  // to enumerate.
  bool use_closure = true;
  // Sound branch-and-bound on the slot enumeration. Off by default; changes
  // which optimal policy is returned on ties, never the value.
  bool prune = false;
};

struct BruteForceResult {
  double value = 0.0;
  JointPolicy policy;
  uint64_t assignments_enumerated = 0;
};

// Exhaustive maximum of EvaluateJointPolicy over deterministic joint
// policies. Throws std::runtime_error when the enumeration exceeds the cap.
BruteForceResult BruteForceOptimal(const GameTree& tree,
                                   const BruteForceOptions& options = {});

struct BackwardInductionOptions {
  // Bound on support-restricted prescription vectors streamed per belief;
  // beliefs past the bound must be closable or the solve throws.
  uint64_t stream_cap = 1'000'000;
  uint64_t closure_cap = 100'000'000;
};

struct BackwardInductionResult {
  double root_value = 0.0;
  // Optimal value of every belief the recursion visited, keyed by
  // BeliefKeyBytes. Terminal beliefs are not stored; their value is 0.
  std::unordered_map<std::string, double> values;
  // Argmax prescription at each visited nonterminal belief (rows frozen by
  // the support restriction hold legal index 0).
  std::unordered_map<std::string, PrescriptionVector> greedy_prescriptions;
  JointPolicy greedy_policy;
  double greedy_policy_value = 0.0;
};

// Dynamic programming over the belief space reached from the initial belief:
// V(b) = max over prescriptions of expected reward plus the expectation of
// V at the next belief. Prescriptions are streamed with ruled-out rows
// frozen, which cannot change values or reachable next beliefs; public
// states whose continuations all end the game are solved by the closure.
BackwardInductionResult BackwardInduction(
    const GameTree& tree, const BackwardInductionOptions& options = {});

// Reachable beliefs with fully enumerated prescription edges. Construction
// throws when any belief's full prescription count exceeds the cap, so this
// is only for games with small per-belief action spaces.
struct BeliefGraph {
  struct Edge {
    uint64_t prescription = 0;  // index in the belief's full enumeration
    double reward = 0.0;
    std::vector<std::pair<int, double>> children;  // (node id, probability)
  };
  struct Node {
    PublicBelief belief;
    std::string key;
    int depth = 0;
    bool terminal = false;
    std::vector<Edge> edges;
  };
  std::vector<Node> nodes;  // breadth-first; depth nondecreasing
  std::unordered_map<std::string, int> index;  // BeliefKeyBytes -> node id

  int root() const { return 0; }
};

BeliefGraph BuildBeliefGraph(const GameTree& tree,
                             uint64_t prescription_cap = 1'000'000,
                             uint64_t node_cap = 1'000'000);

struct ValueIterationResult {
  std::vector<double> values;  // per graph node
  int sweeps_to_converge = 0;
  double root_value = 0.0;
};

// Bellman sweeps in node order (depth nondecreasing, in place) until a full
// sweep leaves every value unchanged. Converges in at most (decision depth)
// changing sweeps.
ValueIterationResult ValueIteration(const BeliefGraph& graph,
                                    int max_sweeps = 1000);

struct CurvePoint {
  int64_t episode = 0;
  double greedy_value = 0.0;
  double best_value = 0.0;
  double wall_ms = 0.0;
};

struct QLearningConfig {
  int64_t episodes = 200'000;
  double initial_epsilon = 1.0;
  double initial_alpha = 0.5;
  // Episode counts at which the linear schedules hit exactly 0; defaults to
  // the episode budget when nonpositive.
  int64_t epsilon_decay_episodes = 0;
  int64_t alpha_decay_episodes = 0;
  // Exact greedy evaluation cadence for the learning curve.
  int64_t eval_every = 100;
};

struct QLearningResult {
  std::vector<CurvePoint> curve;
  double final_greedy_value = 0.0;
  double best_greedy_value = 0.0;
  JointPolicy final_greedy_policy;
};

// Episodic tabular Q-learning on the belief graph: epsilon-greedy over each
// visited belief's prescription edges, one sampled public observation per
// step, terminal bootstrap 0. Greedy values come from exact evaluation of
// the extracted joint policy.
QLearningResult PubMdpQLearning(const GameTree& tree, const BeliefGraph& graph,
                                const QLearningConfig& config,
                                RandomStream* rng);

// Extracts the deterministic joint policy the graph's greedy prescriptions
// induce, completing unreached information states with their first legal
// action. `q` holds one value per (node, edge).
JointPolicy GreedyPolicyFromQ(const GameTree& tree, const BeliefGraph& graph,
                              const std::vector<std::vector<double>>& q);

// Golden cache of oracle values: lines of "<game name> <value>" with values
// printed to 9 decimal places, sorted by name.
std::map<std::string, double> ReadOracleGolden(const std::string& path);
void WriteOracleGolden(const std::string& path,
                       const std::map<std::string, double>& values);

}  // namespace pubmdp

#endif  // PUBMDP_EXACT_H_
