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

#ifndef PUBMDP_GAME_TREE_H_
#define PUBMDP_GAME_TREE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pubmdp/fosg.h"
#include "pubmdp/rng.h"

namespace pubmdp {

// Full enumeration of a finite game.
//
// Nonterminal histories are materialized as nodes; terminal histories are
// not stored (games with wide final joint-action spaces would need hundreds
// of millions of them) and are instead visited on demand as (stub, joint
// action, outcome) extensions of the nonterminal frontier. Terminal public
// states and terminal information states ARE materialized so that beliefs
// over them are well defined.
//
// Identifiers are assigned in breadth-first enumeration order and are stable
// across rebuilds of the same game, so tables indexed by id (policies,
// value functions) are reproducible.

// One nonterminal history: the path (w0, a0, w1, ..., wt) from an initial
// outcome to a nonterminal world.
struct HistoryNode {
  int id = 0;
  int parent = -1;  // -1 for histories of length zero
  int depth = 0;    // number of joint actions taken
  WorldId world = 0;
  double step_probability = 0.0;  // chance probability of the last step
  double chance_reach = 0.0;      // product of step probabilities from the root
  double step_reward = 0.0;
  double accumulated_reward = 0.0;
  ObsId public_obs = 0;               // emitted on the step into this node
  std::vector<ObsId> private_obs;     // per player, emitted on the same step
  JointAction incoming_action;        // empty for root histories
  int public_state = 0;
  std::vector<int> info_states;       // per player, global id
  std::vector<int> info_state_index;  // per player, index within S_i(s)
  // Nonterminal children, keyed by (joint action index, outcome index) in
  // enumeration order.
  std::vector<std::pair<std::pair<int, int>, int>> children;
};

// One information state of one player: the player's private/public
// observation and own-action sequence. Information states at terminal
// public states have an empty legal list.
struct InfoState {
  int id = 0;
  int player = 0;
  int depth = 0;
  int parent = -1;           // info state one step shorter; -1 at the root
  ActionId last_action = -1; // own action taken between parent and this
  int public_state = 0;
  int index_in_public = 0;          // index within S_player(public_state)
  int parent_index_in_public = -1;  // parent's index within its public state
  std::vector<int> tokens;  // [priv0, pub0, (action, priv, pub)...]
  std::vector<ActionId> legal;
};

// One public state: a sequence of public observations.
struct PublicState {
  int id = 0;
  int parent = -1;
  int depth = 0;
  ObsId incoming_obs = 0;
  std::vector<ObsId> obs_seq;
  bool terminal = false;
  std::vector<int> stubs;  // nonterminal histories here; empty when terminal
  std::vector<std::vector<int>> info_states;   // per player, canonical order
  std::vector<std::pair<ObsId, int>> children; // sorted by observation
};

class GameTree {
 public:
  struct Options {
    // Bound on materialized nonterminal histories plus information states.
    uint64_t max_entries = 4'000'000;
  };

  static GameTree Build(std::shared_ptr<const FiniteGame> game,
                        Options options);
  static GameTree Build(std::shared_ptr<const FiniteGame> game) {
    return Build(std::move(game), Options());
  }

  const FiniteGame& game() const { return *game_; }
  const std::shared_ptr<const FiniteGame>& game_ptr() const { return game_; }
  int num_players() const { return num_players_; }

  const std::vector<HistoryNode>& nodes() const { return nodes_; }
  const HistoryNode& node(int id) const { return nodes_[id]; }
  const std::vector<int>& root_nodes() const { return root_nodes_; }

  const std::vector<PublicState>& public_states() const {
    return public_states_;
  }
  const PublicState& public_state(int id) const { return public_states_[id]; }
  int root_public_state() const { return 0; }
  // Child public state reached by appending `obs`, or -1.
  int ChildPublicState(int public_state, ObsId obs) const;

  const std::vector<InfoState>& info_states(int player) const {
    return info_sets_[player];
  }
  const InfoState& info_state(int player, int id) const {
    return info_sets_[player][id];
  }

  // Longest public observation sequence over nonterminal public states and
  // the widest per-player information-state set; used by fixed-shape belief
  // encodings.
  int max_nonterminal_public_depth() const { return max_public_len_; }
  int max_info_states_in_public(int player) const {
    return max_info_in_public_[player];
  }

  // Visits every terminal extension (stub, joint action, outcome) of `stub`.
  void ForEachTerminalExtension(
      const HistoryNode& stub,
      const std::function<void(int joint_index, int outcome_index,
                               const JointAction&, const TransitionOutcome&)>&
          fn) const;

  // Child stub for a (joint index, outcome index) pair, or -1 when the
  // outcome is terminal.
  int ChildNode(const HistoryNode& stub, int joint_index,
                int outcome_index) const;

  MixedRadixIndexer JointIndexer(WorldId world) const;

  // Decodes a joint action index at `world` into global action ids.
  void DecodeJointAction(WorldId world, uint64_t joint_index,
                         JointAction* action) const;

 private:
  GameTree() = default;

  std::shared_ptr<const FiniteGame> game_;
  int num_players_ = 0;
  std::vector<HistoryNode> nodes_;
  std::vector<int> root_nodes_;
  std::vector<PublicState> public_states_;
  std::vector<std::vector<InfoState>> info_sets_;  // per player
  int max_public_len_ = 0;
  std::vector<int> max_info_in_public_;
};

// Chance and per-player reach probability factors of one history under a
// behavioral joint policy.
struct ReachProbabilities {
  double chance = 1.0;
  std::vector<double> player;
};

ReachProbabilities ReachContributions(const GameTree& tree,
                                      const JointPolicy& policy,
                                      const HistoryNode& node);

// Exact expected return of a behavioral joint policy. Zero-probability
// branches are pruned, so evaluating a deterministic policy touches only
// the histories it can reach.
double EvaluateJointPolicy(const GameTree& tree, const JointPolicy& policy);

// Return of one sampled play-through.
double SampleEpisodeReturn(const GameTree& tree, const JointPolicy& policy,
                           RandomStream* rng);

JointPolicy MakeUniformPolicy(const GameTree& tree);

// Deterministic policy choosing every information state's first legal action.
JointPolicy MakeFirstLegalPolicy(const GameTree& tree);

// Canonical text rendering of the full game tree, one terminal history per
// line (world path, joint actions, observations, return), in enumeration
// order. Intended for golden-file comparisons of small games.
std::string WriteTreeDump(const GameTree& tree);

}  // namespace pubmdp

#endif  // PUBMDP_GAME_TREE_H_
