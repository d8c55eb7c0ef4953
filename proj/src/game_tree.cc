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

#include "pubmdp/game_tree.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <unordered_map>
#include <utility>

namespace pubmdp {
namespace {

struct VectorIntHash {
  size_t operator()(const std::vector<int>& v) const {
    size_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using TokenMap = std::unordered_map<std::vector<int>, int, VectorIntHash>;

std::string FormatValue(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

int GameTree::ChildPublicState(int public_state, ObsId obs) const {
  const auto& children = public_states_[public_state].children;
  auto it = std::lower_bound(
      children.begin(), children.end(), obs,
      [](const std::pair<ObsId, int>& e, ObsId o) { return e.first < o; });
  if (it == children.end() || it->first != obs) return -1;
  return it->second;
}

int GameTree::ChildNode(const HistoryNode& stub, int joint_index,
                        int outcome_index) const {
  const std::pair<int, int> key(joint_index, outcome_index);
  const auto& children = stub.children;
  auto it = std::lower_bound(children.begin(), children.end(), key,
                             [](const std::pair<std::pair<int, int>, int>& e,
                                const std::pair<int, int>& k) {
                               return e.first < k;
                             });
  if (it == children.end() || it->first != key) return -1;
  return it->second;
}

MixedRadixIndexer GameTree::JointIndexer(WorldId world) const {
  std::vector<int> sizes(num_players_);
  for (int p = 0; p < num_players_; ++p) {
    sizes[p] = static_cast<int>(game_->LegalActions(world, p).size());
  }
  return MixedRadixIndexer(std::move(sizes));
}

void GameTree::DecodeJointAction(WorldId world, uint64_t joint_index,
                                 JointAction* action) const {
  action->assign(num_players_, 0);
  for (int p = num_players_ - 1; p >= 0; --p) {
    const auto& legal = game_->LegalActions(world, p);
    (*action)[p] = legal[joint_index % legal.size()];
    joint_index /= legal.size();
  }
}

void GameTree::ForEachTerminalExtension(
    const HistoryNode& stub,
    const std::function<void(int, int, const JointAction&,
                             const TransitionOutcome&)>& fn) const {
  MixedRadixIndexer indexer = JointIndexer(stub.world);
  JointAction action;
  std::vector<TransitionOutcome> outcomes;
  for (uint64_t j = 0; j < indexer.count(); ++j) {
    DecodeJointAction(stub.world, j, &action);
    outcomes.clear();
    game_->AppendTransitions(stub.world, action, &outcomes);
    for (int oi = 0; oi < static_cast<int>(outcomes.size()); ++oi) {
      const TransitionOutcome& outcome = outcomes[oi];
      if (game_->IsTerminal(outcome.next_world)) {
        fn(static_cast<int>(j), oi, action, outcome);
      }
    }
  }
}

GameTree GameTree::Build(std::shared_ptr<const FiniteGame> game,
                         Options options) {
  GameTree tree;
  tree.game_ = std::move(game);
  const FiniteGame& g = *tree.game_;
  tree.num_players_ = g.num_players();
  tree.info_sets_.resize(tree.num_players_);
  tree.max_info_in_public_.assign(tree.num_players_, 0);

  TokenMap public_index;
  std::vector<TokenMap> info_index(tree.num_players_);
  // 0 = unknown, 1 = nonterminal, 2 = terminal.
  std::vector<int> public_kind;
  uint64_t entries = 0;

  auto bump = [&entries, &options]() {
    if (++entries > options.max_entries) {
      throw GameDefinitionError("game enumeration exceeds the entry cap");
    }
  };

  auto intern_public = [&](const std::vector<ObsId>& obs_seq, int parent,
                           ObsId incoming) -> int {
    auto it = public_index.find(obs_seq);
    if (it != public_index.end()) {
      if (tree.public_states_[it->second].parent != parent) {
        throw GameDefinitionError("public state reached from two parents");
      }
      return it->second;
    }
    PublicState entry;
    entry.id = static_cast<int>(tree.public_states_.size());
    entry.parent = parent;
    entry.depth = static_cast<int>(obs_seq.size()) - 1;
    entry.incoming_obs = incoming;
    entry.obs_seq = obs_seq;
    entry.info_states.resize(tree.num_players_);
    public_index.emplace(obs_seq, entry.id);
    tree.public_states_.push_back(std::move(entry));
    public_kind.push_back(0);
    if (parent >= 0) {
      auto& siblings = tree.public_states_[parent].children;
      siblings.emplace_back(incoming, tree.public_states_.back().id);
      std::sort(siblings.begin(), siblings.end());
    }
    return tree.public_states_.back().id;
  };

  auto mark_public_kind = [&](int ps, bool terminal) {
    int want = terminal ? 2 : 1;
    if (public_kind[ps] == 0) {
      public_kind[ps] = want;
      tree.public_states_[ps].terminal = terminal;
    } else if (public_kind[ps] != want) {
      throw GameDefinitionError(
          "public state mixes terminal and nonterminal histories");
    }
  };

  // Interns the information state reached by extending `parent_is` (or a
  // root, when parent_is < 0) and validates its legal actions.
  auto intern_info = [&](int player, int parent_is, ActionId action,
                         const std::vector<int>& tokens, int ps,
                         const std::vector<ActionId>* legal) -> int {
    auto& index = info_index[player];
    auto it = index.find(tokens);
    if (it != index.end()) {
      const InfoState& existing = tree.info_sets_[player][it->second];
      if (existing.public_state != ps) {
        throw GameDefinitionError("information state spans public states");
      }
      if (legal != nullptr && existing.legal != *legal) {
        throw GameDefinitionError(
            "legal actions differ across one information state");
      }
      return it->second;
    }
    bump();
    InfoState entry;
    entry.id = static_cast<int>(tree.info_sets_[player].size());
    entry.player = player;
    entry.parent = parent_is;
    entry.last_action = action;
    entry.public_state = ps;
    entry.tokens = tokens;
    if (legal != nullptr) entry.legal = *legal;
    if (parent_is >= 0) {
      const InfoState& parent = tree.info_sets_[player][parent_is];
      entry.depth = parent.depth + 1;
      entry.parent_index_in_public = parent.index_in_public;
    }
    auto& members = tree.public_states_[ps].info_states[player];
    entry.index_in_public = static_cast<int>(members.size());
    members.push_back(entry.id);
    index.emplace(tokens, entry.id);
    tree.info_sets_[player].push_back(std::move(entry));
    return tree.info_sets_[player].back().id;
  };

  // Roots.
  const auto& initial = g.initial_outcomes();
  if (initial.empty()) throw GameDefinitionError("game has no initial outcomes");
  const ObsId root_obs = initial.front().public_obs;
  const int root_ps = intern_public({root_obs}, -1, root_obs);
  for (const auto& outcome : initial) {
    if (outcome.public_obs != root_obs) {
      throw GameDefinitionError(
          "initial outcomes must share one public observation");
    }
    if (g.IsTerminal(outcome.world)) {
      throw GameDefinitionError("initial outcome must be nonterminal");
    }
    bump();
    mark_public_kind(root_ps, false);
    HistoryNode node;
    node.id = static_cast<int>(tree.nodes_.size());
    node.world = outcome.world;
    node.step_probability = outcome.probability;
    node.chance_reach = outcome.probability;
    node.public_obs = outcome.public_obs;
    node.private_obs = outcome.private_obs;
    node.public_state = root_ps;
    node.info_states.resize(tree.num_players_);
    node.info_state_index.resize(tree.num_players_);
    for (int p = 0; p < tree.num_players_; ++p) {
      const std::vector<int> tokens = {outcome.private_obs[p], root_obs};
      const auto& legal = g.LegalActions(outcome.world, p);
      node.info_states[p] = intern_info(p, -1, -1, tokens, root_ps, &legal);
      node.info_state_index[p] =
          tree.info_sets_[p][node.info_states[p]].index_in_public;
    }
    tree.public_states_[root_ps].stubs.push_back(node.id);
    tree.root_nodes_.push_back(node.id);
    tree.nodes_.push_back(std::move(node));
  }

  // Breadth-first expansion of nonterminal histories.
  std::deque<int> frontier;
  for (int id : tree.root_nodes_) frontier.push_back(id);
  std::vector<ObsId> child_obs_seq;
  std::vector<int> child_tokens;
  JointAction action;
  std::vector<TransitionOutcome> outcomes;
  while (!frontier.empty()) {
    const int node_id = frontier.front();
    frontier.pop_front();
    const WorldId world = tree.nodes_[node_id].world;
    const int depth = tree.nodes_[node_id].depth;
    const int parent_ps = tree.nodes_[node_id].public_state;
    MixedRadixIndexer indexer = tree.JointIndexer(world);
    if (indexer.overflowed()) {
      throw GameDefinitionError("joint action space overflows");
    }
    for (uint64_t j = 0; j < indexer.count(); ++j) {
      tree.DecodeJointAction(world, j, &action);
      outcomes.clear();
      g.AppendTransitions(world, action, &outcomes);
      for (size_t oi = 0; oi < outcomes.size(); ++oi) {
        const TransitionOutcome& outcome = outcomes[oi];
        const bool terminal = g.IsTerminal(outcome.next_world);
        child_obs_seq = tree.public_states_[parent_ps].obs_seq;
        child_obs_seq.push_back(outcome.public_obs);
        const int child_ps =
            intern_public(child_obs_seq, parent_ps, outcome.public_obs);
        mark_public_kind(child_ps, terminal);
        if (!terminal && depth + 1 >= g.horizon()) {
          throw GameDefinitionError("horizon exceeded during enumeration");
        }
        int child_id = -1;
        if (!terminal) {
          bump();
          HistoryNode child;
          child.id = static_cast<int>(tree.nodes_.size());
          child.parent = node_id;
          child.depth = depth + 1;
          child.world = outcome.next_world;
          child.step_probability = outcome.probability;
          child.chance_reach =
              tree.nodes_[node_id].chance_reach * outcome.probability;
          child.step_reward = outcome.reward;
          child.accumulated_reward =
              tree.nodes_[node_id].accumulated_reward + outcome.reward;
          child.public_obs = outcome.public_obs;
          child.private_obs = outcome.private_obs;
          child.incoming_action = action;
          child.public_state = child_ps;
          child.info_states.resize(tree.num_players_);
          child.info_state_index.resize(tree.num_players_);
          child_id = child.id;
          tree.public_states_[child_ps].stubs.push_back(child.id);
          tree.nodes_.push_back(std::move(child));
        }
        for (int p = 0; p < tree.num_players_; ++p) {
          const int parent_is = tree.nodes_[node_id].info_states[p];
          child_tokens = tree.info_sets_[p][parent_is].tokens;
          child_tokens.push_back(action[p]);
          child_tokens.push_back(outcome.private_obs[p]);
          child_tokens.push_back(outcome.public_obs);
          const std::vector<ActionId>* legal = nullptr;
          if (!terminal) legal = &g.LegalActions(outcome.next_world, p);
          const int child_is = intern_info(p, parent_is, action[p],
                                           child_tokens, child_ps, legal);
          if (!terminal) {
            auto& node_ref = tree.nodes_[child_id];
            node_ref.info_states[p] = child_is;
            node_ref.info_state_index[p] =
                tree.info_sets_[p][child_is].index_in_public;
          }
        }
        if (!terminal) {
          tree.nodes_[node_id].children.emplace_back(
              std::make_pair(static_cast<int>(j), static_cast<int>(oi)),
              child_id);
          frontier.push_back(child_id);
        }
      }
    }
  }

  for (const PublicState& ps : tree.public_states_) {
    if (!ps.terminal) {
      tree.max_public_len_ =
          std::max(tree.max_public_len_, static_cast<int>(ps.obs_seq.size()));
      for (int p = 0; p < tree.num_players_; ++p) {
        tree.max_info_in_public_[p] =
            std::max(tree.max_info_in_public_[p],
                     static_cast<int>(ps.info_states[p].size()));
      }
    }
  }
  return tree;
}

ReachProbabilities ReachContributions(const GameTree& tree,
                                      const JointPolicy& policy,
                                      const HistoryNode& node) {
  ReachProbabilities reach;
  reach.chance = node.chance_reach;
  reach.player.assign(tree.num_players(), 1.0);
  int current = node.id;
  while (tree.node(current).parent >= 0) {
    const HistoryNode& child = tree.node(current);
    const HistoryNode& parent = tree.node(child.parent);
    for (int p = 0; p < tree.num_players(); ++p) {
      const InfoState& is = tree.info_state(p, parent.info_states[p]);
      const ActionId taken = child.incoming_action[p];
      int pos = -1;
      for (size_t i = 0; i < is.legal.size(); ++i) {
        if (is.legal[i] == taken) pos = static_cast<int>(i);
      }
      if (pos < 0) throw GameDefinitionError("history action not legal");
      reach.player[p] *= policy.rows[p][is.id][pos];
    }
    current = child.parent;
  }
  return reach;
}

namespace {

// Enumerates only the support of the product policy, digit by digit, so
// near-deterministic policies cost far less than the full joint space.
double EvaluateFrom(const GameTree& tree, const JointPolicy& policy,
                    const HistoryNode& node, double reach) {
  const FiniteGame& g = tree.game();
  MixedRadixIndexer indexer = tree.JointIndexer(node.world);
  std::vector<int> digits(tree.num_players());
  JointAction action;
  std::vector<TransitionOutcome> outcomes;
  double total = 0.0;
  std::function<void(int, double)> expand = [&](int player,
                                                double action_prob) {
    if (player < tree.num_players()) {
      const std::vector<double>& row =
          policy.rows[player][node.info_states[player]];
      for (int digit = 0; digit < static_cast<int>(row.size()); ++digit) {
        if (row[digit] <= 0.0) continue;
        digits[player] = digit;
        expand(player + 1, action_prob * row[digit]);
      }
      return;
    }
    const uint64_t j = indexer.Encode(digits);
    tree.DecodeJointAction(node.world, j, &action);
    outcomes.clear();
    g.AppendTransitions(node.world, action, &outcomes);
    for (size_t oi = 0; oi < outcomes.size(); ++oi) {
      const TransitionOutcome& outcome = outcomes[oi];
      const double p = reach * action_prob * outcome.probability;
      total += p * outcome.reward;
      if (!g.IsTerminal(outcome.next_world)) {
        const int child =
            tree.ChildNode(node, static_cast<int>(j), static_cast<int>(oi));
        if (child < 0) throw GameDefinitionError("missing child history");
        total += EvaluateFrom(tree, policy, tree.node(child), p);
      }
    }
  };
  expand(0, 1.0);
  return total;
}

}  // namespace

double EvaluateJointPolicy(const GameTree& tree, const JointPolicy& policy) {
  double total = 0.0;
  for (int root : tree.root_nodes()) {
    const HistoryNode& node = tree.node(root);
    total += EvaluateFrom(tree, policy, node, node.step_probability);
  }
  return total;
}

double SampleEpisodeReturn(const GameTree& tree, const JointPolicy& policy,
                           RandomStream* rng) {
  const FiniteGame& g = tree.game();
  std::vector<double> weights;
  weights.reserve(tree.root_nodes().size());
  for (int root : tree.root_nodes()) {
    weights.push_back(tree.node(root).step_probability);
  }
  int current = tree.root_nodes()[rng->SampleIndex(weights)];
  double total = 0.0;
  std::vector<int> digits(tree.num_players());
  JointAction action;
  std::vector<TransitionOutcome> outcomes;
  while (true) {
    const HistoryNode& node = tree.node(current);
    for (int p = 0; p < tree.num_players(); ++p) {
      digits[p] = rng->SampleIndex(policy.rows[p][node.info_states[p]]);
    }
    MixedRadixIndexer indexer = tree.JointIndexer(node.world);
    const uint64_t j = indexer.Encode(digits);
    tree.DecodeJointAction(node.world, j, &action);
    outcomes.clear();
    g.AppendTransitions(node.world, action, &outcomes);
    weights.clear();
    for (const auto& outcome : outcomes) weights.push_back(outcome.probability);
    const int oi = rng->SampleIndex(weights);
    total += outcomes[oi].reward;
    if (g.IsTerminal(outcomes[oi].next_world)) return total;
    current = tree.ChildNode(node, static_cast<int>(j), oi);
    if (current < 0) throw GameDefinitionError("missing child history");
  }
}

JointPolicy MakeUniformPolicy(const GameTree& tree) {
  JointPolicy policy;
  policy.rows.resize(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    policy.rows[p].resize(tree.info_states(p).size());
    for (const InfoState& is : tree.info_states(p)) {
      if (is.legal.empty()) continue;
      policy.rows[p][is.id].assign(is.legal.size(),
                                   1.0 / static_cast<double>(is.legal.size()));
    }
  }
  return policy;
}

JointPolicy MakeFirstLegalPolicy(const GameTree& tree) {
  JointPolicy policy;
  policy.rows.resize(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    policy.rows[p].resize(tree.info_states(p).size());
    for (const InfoState& is : tree.info_states(p)) {
      if (is.legal.empty()) continue;
      policy.rows[p][is.id].assign(is.legal.size(), 0.0);
      policy.rows[p][is.id][0] = 1.0;
    }
  }
  return policy;
}

namespace {

// Renders one terminal history. The nonterminal prefix is reconstructed by
// walking the stub's parent chain.
std::string RenderTerminalHistory(const GameTree& tree, const HistoryNode& stub,
                                  const JointAction& last_action,
                                  const TransitionOutcome& last) {
  const FiniteGame& g = tree.game();
  std::vector<const HistoryNode*> path;
  for (int id = stub.id; id >= 0; id = tree.node(id).parent) {
    path.push_back(&tree.node(id));
  }
  std::reverse(path.begin(), path.end());

  std::string worlds, actions, pub;
  std::vector<std::string> priv(tree.num_players());
  for (size_t i = 0; i < path.size(); ++i) {
    const HistoryNode* n = path[i];
    if (i > 0) {
      worlds += ">";
      if (!actions.empty()) actions += ";";
      actions += "(";
      for (int p = 0; p < tree.num_players(); ++p) {
        if (p > 0) actions += ",";
        actions += g.action_name(p, n->incoming_action[p]);
      }
      actions += ")";
      pub += ",";
    }
    worlds += g.world_name(n->world);
    pub += g.public_obs_name(n->public_obs);
    for (int p = 0; p < tree.num_players(); ++p) {
      if (i > 0) priv[p] += ",";
      priv[p] += g.private_obs_name(p, n->private_obs[p]);
    }
  }
  worlds += ">" + g.world_name(last.next_world);
  if (!actions.empty()) actions += ";";
  actions += "(";
  for (int p = 0; p < tree.num_players(); ++p) {
    if (p > 0) actions += ",";
    actions += g.action_name(p, last_action[p]);
  }
  actions += ")";
  pub += "," + g.public_obs_name(last.public_obs);
  for (int p = 0; p < tree.num_players(); ++p) {
    priv[p] += "," + g.private_obs_name(p, last.private_obs[p]);
  }

  std::string line = worlds + " | actions " + actions + " | public " + pub;
  for (int p = 0; p < tree.num_players(); ++p) {
    line += " | private" + std::to_string(p) + " " + priv[p];
  }
  line += " | return " +
          FormatValue(stub.accumulated_reward + last.reward);
  return line;
}

}  // namespace

std::string WriteTreeDump(const GameTree& tree) {
  std::string out;
  for (const HistoryNode& stub : tree.nodes()) {
    tree.ForEachTerminalExtension(
        stub, [&](int joint_index, int outcome_index, const JointAction& action,
                  const TransitionOutcome& outcome) {
          (void)joint_index;
          (void)outcome_index;
          out += RenderTerminalHistory(tree, stub, action, outcome);
          out += "\n";
        });
  }
  return out;
}

}  // namespace pubmdp
