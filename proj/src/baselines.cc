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

#include "pubmdp/baselines.h"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace pubmdp {
namespace {

int ArgmaxFirst(const std::vector<double>& row) {
  int best = 0;
  for (size_t a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = static_cast<int>(a);
  }
  return best;
}

// Q rows for one agent. Plain lookups index the dense per-information-state
// table; augmented lookups key a map by (information state, extra bytes).
class AgentTable {
 public:
  AgentTable(const GameTree& tree, int player, bool augmented)
      : tree_(tree), player_(player), augmented_(augmented) {
    if (!augmented_) {
      rows_.resize(tree.info_states(player).size());
      for (size_t i = 0; i < rows_.size(); ++i) {
        rows_[i].assign(tree.info_state(player, static_cast<int>(i)).legal.size(),
                        0.0);
      }
    }
  }

  std::vector<double>& Row(int info_state, const std::string& augmentation) {
    if (!augmented_) return rows_[info_state];
    std::string key(sizeof(int), '\0');
    std::memcpy(key.data(), &info_state, sizeof(int));
    key += augmentation;
    auto [it, inserted] = augmented_rows_.try_emplace(std::move(key));
    if (inserted) {
      it->second.assign(tree_.info_state(player_, info_state).legal.size(),
                        0.0);
    }
    return it->second;
  }

 private:
  const GameTree& tree_;
  int player_;
  bool augmented_;
  std::vector<std::vector<double>> rows_;
  std::unordered_map<std::string, std::vector<double>> augmented_rows_;
};

}  // namespace

BaselineResult TrainBaseline(const GameTree& tree,
                             const BaselineConfig& config, RandomStream* rng) {
  if (config.episodes < 0) {
    throw std::invalid_argument("episode budget must be nonnegative");
  }
  if (config.initial_epsilon < 0.0 || config.initial_epsilon > 1.0) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (config.algorithm == BaselineAlgorithm::kHql &&
      (config.hysteretic_beta < 0.0 ||
       config.hysteretic_beta > config.initial_alpha)) {
    throw std::invalid_argument("beta must lie in [0, alpha]");
  }
  const bool augmented = config.algorithm == BaselineAlgorithm::kSad;
  if (augmented) {
    for (int p = 0; p < tree.num_players(); ++p) {
      if (tree.game().num_actions(p) > 255) {
        throw std::invalid_argument(
            "augmented keys support at most 255 actions per player");
      }
    }
  }
  const int64_t eps_decay = config.epsilon_decay_episodes > 0
                                ? config.epsilon_decay_episodes
                                : config.episodes;
  const int64_t alpha_decay = config.alpha_decay_episodes > 0
                                  ? config.alpha_decay_episodes
                                  : config.episodes;
  const int64_t eval_every = std::max<int64_t>(1, config.eval_every);
  const int players = tree.num_players();

  std::vector<AgentTable> tables;
  tables.reserve(players);
  for (int p = 0; p < players; ++p) {
    tables.emplace_back(tree, p, augmented);
  }

  // Appends every teammate's greedy action to an agent's augmentation.
  const auto advance_augmentations = [&](const JointAction& greedy,
                                         std::vector<std::string>* augs) {
    if (!augmented) return;
    for (int i = 0; i < players; ++i) {
      for (int j = 0; j < players; ++j) {
        if (j != i) (*augs)[i].push_back(static_cast<char>(greedy[j]));
      }
    }
  };

  // Greedy joint policy under the current tables. For augmented keys this
  // replays greedy play over every history, which is a valid policy here
  // because the games make every past action either publicly observed or
  // forced, so the augmentation is a function of the information state.
  const auto extract_policy = [&] {
    JointPolicy policy = MakeFirstLegalPolicy(tree);
    std::vector<TransitionOutcome> outcomes;
    std::function<void(int, const std::vector<std::string>&)> walk =
        [&](int node_id, const std::vector<std::string>& augs) {
          const HistoryNode& node = tree.node(node_id);
          JointAction action(players);
          uint64_t joint = 0;
          std::vector<std::string> next_augs = augs;
          JointAction greedy_global(players);
          for (int p = 0; p < players; ++p) {
            const std::vector<double>& row =
                tables[p].Row(node.info_states[p], augs[p]);
            const int greedy = ArgmaxFirst(row);
            const auto& legal = tree.game().LegalActions(node.world, p);
            action[p] = legal[greedy];
            greedy_global[p] = legal[greedy];
            joint = joint * legal.size() + static_cast<uint64_t>(greedy);
            auto& out_row = policy.rows[p][node.info_states[p]];
            std::fill(out_row.begin(), out_row.end(), 0.0);
            out_row[greedy] = 1.0;
          }
          advance_augmentations(greedy_global, &next_augs);
          outcomes.clear();
          tree.game().AppendTransitions(node.world, action, &outcomes);
          for (size_t oi = 0; oi < outcomes.size(); ++oi) {
            if (tree.game().IsTerminal(outcomes[oi].next_world)) continue;
            const int child = tree.ChildNode(node, static_cast<int>(joint),
                                             static_cast<int>(oi));
            walk(child, next_augs);
          }
        };
    const std::vector<std::string> empty(players);
    for (int root : tree.root_nodes()) walk(root, empty);
    return policy;
  };

  BaselineResult result;
  const auto start = std::chrono::steady_clock::now();
  const auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };
  result.best_greedy_value = -std::numeric_limits<double>::infinity();
  const auto evaluate = [&](int64_t episode) {
    JointPolicy policy = extract_policy();
    const double value = EvaluateJointPolicy(tree, policy);
    result.best_greedy_value = std::max(result.best_greedy_value, value);
    result.curve.push_back({episode, value, result.best_greedy_value,
                            wall_ms()});
    result.final_greedy_value = value;
    result.final_greedy_policy = std::move(policy);
  };
  evaluate(0);

  std::vector<double> root_weights;
  for (int root : tree.root_nodes()) {
    root_weights.push_back(tree.node(root).chance_reach);
  }
  std::vector<double> outcome_probs;
  std::vector<TransitionOutcome> outcomes;

  for (int64_t episode = 0; episode < config.episodes; ++episode) {
    const double epsilon =
        config.initial_epsilon *
        std::max(0.0, 1.0 - static_cast<double>(episode) / eps_decay);
    const double decay =
        std::max(0.0, 1.0 - static_cast<double>(episode) / alpha_decay);
    const double alpha = config.initial_alpha * decay;
    const double beta = config.hysteretic_beta * decay;

    int node_id = tree.root_nodes()[rng->SampleIndex(root_weights)];
    std::vector<std::string> augs(players);
    while (node_id >= 0) {
      const HistoryNode& node = tree.node(node_id);
      JointAction action(players);
      std::vector<int> chosen(players);
      std::vector<int> greedy(players);
      JointAction greedy_global(players);
      uint64_t joint = 0;
      for (int p = 0; p < players; ++p) {
        const std::vector<double>& row =
            tables[p].Row(node.info_states[p], augs[p]);
        greedy[p] = ArgmaxFirst(row);
        const auto& legal = tree.game().LegalActions(node.world, p);
        greedy_global[p] = legal[greedy[p]];
        chosen[p] = rng->UniformDouble() < epsilon
                        ? rng->UniformInt(static_cast<int>(legal.size()))
                        : greedy[p];
        action[p] = legal[chosen[p]];
        joint = joint * legal.size() + static_cast<uint64_t>(chosen[p]);
      }
      std::vector<std::string> next_augs = augs;
      advance_augmentations(greedy_global, &next_augs);

      outcomes.clear();
      tree.game().AppendTransitions(node.world, action, &outcomes);
      outcome_probs.clear();
      for (const auto& outcome : outcomes) {
        outcome_probs.push_back(outcome.probability);
      }
      const int oi = rng->SampleIndex(outcome_probs);
      const TransitionOutcome& outcome = outcomes[oi];
      const bool terminal = tree.game().IsTerminal(outcome.next_world);
      const int child =
          terminal ? -1
                   : tree.ChildNode(node, static_cast<int>(joint), oi);

      if (config.algorithm == BaselineAlgorithm::kVdn) {
        double joint_q = 0.0;
        double joint_next = 0.0;
        for (int p = 0; p < players; ++p) {
          joint_q += tables[p].Row(node.info_states[p], augs[p])[chosen[p]];
          if (!terminal) {
            const std::vector<double>& next_row = tables[p].Row(
                tree.node(child).info_states[p], next_augs[p]);
            joint_next += *std::max_element(next_row.begin(), next_row.end());
          }
        }
        const double delta = outcome.reward + joint_next - joint_q;
        for (int p = 0; p < players; ++p) {
          tables[p].Row(node.info_states[p], augs[p])[chosen[p]] +=
              alpha * delta;
        }
      } else {
        for (int p = 0; p < players; ++p) {
          double next_max = 0.0;
          if (!terminal) {
            const std::vector<double>& next_row = tables[p].Row(
                tree.node(child).info_states[p], next_augs[p]);
            next_max = *std::max_element(next_row.begin(), next_row.end());
          }
          std::vector<double>& row =
              tables[p].Row(node.info_states[p], augs[p]);
          const double delta = outcome.reward + next_max - row[chosen[p]];
          const double rate =
              config.algorithm == BaselineAlgorithm::kHql && delta < 0.0
                  ? beta
                  : alpha;
          row[chosen[p]] += rate * delta;
        }
      }
      augs = std::move(next_augs);
      node_id = child;
    }

    if ((episode + 1) % eval_every == 0 || episode + 1 == config.episodes) {
      evaluate(episode + 1);
    }
  }
  return result;
}

}  // namespace pubmdp
