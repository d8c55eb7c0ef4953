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

#ifndef PUBMDP_TESTS_SUPPORT_BAYES_CHECK_H_
#define PUBMDP_TESTS_SUPPORT_BAYES_CHECK_H_

// Cross-checks the indicator-based belief update against a reference Bayes
// filter that works directly on history distributions, never touching
// indicators. The reference tracks explicit (history, probability) pairs,
// steps them through a prescription with elementary conditioning on the
// public observation, and the check demands that
// ReconstructHistoryDistribution of the indicator-updated belief matches
// pointwise.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pubmdp/belief.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/rng.h"

namespace pubmdp {
namespace testing {

struct BayesCheckStats {
  int64_t beliefs_visited = 0;
  int64_t prescriptions_checked = 0;
  int64_t posteriors_compared = 0;
  double max_error = 0.0;
};

namespace bayes_internal {

// Identity of one history: a tree node for nonterminal ones, a final
// transition (stub, joint, outcome) for terminal ones.
using HistoryKey = std::tuple<int, int, uint64_t, int>;

inline HistoryKey NodeKey(int node) { return {node, -1, 0, -1}; }
inline HistoryKey TerminalKey(int stub, uint64_t joint, int outcome) {
  return {-1, stub, joint, outcome};
}

struct ReferenceState {
  std::map<HistoryKey, double> distribution;
  double observation_probability = 0.0;
  bool terminal = false;
};

inline std::map<ObsId, ReferenceState> ReferenceStep(
    const GameTree& tree, const std::map<HistoryKey, double>& current,
    const PrescriptionVector& prescription) {
  std::map<ObsId, ReferenceState> by_obs;
  std::vector<int> digits(tree.num_players());
  JointAction action;
  std::vector<TransitionOutcome> outcomes;
  const FiniteGame& game = tree.game();
  for (const auto& [key, probability] : current) {
    const HistoryNode& node = tree.node(std::get<0>(key));
    for (int player = 0; player < tree.num_players(); ++player) {
      digits[player] =
          prescription.actions[player][node.info_state_index[player]];
    }
    MixedRadixIndexer indexer = tree.JointIndexer(node.world);
    const uint64_t joint = indexer.Encode(digits);
    tree.DecodeJointAction(node.world, joint, &action);
    outcomes.clear();
    game.AppendTransitions(node.world, action, &outcomes);
    for (int oi = 0; oi < static_cast<int>(outcomes.size()); ++oi) {
      const TransitionOutcome& outcome = outcomes[oi];
      ReferenceState& state = by_obs[outcome.public_obs];
      if (game.IsTerminal(outcome.next_world)) {
        state.terminal = true;
        state.distribution[TerminalKey(node.id, joint, oi)] +=
            probability * outcome.probability;
      } else {
        int child = tree.ChildNode(node, static_cast<int>(joint), oi);
        if (child < 0) throw std::runtime_error("missing child history");
        state.distribution[NodeKey(child)] +=
            probability * outcome.probability;
      }
    }
  }
  for (auto& [obs, state] : by_obs) {
    double total = 0.0;
    for (const auto& [key, p] : state.distribution) total += p;
    state.observation_probability = total;
    for (auto& [key, p] : state.distribution) p /= total;
  }
  return by_obs;
}

inline void ComparePosterior(const GameTree& tree, const PublicBelief& belief,
                             const ReferenceState& reference, double tolerance,
                             BayesCheckStats* stats) {
  std::vector<BeliefSupportEntry> reconstructed =
      ReconstructHistoryDistribution(tree, belief);
  std::map<HistoryKey, double> actual;
  for (const BeliefSupportEntry& entry : reconstructed) {
    HistoryKey key = entry.node >= 0
                         ? NodeKey(entry.node)
                         : TerminalKey(entry.stub, entry.joint_index,
                                       entry.outcome_index);
    actual[key] = entry.probability;
  }
  if (actual.size() != reference.distribution.size()) {
    std::ostringstream message;
    message << "support size mismatch: reconstructed " << actual.size()
            << " histories, reference has " << reference.distribution.size();
    throw std::runtime_error(message.str());
  }
  for (const auto& [key, expected] : reference.distribution) {
    auto it = actual.find(key);
    if (it == actual.end()) {
      throw std::runtime_error("reconstructed support misses a history");
    }
    double error = std::abs(it->second - expected);
    if (error > stats->max_error) stats->max_error = error;
    if (error > tolerance) {
      std::ostringstream message;
      message << "posterior mismatch: " << it->second << " vs " << expected;
      throw std::runtime_error(message.str());
    }
    ++stats->posteriors_compared;
  }
}

}  // namespace bayes_internal

// Walks every reachable belief breadth-first. At each belief it checks all
// prescription vectors when the full space has at most `enumerate_cap`
// members, and `samples_over_cap` sampled ones otherwise. For every
// (belief, prescription, observation) it verifies the observation
// probabilities and the reconstructed posterior against the reference
// filter, within `tolerance` pointwise.
inline BayesCheckStats CheckBayesConsistency(const GameTree& tree,
                                             uint64_t enumerate_cap,
                                             int samples_over_cap,
                                             double tolerance,
                                             RandomStream* rng) {
  using bayes_internal::ReferenceState;
  using bayes_internal::ReferenceStep;
  BayesCheckStats stats;

  struct Item {
    PublicBelief belief;
    std::map<bayes_internal::HistoryKey, double> distribution;
  };
  std::vector<Item> frontier;
  {
    Item root;
    root.belief = InitialBelief(tree);
    for (const BeliefSupportEntry& entry :
         ReconstructHistoryDistribution(tree, root.belief)) {
      root.distribution[bayes_internal::NodeKey(entry.node)] =
          entry.probability;
    }
    frontier.push_back(std::move(root));
  }
  std::set<std::string> visited;
  visited.insert(BeliefKeyBytes(tree, frontier[0].belief));

  while (!frontier.empty()) {
    std::vector<Item> next_frontier;
    for (const Item& item : frontier) {
      ++stats.beliefs_visited;
      PrescriptionSpace space(tree, item.belief, /*support_only=*/false);
      std::vector<PrescriptionVector> prescriptions;
      if (!space.Overflowed() && space.Count() <= enumerate_cap) {
        prescriptions = EnumeratePrescriptionVectors(tree, item.belief,
                                                     enumerate_cap);
      } else {
        prescriptions.reserve(samples_over_cap);
        for (int s = 0; s < samples_over_cap; ++s) {
          prescriptions.push_back(space.Sample(rng));
        }
      }
      for (const PrescriptionVector& prescription : prescriptions) {
        ++stats.prescriptions_checked;
        std::map<ObsId, ReferenceState> reference =
            ReferenceStep(tree, item.distribution, prescription);
        std::vector<std::pair<ObsId, double>> observed =
            ObservationDistribution(tree, item.belief, prescription);
        if (observed.size() != reference.size()) {
          throw std::runtime_error("observation support mismatch");
        }
        double mass = 0.0;
        for (const auto& [obs, probability] : observed) {
          auto it = reference.find(obs);
          if (it == reference.end()) {
            throw std::runtime_error("unexpected observation");
          }
          if (std::abs(probability - it->second.observation_probability) >
              tolerance) {
            throw std::runtime_error("observation probability mismatch");
          }
          mass += probability;
        }
        if (std::abs(mass - 1.0) > tolerance) {
          throw std::runtime_error("observation probabilities do not sum to 1");
        }
        for (const auto& [obs, probability] : observed) {
          PublicBelief next =
              NextBelief(tree, item.belief, prescription, obs);
          const ReferenceState& state = reference.at(obs);
          bayes_internal::ComparePosterior(tree, next, state, tolerance,
                                           &stats);
          if (state.terminal != IsTerminalBelief(tree, next)) {
            throw std::runtime_error("terminal flag mismatch");
          }
          if (!state.terminal &&
              visited.insert(BeliefKeyBytes(tree, next)).second) {
            Item child;
            child.belief = next;
            child.distribution = state.distribution;
            next_frontier.push_back(std::move(child));
          }
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  return stats;
}

}  // namespace testing
}  // namespace pubmdp

#endif  // PUBMDP_TESTS_SUPPORT_BAYES_CHECK_H_
