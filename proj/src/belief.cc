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

#include "pubmdp/belief.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace pubmdp {
namespace {

void CheckBeliefShape(const GameTree& tree, const PublicBelief& belief) {
  if (belief.public_state < 0 ||
      belief.public_state >= static_cast<int>(tree.public_states().size())) {
    throw std::runtime_error("belief references an unknown public state");
  }
  const PublicState& ps = tree.public_state(belief.public_state);
  if (static_cast<int>(belief.indicators.size()) != tree.num_players()) {
    throw std::runtime_error("belief indicator count != player count");
  }
  for (int p = 0; p < tree.num_players(); ++p) {
    if (belief.indicators[p].size() != ps.info_states[p].size()) {
      throw std::runtime_error("belief indicator length mismatch");
    }
  }
}

void CheckPrescriptionShape(const GameTree& tree, const PublicBelief& belief,
                            const PrescriptionVector& prescription) {
  const PublicState& ps = tree.public_state(belief.public_state);
  if (static_cast<int>(prescription.actions.size()) != tree.num_players()) {
    throw std::runtime_error("prescription player count mismatch");
  }
  for (int p = 0; p < tree.num_players(); ++p) {
    const auto& rows = prescription.actions[p];
    if (rows.size() != ps.info_states[p].size()) {
      throw std::runtime_error("prescription row count mismatch");
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      const InfoState& is = tree.info_state(p, ps.info_states[p][r]);
      if (rows[r] < 0 || rows[r] >= static_cast<int>(is.legal.size())) {
        throw std::runtime_error("prescription action out of legal range");
      }
    }
  }
}

// Maps (parent row index, own action) to the row index of the child
// information state, for one player at one public state.
std::map<std::pair<int, ActionId>, int> ChildRowIndex(const GameTree& tree,
                                                      const PublicState& ps,
                                                      int player) {
  std::map<std::pair<int, ActionId>, int> index;
  for (size_t r = 0; r < ps.info_states[player].size(); ++r) {
    const InfoState& is = tree.info_state(player, ps.info_states[player][r]);
    index[{is.parent_index_in_public, is.last_action}] =
        static_cast<int>(r);
  }
  return index;
}

// Weight of one nonterminal history inside the belief: chance reach times
// the product of player indicators, which is 0 or the chance reach.
double StubWeight(const PublicBelief& belief, const HistoryNode& stub) {
  double w = stub.chance_reach;
  for (size_t p = 0; p < belief.indicators.size(); ++p) {
    if (belief.indicators[p][stub.info_state_index[p]] == 0) return 0.0;
  }
  return w;
}

}  // namespace

std::string BeliefKeyBytes(const GameTree& tree, const PublicBelief& belief) {
  CheckBeliefShape(tree, belief);
  const PublicState& ps = tree.public_state(belief.public_state);
  std::string key;
  key.reserve(2 * ps.obs_seq.size() + belief.indicators.size() * 8);
  for (ObsId obs : ps.obs_seq) {
    key.push_back(static_cast<char>((obs >> 8) & 0xff));
    key.push_back(static_cast<char>(obs & 0xff));
  }
  for (const auto& indicator : belief.indicators) {
    uint8_t byte = 0;
    int bits = 0;
    for (uint8_t bit : indicator) {
      byte = static_cast<uint8_t>((byte << 1) | (bit ? 1 : 0));
      if (++bits == 8) {
        key.push_back(static_cast<char>(byte));
        byte = 0;
        bits = 0;
      }
    }
    if (bits > 0) {
      byte = static_cast<uint8_t>(byte << (8 - bits));
      key.push_back(static_cast<char>(byte));
    }
  }
  return key;
}

PublicBelief InitialBelief(const GameTree& tree) {
  PublicBelief belief;
  belief.public_state = tree.root_public_state();
  const PublicState& ps = tree.public_state(belief.public_state);
  belief.indicators.resize(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    belief.indicators[p].assign(ps.info_states[p].size(), 1);
  }
  return belief;
}

bool IsTerminalBelief(const GameTree& tree, const PublicBelief& belief) {
  return tree.public_state(belief.public_state).terminal;
}

std::vector<BeliefSupportEntry> ReconstructHistoryDistribution(
    const GameTree& tree, const PublicBelief& belief) {
  CheckBeliefShape(tree, belief);
  const PublicState& ps = tree.public_state(belief.public_state);
  std::vector<BeliefSupportEntry> entries;
  double total = 0.0;
  if (!ps.terminal) {
    for (int stub_id : ps.stubs) {
      const HistoryNode& stub = tree.node(stub_id);
      const double w = StubWeight(belief, stub);
      if (w <= 0.0) continue;
      BeliefSupportEntry entry;
      entry.node = stub_id;
      entry.world = stub.world;
      entry.info_index = stub.info_state_index;
      entry.probability = w;
      total += w;
      entries.push_back(std::move(entry));
    }
  } else {
    const PublicState& parent = tree.public_state(ps.parent);
    std::vector<std::map<std::pair<int, ActionId>, int>> child_row(
        tree.num_players());
    for (int p = 0; p < tree.num_players(); ++p) {
      child_row[p] = ChildRowIndex(tree, ps, p);
    }
    for (int stub_id : parent.stubs) {
      const HistoryNode& stub = tree.node(stub_id);
      tree.ForEachTerminalExtension(
          stub, [&](int joint_index, int outcome_index,
                    const JointAction& action,
                    const TransitionOutcome& outcome) {
            if (outcome.public_obs != ps.incoming_obs) return;
            BeliefSupportEntry entry;
            entry.stub = stub_id;
            entry.joint_index = static_cast<uint64_t>(joint_index);
            entry.outcome_index = outcome_index;
            entry.world = outcome.next_world;
            entry.info_index.resize(tree.num_players());
            double w = stub.chance_reach * outcome.probability;
            for (int p = 0; p < tree.num_players(); ++p) {
              const auto it = child_row[p].find(
                  {stub.info_state_index[p], action[p]});
              if (it == child_row[p].end()) {
                throw std::runtime_error("terminal information state missing");
              }
              entry.info_index[p] = it->second;
              if (belief.indicators[p][it->second] == 0) w = 0.0;
            }
            if (w <= 0.0) return;
            entry.probability = w;
            total += w;
            entries.push_back(std::move(entry));
          });
    }
  }
  if (entries.empty() || total <= 0.0) {
    throw std::runtime_error("belief has empty support");
  }
  for (auto& entry : entries) entry.probability /= total;
  return entries;
}

double ExpectedReward(const GameTree& tree, const PublicBelief& belief,
                      const PrescriptionVector& prescription) {
  StepOutcome step = ExpandStep(tree, belief, prescription);
  return step.expected_reward;
}

std::vector<std::pair<ObsId, double>> ObservationDistribution(
    const GameTree& tree, const PublicBelief& belief,
    const PrescriptionVector& prescription) {
  StepOutcome step = ExpandStep(tree, belief, prescription);
  std::vector<std::pair<ObsId, double>> dist;
  dist.reserve(step.observations.size());
  for (size_t i = 0; i < step.observations.size(); ++i) {
    dist.emplace_back(step.observations[i], step.probabilities[i]);
  }
  return dist;
}

PublicBelief NextBelief(const GameTree& tree, const PublicBelief& belief,
                        const PrescriptionVector& prescription, ObsId obs) {
  StepOutcome step = ExpandStep(tree, belief, prescription);
  for (size_t i = 0; i < step.observations.size(); ++i) {
    if (step.observations[i] == obs) return std::move(step.next_beliefs[i]);
  }
  throw std::runtime_error("observation has zero probability");
}

PrescriptionSpace::PrescriptionSpace(const GameTree& tree,
                                     const PublicBelief& belief,
                                     bool support_only) {
  CheckBeliefShape(tree, belief);
  const PublicState& ps = tree.public_state(belief.public_state);
  if (ps.terminal) {
    throw std::runtime_error("prescriptions undefined at a terminal belief");
  }
  radix_.resize(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    radix_[p].resize(ps.info_states[p].size());
    for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
      const InfoState& is = tree.info_state(p, ps.info_states[p][r]);
      const bool frozen = support_only && belief.indicators[p][r] == 0;
      const int choices = frozen ? 1 : static_cast<int>(is.legal.size());
      radix_[p][r] = choices;
      const uint64_t next = count_ * static_cast<uint64_t>(choices);
      if (choices != 0 && next / choices != count_) {
        overflowed_ = true;
        count_ = ~uint64_t{0};
      } else if (!overflowed_) {
        count_ = next;
      }
    }
  }
}

PrescriptionVector PrescriptionSpace::Decode(uint64_t index) const {
  if (!overflowed_ && index >= count_) {
    throw std::runtime_error("prescription index out of range");
  }
  PrescriptionVector v;
  v.actions.resize(radix_.size());
  for (size_t p = 0; p < radix_.size(); ++p) {
    v.actions[p].resize(radix_[p].size());
  }
  for (size_t p = radix_.size(); p-- > 0;) {
    for (size_t r = radix_[p].size(); r-- > 0;) {
      v.actions[p][r] = static_cast<int>(index % radix_[p][r]);
      index /= radix_[p][r];
    }
  }
  return v;
}

uint64_t PrescriptionSpace::Encode(const PrescriptionVector& v) const {
  uint64_t index = 0;
  for (size_t p = 0; p < radix_.size(); ++p) {
    for (size_t r = 0; r < radix_[p].size(); ++r) {
      index = index * radix_[p][r] + static_cast<uint64_t>(v.actions[p][r]);
    }
  }
  return index;
}

PrescriptionVector PrescriptionSpace::Sample(RandomStream* rng) const {
  PrescriptionVector v;
  v.actions.resize(radix_.size());
  for (size_t p = 0; p < radix_.size(); ++p) {
    v.actions[p].resize(radix_[p].size());
    for (size_t r = 0; r < radix_[p].size(); ++r) {
      v.actions[p][r] = rng->UniformInt(radix_[p][r]);
    }
  }
  return v;
}

std::vector<PrescriptionVector> EnumeratePrescriptionVectors(
    const GameTree& tree, const PublicBelief& belief, uint64_t cap) {
  PrescriptionSpace space(tree, belief, /*support_only=*/false);
  if (space.Overflowed() || space.Count() > cap) {
    throw std::runtime_error("prescription enumeration exceeds cap");
  }
  std::vector<PrescriptionVector> all;
  all.reserve(space.Count());
  for (uint64_t i = 0; i < space.Count(); ++i) all.push_back(space.Decode(i));
  return all;
}

StepOutcome ExpandStep(const GameTree& tree, const PublicBelief& belief,
                       const PrescriptionVector& prescription,
                       bool skip_terminal_next) {
  CheckBeliefShape(tree, belief);
  CheckPrescriptionShape(tree, belief, prescription);
  const PublicState& ps = tree.public_state(belief.public_state);
  if (ps.terminal) {
    throw std::runtime_error("cannot expand a terminal belief");
  }
  const int players = tree.num_players();

  struct ObsBucket {
    double probability = 0.0;
    int child_public = -1;
  };
  std::map<ObsId, ObsBucket> buckets;

  double total_weight = 0.0;
  double total_reward = 0.0;
  JointAction action(players);
  std::vector<TransitionOutcome> outcomes;
  for (int stub_id : ps.stubs) {
    const HistoryNode& stub = tree.node(stub_id);
    const double w = StubWeight(belief, stub);
    if (w <= 0.0) continue;
    total_weight += w;
    for (int p = 0; p < players; ++p) {
      const InfoState& is =
          tree.info_state(p, ps.info_states[p][stub.info_state_index[p]]);
      action[p] = is.legal[prescription.actions[p][stub.info_state_index[p]]];
    }
    outcomes.clear();
    tree.game().AppendTransitions(stub.world, action, &outcomes);
    for (const auto& outcome : outcomes) {
      const double mass = w * outcome.probability;
      total_reward += mass * outcome.reward;
      ObsBucket& bucket = buckets[outcome.public_obs];
      bucket.probability += mass;
      if (bucket.child_public == -1) {
        bucket.child_public =
            tree.ChildPublicState(belief.public_state, outcome.public_obs);
        if (bucket.child_public == -1) {
          throw std::runtime_error("observation missing a child public state");
        }
      }
    }
  }
  if (total_weight <= 0.0) {
    throw std::runtime_error("belief has empty support");
  }

  StepOutcome step;
  step.expected_reward = total_reward / total_weight;
  for (auto& [obs, bucket] : buckets) {
    const PublicState& child = tree.public_state(bucket.child_public);
    PublicBelief next;
    next.public_state = bucket.child_public;
    if (!(child.terminal && skip_terminal_next)) {
      next.indicators.resize(players);
      for (int p = 0; p < players; ++p) {
        next.indicators[p].assign(child.info_states[p].size(), 0);
        for (size_t r = 0; r < child.info_states[p].size(); ++r) {
          const InfoState& child_is =
              tree.info_state(p, child.info_states[p][r]);
          const int parent_row = child_is.parent_index_in_public;
          if (belief.indicators[p][parent_row] == 0) continue;
          const InfoState& parent_is =
              tree.info_state(p, ps.info_states[p][parent_row]);
          if (parent_is.legal[prescription.actions[p][parent_row]] ==
              child_is.last_action) {
            next.indicators[p][r] = 1;
          }
        }
      }
    }
    step.observations.push_back(obs);
    step.probabilities.push_back(bucket.probability / total_weight);
    step.next_beliefs.push_back(std::move(next));
    step.next_terminal.push_back(child.terminal);
  }
  return step;
}

}  // namespace pubmdp
