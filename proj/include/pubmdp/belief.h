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

#ifndef PUBMDP_BELIEF_H_
#define PUBMDP_BELIEF_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pubmdp/game_tree.h"
#include "pubmdp/rng.h"

namespace pubmdp {

// Coordinator-side state: a public state plus, for each player, a binary
// indicator over that public state's information states marking the ones
// consistent with every prescription issued so far.
struct PublicBelief {
  int public_state = -1;
  std::vector<std::vector<uint8_t>> indicators;  // per player, 0/1 entries

  bool operator==(const PublicBelief& other) const {
    return public_state == other.public_state &&
           indicators == other.indicators;
  }
};

// One action per (player, information state) at a fixed public state. Entries
// are indices into each information state's legal-action list, stored row by
// row in the public state's canonical information-state order.
struct PrescriptionVector {
  std::vector<std::vector<int>> actions;  // [player][row] -> legal index

  bool operator==(const PrescriptionVector& other) const {
    return actions == other.actions;
  }
};

// Canonical byte serialization: each public observation code as unsigned
// 16-bit big-endian, then each player's indicator bits MSB-first padded to a
// byte boundary.
std::string BeliefKeyBytes(const GameTree& tree, const PublicBelief& belief);

PublicBelief InitialBelief(const GameTree& tree);

bool IsTerminalBelief(const GameTree& tree, const PublicBelief& belief);

// One positive-probability history of the belief's public state. Histories at
// nonterminal public states reference a tree node; histories at terminal
// public states are identified by their final transition's coordinates.
struct BeliefSupportEntry {
  int node = -1;             // nonterminal history id, or -1
  int stub = -1;             // parent node id for terminal histories, or -1
  uint64_t joint_index = 0;  // with outcome_index: the final transition
  int outcome_index = -1;
  WorldId world = -1;
  std::vector<int> info_index;  // per player, index within S_i(s)
  double probability = 0.0;
};

// Exact posterior over the public state's histories given the belief:
// proportional to chance reach on histories whose every player indicator is
// 1, and zero elsewhere. Throws std::runtime_error on empty support.
std::vector<BeliefSupportEntry> ReconstructHistoryDistribution(
    const GameTree& tree, const PublicBelief& belief);

// Exact expected one-step reward under the reconstructed history
// distribution and the joint action each history's information states
// receive from the prescription.
double ExpectedReward(const GameTree& tree, const PublicBelief& belief,
                      const PrescriptionVector& prescription);

// Marginal distribution of the next public observation, sorted by
// observation code; entries all positive and summing to 1.
std::vector<std::pair<ObsId, double>> ObservationDistribution(
    const GameTree& tree, const PublicBelief& belief,
    const PrescriptionVector& prescription);

// Belief after issuing the prescription and observing `obs`. Each player's
// new indicator keeps exactly the information states whose recorded own
// action matches the prescription at their parent. Throws std::runtime_error
// when `obs` has zero probability.
PublicBelief NextBelief(const GameTree& tree, const PublicBelief& belief,
                        const PrescriptionVector& prescription, ObsId obs);

// The prescription domain at one belief: per (player, row) slots with their
// legal-action counts, in canonical row order, covering every information
// state of the public state. When `support_only` is set, rows whose
// indicator is 0 are frozen to legal index 0, which never changes rewards,
// observation probabilities, or reachable next beliefs.
class PrescriptionSpace {
 public:
  PrescriptionSpace(const GameTree& tree, const PublicBelief& belief,
                    bool support_only);

  // Saturates at 2^64 - 1.
  uint64_t Count() const { return count_; }
  bool Overflowed() const { return overflowed_; }

  PrescriptionVector Decode(uint64_t index) const;
  uint64_t Encode(const PrescriptionVector& prescription) const;
  PrescriptionVector Sample(RandomStream* rng) const;

  int num_players() const { return static_cast<int>(radix_.size()); }
  const std::vector<std::vector<int>>& radixes() const { return radix_; }

 private:
  std::vector<std::vector<int>> radix_;  // [player][row] -> choice count
  uint64_t count_ = 1;
  bool overflowed_ = false;
};

// Complete duplicate-free enumeration in lexicographic order (player-major,
// row-major, last row varying fastest). Throws std::runtime_error when the
// count exceeds `cap`.
std::vector<PrescriptionVector> EnumeratePrescriptionVectors(
    const GameTree& tree, const PublicBelief& belief,
    uint64_t cap = 1'000'000);

// Everything CAPI and the exact solvers need about one (belief, prescription)
// step, computed in a single pass over the belief support: expected reward,
// positive-probability observations with their probabilities, and the
// corresponding next beliefs. With `skip_terminal_next`, next beliefs at
// terminal public states carry only the public state id and no indicators;
// their value is 0 by definition, so callers on hot paths avoid building
// large terminal indicator vectors.
struct StepOutcome {
  double expected_reward = 0.0;
  std::vector<ObsId> observations;
  std::vector<double> probabilities;
  std::vector<PublicBelief> next_beliefs;
  std::vector<bool> next_terminal;
};

StepOutcome ExpandStep(const GameTree& tree, const PublicBelief& belief,
                       const PrescriptionVector& prescription,
                       bool skip_terminal_next = false);

}  // namespace pubmdp

#endif  // PUBMDP_BELIEF_H_
