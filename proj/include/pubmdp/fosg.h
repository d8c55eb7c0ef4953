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

#ifndef PUBMDP_FOSG_H_
#define PUBMDP_FOSG_H_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pubmdp {

// Finite common-payoff games with factored observations.
//
// A game is a finite set of world states with a chance distribution over
// initial worlds, per-player legal action sets at every nonterminal world,
// and a stochastic transition function. Every transition emits one shared
// reward, one public observation (seen by everyone), and one private
// observation per player. A player's information state is the sequence of
// its own observations and actions; the public state is the sequence of
// public observations. Turn-based play is encoded by giving every
// non-acting player exactly one no-op legal action, so all solvers handle
// simultaneous and sequential steps through a single code path.
//
// Observations are small integer codes. Each game carries decode tables
// that map codes and ids back to human-readable names; solver code never
// inspects the names.

using WorldId = int;
using ActionId = int;
using ObsId = int;
using JointAction = std::vector<ActionId>;

// Raised when a configuration or game description is rejected.
class GameDefinitionError : public std::runtime_error {
 public:
  explicit GameDefinitionError(const std::string& what)
      : std::runtime_error(what) {}
};

// One chance outcome of the initial draw. The public observation must be
// identical across all initial outcomes; private observations may differ
// (this is how card deals reach the players).
struct InitialOutcome {
  WorldId world = 0;
  double probability = 0.0;
  ObsId public_obs = 0;
  std::vector<ObsId> private_obs;
};

// One chance outcome of a world transition under a joint action.
struct TransitionOutcome {
  WorldId next_world = 0;
  double probability = 0.0;
  double reward = 0.0;
  ObsId public_obs = 0;
  std::vector<ObsId> private_obs;
};

class FiniteGame {
 public:
  virtual ~FiniteGame() = default;

  virtual std::string name() const = 0;
  virtual int num_players() const = 0;
  virtual int num_worlds() const = 0;
  // Upper bound on the number of joint actions in any play.
  virtual int horizon() const = 0;
  virtual bool IsTerminal(WorldId world) const = 0;
  virtual const std::vector<InitialOutcome>& initial_outcomes() const = 0;
  virtual const std::vector<ActionId>& LegalActions(WorldId world,
                                                    int player) const = 0;
  // Appends the chance outcomes of playing `action` at `world`. The
  // probabilities of the appended outcomes sum to one.
  virtual void AppendTransitions(WorldId world, const JointAction& action,
                                 std::vector<TransitionOutcome>* out) const = 0;

  // Decode tables.
  virtual int num_actions(int player) const = 0;
  virtual int num_public_obs() const = 0;
  virtual int num_private_obs(int player) const = 0;
  virtual std::string world_name(WorldId world) const = 0;
  virtual std::string action_name(int player, ActionId action) const = 0;
  virtual std::string public_obs_name(ObsId obs) const = 0;
  virtual std::string private_obs_name(int player, ObsId obs) const = 0;
};

// Table-backed game assembled through ExplicitGameBuilder. Used by the
// synthetic games in tests; the shipped games compute transitions on demand
// instead of storing them.
class ExplicitGame;

class ExplicitGameBuilder {
 public:
  ExplicitGameBuilder(std::string name, int num_players, int horizon);

  // Vocabulary registration. Codes are assigned in call order from zero.
  ObsId AddPublicObs(std::string obsname);
  ObsId AddPrivateObs(int player, std::string obsname);
  ActionId AddAction(int player, std::string action_name);
  WorldId AddWorld(std::string world_name, bool terminal);

  void AddInitialOutcome(WorldId world, double probability, ObsId public_obs,
                         std::vector<ObsId> private_obs);
  void SetLegalActions(WorldId world, int player, std::vector<ActionId> legal);
  void AddTransition(WorldId world, JointAction action,
                     std::vector<TransitionOutcome> outcomes);

  // Validates the description and produces the game. Throws
  // GameDefinitionError on inconsistent input (distributions that do not sum
  // to one, missing transitions, out-of-range codes, ...).
  std::shared_ptr<const FiniteGame> Build();

 private:
  friend class ExplicitGame;
  struct WorldEntry {
    std::string world_name;
    bool terminal = false;
    std::vector<std::vector<ActionId>> legal;  // per player
    // Transitions keyed by the mixed-radix index of the joint action over
    // the per-player legal lists.
    std::vector<std::vector<TransitionOutcome>> transitions;
  };

  std::string name_;
  int num_players_ = 0;
  int horizon_ = 0;
  std::vector<std::string> public_obs_names_;
  std::vector<std::vector<std::string>> private_obs_names_;  // per player
  std::vector<std::vector<std::string>> action_names_;       // per player
  std::vector<WorldEntry> worlds_;
  std::vector<InitialOutcome> initial_;
  bool built_ = false;
};

// Mixed-radix indexer over one action choice per slot. Slot i ranges over
// sizes[i] alternatives; index 0 is all-first-choice and the last slot
// varies fastest, so enumeration order is lexicographic in the slot vector.
class MixedRadixIndexer {
 public:
  explicit MixedRadixIndexer(std::vector<int> sizes);

  uint64_t count() const { return count_; }
  bool overflowed() const { return overflowed_; }
  int num_slots() const { return static_cast<int>(sizes_.size()); }
  int size(int slot) const { return sizes_[slot]; }

  void Decode(uint64_t index, std::vector<int>* digits) const;
  uint64_t Encode(const std::vector<int>& digits) const;

 private:
  std::vector<int> sizes_;
  uint64_t count_ = 1;
  bool overflowed_ = false;
};

// Behavioral joint policy: one probability row per (player, information
// state id), aligned with the information-state tables of a GameTree. Rows
// are distributions over the information state's legal actions, in legal-
// list order.
struct JointPolicy {
  // rows[player][info_state_id] has one entry per legal action.
  std::vector<std::vector<std::vector<double>>> rows;
};

inline double Sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace pubmdp

#endif  // PUBMDP_FOSG_H_
