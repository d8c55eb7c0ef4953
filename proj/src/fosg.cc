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

#include "pubmdp/fosg.h"

#include <cmath>
#include <limits>
#include <utility>

namespace pubmdp {

constexpr double kDistributionTolerance = 1e-12;

MixedRadixIndexer::MixedRadixIndexer(std::vector<int> sizes)
    : sizes_(std::move(sizes)) {
  for (int s : sizes_) {
    if (s <= 0) throw GameDefinitionError("mixed-radix slot with no choices");
    if (count_ > std::numeric_limits<uint64_t>::max() / s) {
      overflowed_ = true;
      count_ = std::numeric_limits<uint64_t>::max();
      return;
    }
    count_ *= s;
  }
}

void MixedRadixIndexer::Decode(uint64_t index, std::vector<int>* digits) const {
  digits->assign(sizes_.size(), 0);
  for (int i = static_cast<int>(sizes_.size()) - 1; i >= 0; --i) {
    (*digits)[i] = static_cast<int>(index % sizes_[i]);
    index /= sizes_[i];
  }
}

uint64_t MixedRadixIndexer::Encode(const std::vector<int>& digits) const {
  uint64_t index = 0;
  for (size_t i = 0; i < sizes_.size(); ++i) {
    index = index * sizes_[i] + digits[i];
  }
  return index;
}

class ExplicitGame : public FiniteGame {
 public:
  explicit ExplicitGame(ExplicitGameBuilder b) : b_(std::move(b)) {}

  std::string name() const override { return b_.name_; }
  int num_players() const override { return b_.num_players_; }
  int num_worlds() const override {
    return static_cast<int>(b_.worlds_.size());
  }
  int horizon() const override { return b_.horizon_; }
  bool IsTerminal(WorldId world) const override {
    return b_.worlds_[world].terminal;
  }
  const std::vector<InitialOutcome>& initial_outcomes() const override {
    return b_.initial_;
  }
  const std::vector<ActionId>& LegalActions(WorldId world,
                                            int player) const override {
    return b_.worlds_[world].legal[player];
  }
  void AppendTransitions(WorldId world, const JointAction& action,
                         std::vector<TransitionOutcome>* out) const override {
    const auto& entry = b_.worlds_[world];
    std::vector<int> digits(b_.num_players_);
    for (int p = 0; p < b_.num_players_; ++p) {
      const auto& legal = entry.legal[p];
      int pos = -1;
      for (size_t i = 0; i < legal.size(); ++i) {
        if (legal[i] == action[p]) pos = static_cast<int>(i);
      }
      if (pos < 0) throw GameDefinitionError("illegal action in transition query");
      digits[p] = pos;
    }
    std::vector<int> sizes(b_.num_players_);
    for (int p = 0; p < b_.num_players_; ++p) {
      sizes[p] = static_cast<int>(entry.legal[p].size());
    }
    MixedRadixIndexer indexer(sizes);
    const auto& outcomes = entry.transitions[indexer.Encode(digits)];
    out->insert(out->end(), outcomes.begin(), outcomes.end());
  }

  int num_actions(int player) const override {
    return static_cast<int>(b_.action_names_[player].size());
  }
  int num_public_obs() const override {
    return static_cast<int>(b_.public_obs_names_.size());
  }
  int num_private_obs(int player) const override {
    return static_cast<int>(b_.private_obs_names_[player].size());
  }
  std::string world_name(WorldId world) const override {
    return b_.worlds_[world].world_name;
  }
  std::string action_name(int player, ActionId action) const override {
    return b_.action_names_[player][action];
  }
  std::string public_obs_name(ObsId obs) const override {
    return b_.public_obs_names_[obs];
  }
  std::string private_obs_name(int player, ObsId obs) const override {
    return b_.private_obs_names_[player][obs];
  }

 private:
  ExplicitGameBuilder b_;
};

ExplicitGameBuilder::ExplicitGameBuilder(std::string name, int num_players,
                                         int horizon)
    : name_(std::move(name)), num_players_(num_players), horizon_(horizon) {
  if (num_players <= 0) throw GameDefinitionError("need at least one player");
  if (horizon <= 0) throw GameDefinitionError("horizon must be positive");
  private_obs_names_.resize(num_players);
  action_names_.resize(num_players);
}

ObsId ExplicitGameBuilder::AddPublicObs(std::string obsname) {
  public_obs_names_.push_back(std::move(obsname));
  return static_cast<ObsId>(public_obs_names_.size()) - 1;
}

ObsId ExplicitGameBuilder::AddPrivateObs(int player, std::string obsname) {
  private_obs_names_[player].push_back(std::move(obsname));
  return static_cast<ObsId>(private_obs_names_[player].size()) - 1;
}

ActionId ExplicitGameBuilder::AddAction(int player, std::string action_name) {
  action_names_[player].push_back(std::move(action_name));
  return static_cast<ActionId>(action_names_[player].size()) - 1;
}

WorldId ExplicitGameBuilder::AddWorld(std::string world_name, bool terminal) {
  WorldEntry entry;
  entry.world_name = std::move(world_name);
  entry.terminal = terminal;
  entry.legal.resize(num_players_);
  worlds_.push_back(std::move(entry));
  return static_cast<WorldId>(worlds_.size()) - 1;
}

void ExplicitGameBuilder::AddInitialOutcome(WorldId world, double probability,
                                            ObsId public_obs,
                                            std::vector<ObsId> private_obs) {
  InitialOutcome outcome;
  outcome.world = world;
  outcome.probability = probability;
  outcome.public_obs = public_obs;
  outcome.private_obs = std::move(private_obs);
  initial_.push_back(std::move(outcome));
}

void ExplicitGameBuilder::SetLegalActions(WorldId world, int player,
                                          std::vector<ActionId> legal) {
  worlds_.at(world).legal.at(player) = std::move(legal);
}

void ExplicitGameBuilder::AddTransition(WorldId world, JointAction action,
                                        std::vector<TransitionOutcome> outcomes) {
  auto& entry = worlds_.at(world);
  std::vector<int> sizes(num_players_);
  std::vector<int> digits(num_players_);
  for (int p = 0; p < num_players_; ++p) {
    const auto& legal = entry.legal[p];
    if (legal.empty()) {
      throw GameDefinitionError("set legal actions before transitions");
    }
    sizes[p] = static_cast<int>(legal.size());
    int pos = -1;
    for (size_t i = 0; i < legal.size(); ++i) {
      if (legal[i] == action[p]) pos = static_cast<int>(i);
    }
    if (pos < 0) throw GameDefinitionError("transition for illegal action");
    digits[p] = pos;
  }
  MixedRadixIndexer indexer(sizes);
  if (entry.transitions.empty()) {
    entry.transitions.resize(indexer.count());
  }
  entry.transitions[indexer.Encode(digits)] = std::move(outcomes);
}

std::shared_ptr<const FiniteGame> ExplicitGameBuilder::Build() {
  if (built_) throw GameDefinitionError("builder already consumed");
  built_ = true;
  if (initial_.empty()) {
    throw GameDefinitionError("game has no initial outcomes");
  }
  double initial_mass = 0.0;
  const ObsId root_obs = initial_.front().public_obs;
  for (const auto& outcome : initial_) {
    if (outcome.world < 0 || outcome.world >= static_cast<int>(worlds_.size())) {
      throw GameDefinitionError("initial outcome references unknown world");
    }
    if (worlds_[outcome.world].terminal) {
      throw GameDefinitionError("initial outcome must be nonterminal");
    }
    if (outcome.public_obs != root_obs) {
      throw GameDefinitionError(
          "initial outcomes must share one public observation");
    }
    if (static_cast<int>(outcome.private_obs.size()) != num_players_) {
      throw GameDefinitionError("initial outcome private observation arity");
    }
    if (outcome.probability <= 0.0) {
      throw GameDefinitionError("initial outcome with nonpositive probability");
    }
    initial_mass += outcome.probability;
  }
  if (std::abs(initial_mass - 1.0) > kDistributionTolerance) {
    throw GameDefinitionError("initial distribution does not sum to one");
  }
  for (size_t w = 0; w < worlds_.size(); ++w) {
    auto& entry = worlds_[w];
    if (entry.terminal) {
      if (!entry.transitions.empty()) {
        throw GameDefinitionError("terminal world has transitions");
      }
      continue;
    }
    std::vector<int> sizes(num_players_);
    for (int p = 0; p < num_players_; ++p) {
      auto& legal = entry.legal[p];
      if (legal.empty()) {
        throw GameDefinitionError("nonterminal world missing legal actions: " +
                                  entry.world_name);
      }
      for (size_t i = 0; i < legal.size(); ++i) {
        if (legal[i] < 0 ||
            legal[i] >= static_cast<int>(action_names_[p].size())) {
          throw GameDefinitionError("legal action out of range");
        }
        if (i > 0 && legal[i] <= legal[i - 1]) {
          throw GameDefinitionError("legal actions must be strictly increasing");
        }
      }
      sizes[p] = static_cast<int>(legal.size());
    }
    MixedRadixIndexer indexer(sizes);
    if (entry.transitions.size() != indexer.count()) {
      throw GameDefinitionError("world is missing joint-action transitions: " +
                                entry.world_name);
    }
    for (const auto& outcomes : entry.transitions) {
      if (outcomes.empty()) {
        throw GameDefinitionError("joint action without outcomes in " +
                                  entry.world_name);
      }
      double mass = 0.0;
      for (const auto& outcome : outcomes) {
        if (outcome.probability <= 0.0) {
          throw GameDefinitionError("outcome with nonpositive probability");
        }
        if (outcome.next_world < 0 ||
            outcome.next_world >= static_cast<int>(worlds_.size())) {
          throw GameDefinitionError("outcome references unknown world");
        }
        if (outcome.public_obs < 0 ||
            outcome.public_obs >= static_cast<int>(public_obs_names_.size())) {
          throw GameDefinitionError("public observation out of range");
        }
        if (static_cast<int>(outcome.private_obs.size()) != num_players_) {
          throw GameDefinitionError("outcome private observation arity");
        }
        for (int p = 0; p < num_players_; ++p) {
          if (outcome.private_obs[p] < 0 ||
              outcome.private_obs[p] >=
                  static_cast<int>(private_obs_names_[p].size())) {
            throw GameDefinitionError("private observation out of range");
          }
        }
        mass += outcome.probability;
      }
      if (std::abs(mass - 1.0) > kDistributionTolerance) {
        throw GameDefinitionError("transition distribution does not sum to one");
      }
    }
  }
  return std::make_shared<ExplicitGame>(std::move(*this));
}

}  // namespace pubmdp
