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

#ifndef PUBMDP_CAPI_H_
#define PUBMDP_CAPI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "pubmdp/belief.h"
#include "pubmdp/exact.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/net.h"
#include "pubmdp/rng.h"

namespace pubmdp {

// Probability rows over each (player, information state) pair's legal
// actions at one public state, in canonical row order.
using PolicyRows = std::vector<std::vector<std::vector<double>>>;

// One training target: the belief where a decision was made, the
// best-assessed prescription vector there, and its assessed value.
struct BufferEntry {
  PublicBelief belief;
  PrescriptionVector prescription;
  double value = 0.0;
};

// Per-belief policy rows, value estimates, and a buffered training step.
// The search layer is backend-agnostic; backends are a per-public-state
// table, a two-headed network over the belief encoding, and a fixed
// injected value function for isolating the search from learning.
class CapiModel {
 public:
  virtual ~CapiModel() = default;

  // Probability rows at the belief's public state. Rows are well formed for
  // every information state there, including ruled-out ones.
  virtual PolicyRows Policy(const PublicBelief& belief) = 0;

  // Estimated optimal value; exactly 0 for terminal beliefs.
  virtual double Value(const PublicBelief& belief) = 0;

  // One step toward the buffer's targets. Returns the backend's training
  // loss; callers abort the run when it is not finite.
  virtual double Train(const std::vector<BufferEntry>& buffer) = 0;

  virtual void Save(std::ostream& out) const = 0;
  virtual void Load(std::istream& in) = 0;
};

struct TabularCapiConfig {
  double value_learning_rate = 1.0;
  double policy_learning_rate = 1.0;
  // Lower bound kept on every row probability after training; must be less
  // than 1/|row| for every row.
  double policy_floor = 0.0;
  double default_value = 0.0;  // for beliefs never trained on
};

// Value table keyed by belief, policy table keyed by public state (shared
// across beliefs with the same public observations).
class TabularCapiModel : public CapiModel {
 public:
  TabularCapiModel(const GameTree& tree, const TabularCapiConfig& config);

  PolicyRows Policy(const PublicBelief& belief) override;
  double Value(const PublicBelief& belief) override;
  double Train(const std::vector<BufferEntry>& buffer) override;
  void Save(std::ostream& out) const override;
  void Load(std::istream& in) override;

 private:
  const PolicyRows& RowsFor(int public_state);

  const GameTree& tree_;
  TabularCapiConfig config_;
  std::unordered_map<std::string, double> values_;
  std::vector<PolicyRows> policy_;  // per public state; empty until touched
};

struct NeuralCapiConfig {
  int hidden_layers = 3;
  int hidden_units = 256;
  double learning_rate = 1e-4;
  double policy_loss_weight = 0.01;
  // Bounded value output lo + (hi - lo) * sigmoid(raw); off by default.
  bool squash_value = false;
  double value_low = 0.0;
  double value_high = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

// Shared trunk over the fixed-length belief encoding with a value head and
// a policy head of one masked softmax row per (player, information-state
// slot) over that player's global action ids.
class NeuralCapiModel : public CapiModel {
 public:
  NeuralCapiModel(const GameTree& tree, const NeuralCapiConfig& config,
                  RandomStream* rng);

  PolicyRows Policy(const PublicBelief& belief) override;
  double Value(const PublicBelief& belief) override;
  double Train(const std::vector<BufferEntry>& buffer) override;
  void Save(std::ostream& out) const override;
  void Load(std::istream& in) override;

  // Loss and gradient access for finite-difference verification.
  double BatchLoss(const std::vector<BufferEntry>& buffer);
  // Computes the loss and leaves its parameter gradient in net().gradient().
  double BatchLossAndGradient(const std::vector<BufferEntry>& buffer);
  TwoHeadMlp& net() { return net_; }
  const BeliefEncoder& encoder() const { return encoder_; }

 private:
  int LogitBase(int player, int row) const {
    return player_logit_base_[player] + row * num_actions_[player];
  }
  double SquashValue(double raw) const;
  PolicyRows RowsFromLogits(const Eigen::VectorXd& logits,
                            const PublicState& ps) const;

  const GameTree& tree_;
  NeuralCapiConfig config_;
  BeliefEncoder encoder_;
  std::vector<int> num_actions_;        // per player
  std::vector<int> player_logit_base_;  // per player
  TwoHeadMlp net_;
};

// Fixed value function (keyed by BeliefKeyBytes) with uniform policy rows
// and no-op training. Lookups of beliefs missing from the table throw.
class InjectedValueModel : public CapiModel {
 public:
  InjectedValueModel(const GameTree& tree,
                     std::unordered_map<std::string, double> values);

  PolicyRows Policy(const PublicBelief& belief) override;
  double Value(const PublicBelief& belief) override;
  double Train(const std::vector<BufferEntry>& buffer) override;
  void Save(std::ostream& out) const override;
  void Load(std::istream& in) override;

 private:
  const GameTree& tree_;
  std::unordered_map<std::string, double> values_;
};

enum class AcquisitionMode { kSample, kMostLikely, kEnumerateAll };
enum class ExplorationMode { kEpsilonGreedy, kOncePerEpisode, kNone };

struct CapiConfig {
  int rollouts = 1;  // K: prescription vectors acquired per decision
  AcquisitionMode acquisition = AcquisitionMode::kSample;
  ExplorationMode exploration = ExplorationMode::kEpsilonGreedy;
  double epsilon = 0.1;
  // When exploring, uniformize one random policy row before acquisition
  // instead of executing a random assessed vector.
  bool structured_rows = false;
  uint64_t enumerate_cap = 1'000'000;
  int64_t max_episode_decisions = 1'000'000;
};

// Probability of a prescription vector under the product of policy rows,
// multiplied in canonical row order.
double PrescriptionProbability(const PolicyRows& rows,
                               const PrescriptionVector& prescription);

// Distinct prescription vectors to assess at one decision. kSample draws k
// vectors from the row product and deduplicates (first occurrence kept);
// kMostLikely returns the k most probable vectors by best-first frontier
// expansion (full count when k exceeds it), ordered by descending
// probability with lexicographic tie order; kEnumerateAll returns the full
// product space in prescription index order, throwing past `enumerate_cap`.
std::vector<PrescriptionVector> AcquirePrescriptionVectors(
    const PolicyRows& rows, int k, AcquisitionMode mode, RandomStream* rng,
    uint64_t enumerate_cap = 1'000'000);

struct AssessResult {
  double q = 0.0;
  // Expansion of the assessed prescription with terminal successor beliefs
  // left unmaterialized; reused to step the episode forward.
  StepOutcome step;
};

// One-ply lookahead: expected reward plus the probability-weighted model
// value of each successor belief (terminal successors contribute 0).
AssessResult Assess(const GameTree& tree, const PublicBelief& belief,
                    const PrescriptionVector& prescription, CapiModel* model);

struct ActResult {
  std::vector<PrescriptionVector> assessed;
  std::vector<double> q;  // aligned with `assessed`
  int argmax_index = 0;   // first occurrence of the maximal q
  int executed_index = 0;
  bool explored = false;
  BufferEntry entry;         // always records the argmax target
  StepOutcome executed_step;
};

// Acquires, assesses, picks the executed vector. With `explore` set, either
// one policy row was uniformized before acquisition (structured mode) or
// the executed vector is a uniform draw from the assessed list.
ActResult Act(const GameTree& tree, const PublicBelief& belief,
              CapiModel* model, const CapiConfig& config, bool explore,
              RandomStream* rng);

struct EpisodeResult {
  std::vector<BufferEntry> entries;  // one per decision, preorder
  int64_t decisions = 0;
};

// Full public-tree episode: depth-first from the initial belief, one Act
// per nonterminal belief, recursing into every positive-probability public
// observation of the executed prescription.
EpisodeResult RunEpisode(const GameTree& tree, CapiModel* model,
                         const CapiConfig& config, RandomStream* rng);

struct GreedyTraversal {
  JointPolicy policy;
  // Assessed rewards rolled up along the traversal; equals the exact return
  // of `policy` up to floating-point association.
  double backed_up_value = 0.0;
};

// Exploration-free traversal writing each reachable belief's argmax
// prescription into a deterministic joint policy. Information states never
// reached keep their first legal action.
GreedyTraversal GreedyJointPolicy(const GameTree& tree, CapiModel* model,
                                  const CapiConfig& config, RandomStream* rng);

struct CapiRunOptions {
  int64_t episodes = 1000;
  // Exact greedy evaluation cadence for the curve; forced to every episode
  // when an episode log is written.
  int64_t eval_every = 1;
  CapiConfig config;
  // Optional per-episode CSV (episode,greedy_return,buffer_size,wall_ms).
  std::string episode_log_path;
};

struct CapiRunResult {
  std::vector<CurvePoint> curve;
  double final_greedy_value = 0.0;
  double best_greedy_value = 0.0;
  JointPolicy final_greedy_policy;
};

// Training loop: episode, train on its buffer, wipe, evaluate on cadence.
// Throws when a training loss is not finite.
CapiRunResult RunCapiTraining(const GameTree& tree, CapiModel* model,
                              const CapiRunOptions& options,
                              RandomStream* rng);

}  // namespace pubmdp

#endif  // PUBMDP_CAPI_H_
