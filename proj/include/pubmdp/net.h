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

#ifndef PUBMDP_NET_H_
#define PUBMDP_NET_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "pubmdp/belief.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/rng.h"

namespace pubmdp {

// Fixed-length {0,1} encoding of a nonterminal public belief: the public
// observation sequence as one-hot slots padded to the deepest nonterminal
// public state, followed by each player's indicator bits padded to the
// widest nonterminal information-state set.
class BeliefEncoder {
 public:
  explicit BeliefEncoder(const GameTree& tree);

  int input_size() const { return input_size_; }
  Eigen::VectorXd Encode(const PublicBelief& belief) const;

 private:
  const GameTree& tree_;
  int path_slots_ = 0;
  int num_public_obs_ = 0;
  std::vector<int> indicator_offset_;  // per player
  int input_size_ = 0;
};

struct MlpConfig {
  int input_size = 0;
  int logits_size = 0;
  int hidden_layers = 3;
  int hidden_units = 256;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

// Fully connected ReLU trunk with a scalar head and a logits head, trained
// with Adam. Parameters live in one flat vector so checkpointing and
// finite-difference checks operate on a single array.
class TwoHeadMlp {
 public:
  TwoHeadMlp(const MlpConfig& config, RandomStream* rng);

  struct Activation {
    Eigen::VectorXd input;
    std::vector<Eigen::VectorXd> hidden;  // post-ReLU, one per layer
    double value_raw = 0.0;
    Eigen::VectorXd logits;
  };

  void Forward(const Eigen::VectorXd& input, Activation* act) const;

  // Gradient accumulation: StartBatch, then Backward once per example with
  // the loss gradients at the two heads, then AdamStep to apply the update.
  void StartBatch();
  void Backward(const Activation& act, double dvalue_raw,
                const Eigen::VectorXd& dlogits);
  void AdamStep();

  const MlpConfig& config() const { return config_; }
  int64_t num_parameters() const { return params_.size(); }
  const Eigen::VectorXd& parameters() const { return params_; }
  void SetParameters(const Eigen::VectorXd& params);
  const Eigen::VectorXd& gradient() const { return grads_; }

  void Save(std::ostream& out) const;
  void Load(std::istream& in);

 private:
  struct Span {
    int64_t offset = 0;
    int64_t rows = 0;
    int64_t cols = 0;  // 1 for vectors
  };

  Eigen::Map<const Eigen::MatrixXd> MatOf(const Eigen::VectorXd& flat,
                                          const Span& span) const {
    return {flat.data() + span.offset, span.rows, span.cols};
  }
  Eigen::Map<Eigen::MatrixXd> MatOf(Eigen::VectorXd& flat, const Span& span) {
    return {flat.data() + span.offset, span.rows, span.cols};
  }

  MlpConfig config_;
  std::vector<Span> weight_spans_;  // per hidden layer
  std::vector<Span> bias_spans_;
  Span value_weight_, value_bias_, policy_weight_, policy_bias_;
  Eigen::VectorXd params_;
  Eigen::VectorXd grads_;
  Eigen::VectorXd adam_m_;
  Eigen::VectorXd adam_v_;
  int64_t adam_step_ = 0;
};

}  // namespace pubmdp

#endif  // PUBMDP_NET_H_
