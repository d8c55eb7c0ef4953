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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <deque>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pubmdp/belief.h"
#include "pubmdp/capi.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/games.h"
#include "pubmdp/net.h"
#include "pubmdp/rng.h"

namespace pubmdp {
namespace {

// Every nonterminal belief reachable under some prescription sequence.
std::vector<PublicBelief> ReachableBeliefs(const GameTree& tree) {
  std::vector<PublicBelief> out;
  std::map<std::string, bool> seen;
  std::deque<PublicBelief> queue;
  queue.push_back(InitialBelief(tree));
  seen[BeliefKeyBytes(tree, queue.front())] = true;
  while (!queue.empty()) {
    PublicBelief belief = queue.front();
    queue.pop_front();
    out.push_back(belief);
    for (const PrescriptionVector& prescription :
         EnumeratePrescriptionVectors(tree, belief)) {
      StepOutcome step = ExpandStep(tree, belief, prescription);
      for (const PublicBelief& child : step.next_beliefs) {
        if (IsTerminalBelief(tree, child)) continue;
        std::string key = BeliefKeyBytes(tree, child);
        if (!seen.emplace(key, true).second) continue;
        queue.push_back(child);
      }
    }
  }
  return out;
}

TEST_CASE("belief encodings are binary and injective over reachable beliefs") {
  for (const char* name : {"tiny_hanabi:A", "tiny_hanabi:E", "trade_comm:2x2"}) {
    GameTree tree = GameTree::Build(MakeGame(name));
    BeliefEncoder encoder(tree);
    REQUIRE(encoder.input_size() > 0);
    std::map<std::string, std::string> by_encoding;
    for (const PublicBelief& belief : ReachableBeliefs(tree)) {
      Eigen::VectorXd x = encoder.Encode(belief);
      REQUIRE(x.size() == encoder.input_size());
      std::string bits(x.size(), '0');
      for (int i = 0; i < x.size(); ++i) {
        REQUIRE((x[i] == 0.0 || x[i] == 1.0));
        bits[i] = x[i] == 1.0 ? '1' : '0';
      }
      std::string key = BeliefKeyBytes(tree, belief);
      auto [it, inserted] = by_encoding.emplace(bits, key);
      CHECK_MESSAGE(inserted, "encoding collision in ", name);
      CHECK(it->second == key);
    }
  }
}

TEST_CASE("encoding is a pure function of the belief") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:C"));
  BeliefEncoder encoder(tree);
  PublicBelief root = InitialBelief(tree);
  Eigen::VectorXd a = encoder.Encode(root);
  Eigen::VectorXd b = encoder.Encode(root);
  CHECK(a == b);
}

TEST_CASE("network initialization is seed deterministic") {
  MlpConfig config;
  config.input_size = 7;
  config.logits_size = 5;
  config.hidden_layers = 2;
  config.hidden_units = 16;
  RandomStream rng_a(77);
  RandomStream rng_b(77);
  TwoHeadMlp net_a(config, &rng_a);
  TwoHeadMlp net_b(config, &rng_b);
  CHECK(net_a.parameters() == net_b.parameters());

  RandomStream rng_c(78);
  TwoHeadMlp net_c(config, &rng_c);
  CHECK(net_a.parameters() != net_c.parameters());
}

TEST_CASE("forward pass has head shapes and finite outputs") {
  MlpConfig config;
  config.input_size = 9;
  config.logits_size = 4;
  config.hidden_layers = 1;
  config.hidden_units = 8;
  RandomStream rng(5);
  TwoHeadMlp net(config, &rng);
  Eigen::VectorXd input = Eigen::VectorXd::Zero(9);
  input[2] = 1.0;
  input[8] = 1.0;
  TwoHeadMlp::Activation act;
  net.Forward(input, &act);
  CHECK(act.logits.size() == 4);
  CHECK(std::isfinite(act.value_raw));
  CHECK(act.hidden.size() == 1);
  CHECK(act.hidden[0].size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(act.hidden[0][i] >= 0.0);
}

std::vector<BufferEntry> RandomBuffer(const GameTree& tree, int entries,
                                      double value_scale, RandomStream* rng) {
  std::vector<PublicBelief> beliefs = ReachableBeliefs(tree);
  std::vector<BufferEntry> buffer;
  for (int i = 0; i < entries; ++i) {
    BufferEntry entry;
    entry.belief = beliefs[rng->UniformInt((int)beliefs.size())];
    PrescriptionSpace space(tree, entry.belief, /*support_only=*/false);
    entry.prescription = space.Decode(rng->UniformInt((int)space.Count()));
    entry.value = value_scale * rng->UniformDouble();
    buffer.push_back(entry);
  }
  return buffer;
}

void CheckGradient(NeuralCapiModel* model, const std::vector<BufferEntry>& buffer,
                   int coordinates, RandomStream* rng) {
  double loss = model->BatchLossAndGradient(buffer);
  REQUIRE(std::isfinite(loss));
  Eigen::VectorXd gradient = model->net().gradient();
  Eigen::VectorXd theta = model->net().parameters();
  const double h = 1e-6;
  for (int c = 0; c < coordinates; ++c) {
    int64_t i = rng->UniformInt((int)theta.size());
    Eigen::VectorXd shifted = theta;
    shifted[i] = theta[i] + h;
    model->net().SetParameters(shifted);
    double up = model->BatchLoss(buffer);
    shifted[i] = theta[i] - h;
    model->net().SetParameters(shifted);
    double down = model->BatchLoss(buffer);
    double fd = (up - down) / (2.0 * h);
    double scale = std::max({1e-3, std::fabs(fd), std::fabs(gradient[i])});
    CHECK(std::fabs(fd - gradient[i]) / scale < 1e-4);
  }
  model->net().SetParameters(theta);
}

TEST_CASE("analytic gradients match finite differences") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:E"));
  RandomStream rng(123);
  NeuralCapiConfig config;
  config.hidden_layers = 2;
  config.hidden_units = 12;
  config.policy_loss_weight = 0.5;

  SUBCASE("raw value head") {
    RandomStream init = rng.Child("init-raw");
    NeuralCapiModel model(tree, config, &init);
    RandomStream data = rng.Child("data-raw");
    CheckGradient(&model, RandomBuffer(tree, 6, 10.0, &data), 60, &data);
  }

  SUBCASE("squashed value head") {
    config.squash_value = true;
    config.value_low = 0.0;
    config.value_high = 10.0;
    RandomStream init = rng.Child("init-squash");
    NeuralCapiModel model(tree, config, &init);
    RandomStream data = rng.Child("data-squash");
    CheckGradient(&model, RandomBuffer(tree, 6, 10.0, &data), 60, &data);
  }
}

TEST_CASE("squashed values stay inside the configured range") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:E"));
  NeuralCapiConfig config;
  config.hidden_layers = 1;
  config.hidden_units = 8;
  config.squash_value = true;
  config.value_low = 2.0;
  config.value_high = 6.0;
  RandomStream rng(9);
  NeuralCapiModel model(tree, config, &rng);
  for (const PublicBelief& belief : ReachableBeliefs(tree)) {
    double value = model.Value(belief);
    CHECK(value >= 2.0);
    CHECK(value <= 6.0);
  }
}

TEST_CASE("policy rows are masked distributions for every information state") {
  GameTree tree = GameTree::Build(MakeGame("trade_comm:2x2"));
  NeuralCapiConfig config;
  config.hidden_layers = 1;
  config.hidden_units = 8;
  RandomStream rng(11);
  NeuralCapiModel model(tree, config, &rng);
  for (const PublicBelief& belief : ReachableBeliefs(tree)) {
    PolicyRows rows = model.Policy(belief);
    const PublicState& ps = tree.public_state(belief.public_state);
    REQUIRE(rows.size() == (size_t)tree.num_players());
    for (int player = 0; player < tree.num_players(); ++player) {
      REQUIRE(rows[player].size() == ps.info_states[player].size());
      for (size_t row = 0; row < rows[player].size(); ++row) {
        const InfoState& info =
            tree.info_state(player, ps.info_states[player][row]);
        REQUIRE(rows[player][row].size() == info.legal.size());
        double total = 0.0;
        for (double p : rows[player][row]) {
          CHECK(p >= 0.0);
          total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("checkpoints restore parameters and optimizer state") {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:B"));
  NeuralCapiConfig config;
  config.hidden_layers = 1;
  config.hidden_units = 8;
  config.learning_rate = 1e-2;
  RandomStream rng(42);
  RandomStream init_a = rng.Child("a");
  NeuralCapiModel model_a(tree, config, &init_a);
  RandomStream data = rng.Child("data");
  std::vector<BufferEntry> buffer = RandomBuffer(tree, 4, 1.0, &data);

  // A few steps so the Adam moments are nontrivial before saving.
  for (int step = 0; step < 3; ++step) model_a.Train(buffer);
  std::ostringstream saved;
  model_a.Save(saved);

  RandomStream init_b = rng.Child("b");
  NeuralCapiModel model_b(tree, config, &init_b);
  CHECK(model_a.net().parameters() != model_b.net().parameters());
  std::istringstream restore(saved.str());
  model_b.Load(restore);
  CHECK(model_a.net().parameters() == model_b.net().parameters());

  // Identical optimizer state means identical continued training.
  double loss_a = model_a.Train(buffer);
  double loss_b = model_b.Train(buffer);
  CHECK(loss_a == loss_b);
  CHECK(model_a.net().parameters() == model_b.net().parameters());

  // Shape mismatches are rejected instead of silently misread.
  NeuralCapiConfig other = config;
  other.hidden_units = 16;
  RandomStream init_c = rng.Child("c");
  NeuralCapiModel model_c(tree, other, &init_c);
  std::istringstream bad(saved.str());
  CHECK_THROWS(model_c.Load(bad));
}

}  // namespace
}  // namespace pubmdp
