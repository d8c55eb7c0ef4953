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

#include "pubmdp/games.h"

#include <array>
#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

namespace pubmdp {
namespace {

// Payoff tables indexed [card1][action1][card2][action2].
constexpr double kPayoffA[2][2][2][2] = {
    {{{0, 1}, {0, 1}}, {{0, 0}, {3, 2}}},
    {{{3, 3}, {2, 0}}, {{3, 2}, {3, 3}}},
};
constexpr double kPayoffB[2][2][2][2] = {
    {{{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}},
    {{{0, 1}, {1, 0}}, {{0, 0}, {1, 0}}},
};
constexpr double kPayoffC[2][2][2][2] = {
    {{{3, 0}, {2, 0}}, {{0, 3}, {3, 3}}},
    {{{2, 2}, {0, 1}}, {{3, 0}, {0, 2}}},
};
constexpr double kPayoffD[2][2][2][2] = {
    {{{3, 0}, {3, 0}}, {{1, 3}, {3, 0}}},
    {{{3, 2}, {0, 1}}, {{0, 2}, {0, 0}}},
};
constexpr double kPayoffE[2][3][2][3] = {
    {{{10, 0, 0}, {0, 0, 10}}, {{4, 8, 4}, {4, 8, 4}}, {{10, 0, 0}, {0, 0, 10}}},
    {{{0, 0, 10}, {10, 0, 0}}, {{4, 8, 4}, {4, 8, 4}}, {{0, 0, 0}, {10, 0, 0}}},
};
constexpr double kPayoffF[3][2][3][2] = {
    {{{0, 3}, {0, 0}, {3, 1}}, {{3, 2}, {0, 1}, {2, 1}}},
    {{{0, 2}, {1, 2}, {0, 1}}, {{0, 1}, {1, 2}, {0, 3}}},
    {{{1, 3}, {0, 3}, {3, 1}}, {{1, 2}, {2, 2}, {3, 0}}},
};

constexpr const char* kCardNamesUpper[3] = {"I", "II", "III"};
constexpr const char* kCardNamesLower[3] = {"i", "ii", "iii"};
constexpr const char* kActionNamesUpper[3] = {"A", "B", "C"};
constexpr const char* kActionNamesLower[3] = {"a", "b", "c"};

}  // namespace

int TinyHanabiNumCards(char variant) { return variant == 'F' ? 3 : 2; }
int TinyHanabiNumActions(char variant) { return variant == 'E' ? 3 : 2; }

double TinyHanabiPayoff(char variant, int card1, int action1, int card2,
                        int action2) {
  switch (variant) {
    case 'A': return kPayoffA[card1][action1][card2][action2];
    case 'B': return kPayoffB[card1][action1][card2][action2];
    case 'C': return kPayoffC[card1][action1][card2][action2];
    case 'D': return kPayoffD[card1][action1][card2][action2];
    case 'E': return kPayoffE[card1][action1][card2][action2];
    case 'F': return kPayoffF[card1][action1][card2][action2];
    default:
      throw GameDefinitionError(std::string("unknown variant: ") + variant);
  }
}

std::shared_ptr<const FiniteGame> MakeTinyHanabi(char variant) {
  const int cards = TinyHanabiNumCards(variant);
  const int actions = TinyHanabiNumActions(variant);
  ExplicitGameBuilder builder(std::string("tiny_hanabi:") + variant,
                              /*num_players=*/2, /*horizon=*/2);

  const ObsId obs_deal = builder.AddPublicObs("deal");
  std::vector<ObsId> obs_act(actions);
  for (int a = 0; a < actions; ++a) {
    obs_act[a] = builder.AddPublicObs(std::string("act:") + kActionNamesUpper[a]);
  }
  const ObsId obs_end = builder.AddPublicObs("end");

  std::vector<std::array<ObsId, 2>> obs_card(cards);
  for (int c = 0; c < cards; ++c) {
    obs_card[c][0] = builder.AddPrivateObs(0, std::string("card:") +
                                                  kCardNamesUpper[c]);
    obs_card[c][1] = builder.AddPrivateObs(1, std::string("card:") +
                                                  kCardNamesLower[c]);
  }
  const ObsId obs_none0 = builder.AddPrivateObs(0, "none");
  const ObsId obs_none1 = builder.AddPrivateObs(1, "none");

  std::vector<ActionId> act1(actions), act2(actions);
  for (int a = 0; a < actions; ++a) {
    act1[a] = builder.AddAction(0, kActionNamesUpper[a]);
    act2[a] = builder.AddAction(1, kActionNamesLower[a]);
  }
  const ActionId noop1 = builder.AddAction(0, "-");
  const ActionId noop2 = builder.AddAction(1, "-");

  // Worlds: (c1, c2) before player one acts, (c1, c2, a1) before player two
  // acts, and a single sink.
  std::vector<std::vector<WorldId>> stage0(cards, std::vector<WorldId>(cards));
  for (int c1 = 0; c1 < cards; ++c1) {
    for (int c2 = 0; c2 < cards; ++c2) {
      stage0[c1][c2] = builder.AddWorld(std::string("dealt:") +
                                            kCardNamesUpper[c1] + "," +
                                            kCardNamesLower[c2],
                                        /*terminal=*/false);
    }
  }
  std::vector<std::vector<std::vector<WorldId>>> stage1(
      cards, std::vector<std::vector<WorldId>>(cards,
                                               std::vector<WorldId>(actions)));
  for (int c1 = 0; c1 < cards; ++c1) {
    for (int c2 = 0; c2 < cards; ++c2) {
      for (int a = 0; a < actions; ++a) {
        stage1[c1][c2][a] = builder.AddWorld(
            std::string("acted:") + kCardNamesUpper[c1] + "," +
                kCardNamesLower[c2] + "," + kActionNamesUpper[a],
            /*terminal=*/false);
      }
    }
  }
  const WorldId sink = builder.AddWorld("end", /*terminal=*/true);

  const double deal_prob = 1.0 / (cards * cards);
  for (int c1 = 0; c1 < cards; ++c1) {
    for (int c2 = 0; c2 < cards; ++c2) {
      builder.AddInitialOutcome(stage0[c1][c2], deal_prob, obs_deal,
                                {obs_card[c1][0], obs_card[c2][1]});
      builder.SetLegalActions(stage0[c1][c2], 0, act1);
      builder.SetLegalActions(stage0[c1][c2], 1, {noop2});
      for (int a1 = 0; a1 < actions; ++a1) {
        builder.AddTransition(
            stage0[c1][c2], {act1[a1], noop2},
            {{stage1[c1][c2][a1], 1.0, 0.0, obs_act[a1],
              {obs_none0, obs_none1}}});
        builder.SetLegalActions(stage1[c1][c2][a1], 0, {noop1});
        builder.SetLegalActions(stage1[c1][c2][a1], 1, act2);
        for (int a2 = 0; a2 < actions; ++a2) {
          builder.AddTransition(
              stage1[c1][c2][a1], {noop1, act2[a2]},
              {{sink, 1.0, TinyHanabiPayoff(variant, c1, a1, c2, a2), obs_end,
                {obs_none0, obs_none1}}});
        }
      }
    }
  }
  return builder.Build();
}

namespace {

// Trade comm worlds are indexed by stage:
//   [0, n^2)                      (i1, i2), player one to utter
//   [n^2, n^2 + n^2 u)            (i1, i2, x), player two to utter
//   [n^2 + n^2 u, ... + n^2 u^2)  (i1, i2, x, y), simultaneous trade
//   last                          sink
class TradeCommGame : public FiniteGame {
 public:
  TradeCommGame(int num_items, int num_utterances)
      : n_(num_items), u_(num_utterances) {
    if (n_ < 1 || u_ < 1) {
      throw GameDefinitionError("trade_comm needs at least one item and one "
                                "utterance");
    }
    if (n_ > 64 || u_ > 64) {
      throw GameDefinitionError("trade_comm parameters out of range");
    }
    utterances_.resize(u_);
    for (int x = 0; x < u_; ++x) utterances_[x] = x;
    trades_.resize(n_ * n_);
    for (int t = 0; t < n_ * n_; ++t) trades_[t] = u_ + t;
    noop_ = {u_ + n_ * n_};
    stage1_base_ = n_ * n_;
    stage2_base_ = stage1_base_ + n_ * n_ * u_;
    sink_ = stage2_base_ + n_ * n_ * u_ * u_;
    for (int i1 = 0; i1 < n_; ++i1) {
      for (int i2 = 0; i2 < n_; ++i2) {
        InitialOutcome outcome;
        outcome.world = i1 * n_ + i2;
        outcome.probability = 1.0 / (n_ * n_);
        outcome.public_obs = 0;
        outcome.private_obs = {i1, i2};
        initial_.push_back(std::move(outcome));
      }
    }
  }

  std::string name() const override {
    return "trade_comm:" + std::to_string(n_) + "x" + std::to_string(u_);
  }
  int num_players() const override { return 2; }
  int num_worlds() const override { return sink_ + 1; }
  int horizon() const override { return 3; }
  bool IsTerminal(WorldId world) const override { return world == sink_; }

  const std::vector<InitialOutcome>& initial_outcomes() const override {
    return initial_;
  }

  const std::vector<ActionId>& LegalActions(WorldId world,
                                            int player) const override {
    switch (Stage(world)) {
      case 0: return player == 0 ? utterances_ : noop_;
      case 1: return player == 0 ? noop_ : utterances_;
      case 2: return trades_;
      default:
        throw GameDefinitionError("legal actions queried at terminal world");
    }
  }

  void AppendTransitions(WorldId world, const JointAction& action,
                         std::vector<TransitionOutcome>* out) const override {
    TransitionOutcome outcome;
    outcome.probability = 1.0;
    outcome.private_obs = {n_, n_};  // the constant non-informative code
    switch (Stage(world)) {
      case 0: {
        const int x = action[0];
        outcome.next_world = stage1_base_ + world * u_ + x;
        outcome.public_obs = 1 + x;
        break;
      }
      case 1: {
        const int y = action[1];
        outcome.next_world = stage2_base_ + (world - stage1_base_) * u_ + y;
        outcome.public_obs = 1 + y;
        break;
      }
      case 2: {
        int i1, i2, x, y;
        DecodeStage2(world, &i1, &i2, &x, &y);
        const int t1 = action[0] - u_;
        const int t2 = action[1] - u_;
        const bool match = t1 / n_ == i1 && t1 % n_ == i2 && t2 / n_ == i2 &&
                           t2 % n_ == i1;
        outcome.next_world = sink_;
        outcome.public_obs = 1 + u_;
        outcome.reward = match ? 1.0 : 0.0;
        break;
      }
      default:
        throw GameDefinitionError("transition queried at terminal world");
    }
    out->push_back(std::move(outcome));
  }

  int num_actions(int player) const override {
    (void)player;
    return u_ + n_ * n_ + 1;
  }
  int num_public_obs() const override { return u_ + 2; }
  int num_private_obs(int player) const override {
    (void)player;
    return n_ + 1;
  }

  std::string world_name(WorldId world) const override {
    if (world == sink_) return "end";
    int i1, i2, x, y;
    switch (Stage(world)) {
      case 0:
        return "dealt:" + std::to_string(world / n_) + "," +
               std::to_string(world % n_);
      case 1: {
        const int base = world - stage1_base_;
        return "said1:" + std::to_string(base / u_ / n_) + "," +
               std::to_string(base / u_ % n_) + "," + std::to_string(base % u_);
      }
      default:
        DecodeStage2(world, &i1, &i2, &x, &y);
        return "said2:" + std::to_string(i1) + "," + std::to_string(i2) + "," +
               std::to_string(x) + "," + std::to_string(y);
    }
  }
  std::string action_name(int player, ActionId action) const override {
    (void)player;
    if (action < u_) return "say:" + std::to_string(action);
    if (action < u_ + n_ * n_) {
      const int t = action - u_;
      return "trade:" + std::to_string(t / n_) + ">" + std::to_string(t % n_);
    }
    return "-";
  }
  std::string public_obs_name(ObsId obs) const override {
    if (obs == 0) return "start";
    if (obs <= u_) return "said:" + std::to_string(obs - 1);
    return "end";
  }
  std::string private_obs_name(int player, ObsId obs) const override {
    (void)player;
    if (obs < n_) return "item:" + std::to_string(obs);
    return "none";
  }

  int num_items() const { return n_; }
  int num_utterances() const { return u_; }

 private:
  int Stage(WorldId world) const {
    if (world < stage1_base_) return 0;
    if (world < stage2_base_) return 1;
    if (world < sink_) return 2;
    return 3;
  }
  void DecodeStage2(WorldId world, int* i1, int* i2, int* x, int* y) const {
    int base = world - stage2_base_;
    *y = base % u_;
    base /= u_;
    *x = base % u_;
    base /= u_;
    *i2 = base % n_;
    *i1 = base / n_;
  }

  int n_, u_;
  std::vector<ActionId> utterances_, trades_, noop_;
  int stage1_base_, stage2_base_, sink_;
  std::vector<InitialOutcome> initial_;
};

}  // namespace

std::shared_ptr<const FiniteGame> MakeTradeComm(int num_items,
                                                int num_utterances) {
  return std::make_shared<TradeCommGame>(num_items, num_utterances);
}

std::shared_ptr<const FiniteGame> MakeGame(const std::string& name) {
  const auto colon = name.find(':');
  const std::string family = name.substr(0, colon);
  if (family == "tiny_hanabi") {
    if (colon == std::string::npos || name.size() != colon + 2) {
      throw GameDefinitionError("tiny_hanabi variant must be A..F: " + name);
    }
    const char variant = name[colon + 1];
    if (variant < 'A' || variant > 'F') {
      throw GameDefinitionError("tiny_hanabi variant must be A..F: " + name);
    }
    return MakeTinyHanabi(variant);
  }
  if (family == "trade_comm") {
    if (colon == std::string::npos) {
      throw GameDefinitionError("trade_comm needs <items>x<utterances>");
    }
    const std::string params = name.substr(colon + 1);
    const auto cross = params.find('x');
    if (cross == std::string::npos) {
      throw GameDefinitionError("trade_comm needs <items>x<utterances>");
    }
    int items = 0, utterances = 0;
    try {
      items = std::stoi(params.substr(0, cross));
      utterances = std::stoi(params.substr(cross + 1));
    } catch (const std::exception&) {
      throw GameDefinitionError("bad trade_comm parameters: " + name);
    }
    return MakeTradeComm(items, utterances);
  }
  throw GameDefinitionError("unknown game: " + name);
}

JointPolicy MakeTradeCommSignallingPolicy(const GameTree& tree) {
  const auto* game = dynamic_cast<const TradeCommGame*>(&tree.game());
  if (game == nullptr) {
    throw GameDefinitionError("signalling policy requires a trade_comm game");
  }
  const int n = game->num_items();
  const int u = game->num_utterances();
  if (u < n) {
    throw GameDefinitionError(
        "signalling policy needs one utterance per item");
  }
  JointPolicy policy;
  policy.rows.resize(2);
  for (int p = 0; p < 2; ++p) {
    policy.rows[p].resize(tree.info_states(p).size());
    for (const InfoState& is : tree.info_states(p)) {
      if (is.legal.empty()) continue;
      auto& row = policy.rows[p][is.id];
      row.assign(is.legal.size(), 0.0);
      const PublicState& ps = tree.public_state(is.public_state);
      const int item = is.tokens[0];
      int choice = 0;
      if (is.legal.size() == 1) {
        choice = 0;  // forced no-op
      } else if (ps.depth < 2) {
        choice = item;  // announce the item; utterances lead the legal list
      } else {
        const int x = ps.obs_seq[1] - 1;
        const int y = ps.obs_seq[2] - 1;
        const int partner_item = (p == 0) ? y : x;
        choice = item * n + partner_item;  // trades are listed give-major
      }
      row[choice] = 1.0;
    }
  }
  return policy;
}

}  // namespace pubmdp
