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

#ifndef PUBMDP_GAMES_H_
#define PUBMDP_GAMES_H_

#include <memory>
#include <string>

#include "pubmdp/fosg.h"
#include "pubmdp/game_tree.h"

namespace pubmdp {

// Two-player signalling games. Chance deals each player one card, player one
// acts (the action is public), player two acts, and the shared payoff is a
// table lookup on (cards, actions). Variants A-D use two cards and two
// actions, E uses two cards and three actions, F uses three cards and two
// actions.
std::shared_ptr<const FiniteGame> MakeTinyHanabi(char variant);

// Payoff table entry for a variant; used by table-transcription tests.
double TinyHanabiPayoff(char variant, int card1, int action1, int card2,
                        int action2);
int TinyHanabiNumCards(char variant);
int TinyHanabiNumActions(char variant);

// Item-trading negotiation. Chance deals each player one of `num_items`
// items independently and uniformly. Player one makes a public utterance,
// then player two does; then both players simultaneously and privately
// request a trade (an ordered give/get item pair). The payoff is 1 exactly
// when the two requests name the same mirrored exchange of the dealt items,
// and 0 otherwise.
std::shared_ptr<const FiniteGame> MakeTradeComm(int num_items,
                                                int num_utterances);

// Registry lookup: "tiny_hanabi:A" ... "tiny_hanabi:F", or
// "trade_comm:<items>x<utterances>". Throws GameDefinitionError for unknown
// names or invalid parameters.
std::shared_ptr<const FiniteGame> MakeGame(const std::string& name);

// Deterministic full-coordination policy for trade comm instances with at
// least as many utterances as items: each player announces its item and
// requests the exchange implied by the two announcements. Evaluates to the
// maximum payoff of 1, which certifies the optimal value without search.
JointPolicy MakeTradeCommSignallingPolicy(const GameTree& tree);

}  // namespace pubmdp

#endif  // PUBMDP_GAMES_H_
