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

#include "pubmdp/exact.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

namespace pubmdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

uint64_t SaturatingMul(uint64_t a, uint64_t b) {
  if (a != 0 && b > ~uint64_t{0} / a) return ~uint64_t{0};
  return a * b;
}

void AppendRaw(std::string* out, const void* data, size_t n) {
  out->append(reinterpret_cast<const char*>(data), n);
}

}  // namespace

LastLevelCloser::LastLevelCloser(const GameTree& tree) : tree_(tree) {
  const auto& publics = tree.public_states();
  closable_.assign(publics.size(), 0);
  cache_.resize(publics.size());
  stub_position_.assign(tree.nodes().size(), -1);
  for (const PublicState& ps : publics) {
    for (size_t pos = 0; pos < ps.stubs.size(); ++pos) {
      stub_position_[ps.stubs[pos]] = static_cast<int>(pos);
    }
    if (ps.terminal || ps.stubs.empty()) continue;
    bool all_terminal = true;
    for (int stub_id : ps.stubs) {
      if (!tree.node(stub_id).children.empty()) {
        all_terminal = false;
        break;
      }
    }
    closable_[ps.id] = all_terminal ? 1 : 0;
  }
}

const LastLevelCloser::PublicCache& LastLevelCloser::CacheFor(
    int public_state) {
  PublicCache& cache = cache_[public_state];
  if (cache.ready) return cache;
  const PublicState& ps = tree_.public_state(public_state);
  const int players = tree_.num_players();

  cache.row_legal_counts.resize(players);
  for (int p = 0; p < players; ++p) {
    cache.row_legal_counts[p].resize(ps.info_states[p].size());
    for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
      cache.row_legal_counts[p][r] = static_cast<int>(
          tree_.info_state(p, ps.info_states[p][r]).legal.size());
    }
  }

  cache.stub_rows.resize(ps.stubs.size());
  cache.stub_rewards.resize(ps.stubs.size());
  cache.stub_strides.resize(ps.stubs.size());
  JointAction action(players);
  std::vector<TransitionOutcome> outcomes;
  for (size_t s = 0; s < ps.stubs.size(); ++s) {
    const HistoryNode& stub = tree_.node(ps.stubs[s]);
    cache.stub_rows[s] = stub.info_state_index;

    std::vector<uint64_t>& strides = cache.stub_strides[s];
    strides.assign(players, 1);
    uint64_t total = 1;
    for (int p = players - 1; p >= 0; --p) {
      strides[p] = total;
      total = SaturatingMul(
          total, tree_.game().LegalActions(stub.world, p).size());
    }
    if (total == ~uint64_t{0}) {
      throw std::runtime_error("joint action space too large to close");
    }

    std::vector<double>& rewards = cache.stub_rewards[s];
    rewards.resize(total);
    for (uint64_t j = 0; j < total; ++j) {
      tree_.DecodeJointAction(stub.world, j, &action);
      outcomes.clear();
      tree_.game().AppendTransitions(stub.world, action, &outcomes);
      double r = 0.0;
      for (const auto& outcome : outcomes) {
        r += outcome.probability * outcome.reward;
      }
      rewards[j] = r;
    }
  }
  cache.ready = true;
  return cache;
}

const LastLevelCloser::Solution& LastLevelCloser::Solve(
    int public_state, const std::vector<double>& stub_weights,
    uint64_t enumeration_cap) {
  if (!Closable(public_state)) {
    throw std::runtime_error("public state is not closable");
  }
  const PublicState& ps = tree_.public_state(public_state);
  if (stub_weights.size() != ps.stubs.size()) {
    throw std::runtime_error("weight vector length mismatch");
  }

  std::string key;
  key.reserve(4 + 8 * stub_weights.size());
  AppendRaw(&key, &public_state, sizeof(public_state));
  AppendRaw(&key, stub_weights.data(), 8 * stub_weights.size());
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const PublicCache& cache = CacheFor(public_state);
  const int players = tree_.num_players();

  Solution solution;
  solution.rows.resize(players);
  for (int p = 0; p < players; ++p) {
    solution.rows[p].assign(ps.info_states[p].size(), -1);
  }

  std::vector<int> support;
  for (size_t s = 0; s < stub_weights.size(); ++s) {
    if (stub_weights[s] < 0.0) {
      throw std::runtime_error("negative stub weight");
    }
    if (stub_weights[s] > 0.0) support.push_back(static_cast<int>(s));
  }
  if (support.empty()) {
    return memo_.emplace(std::move(key), std::move(solution)).first->second;
  }

  // Rows touching a positive-weight history, per player, in canonical order.
  std::vector<std::vector<int>> touched(players);
  std::vector<std::vector<int>> slot_of(players);
  std::vector<uint64_t> product(players, 1);
  for (int p = 0; p < players; ++p) {
    slot_of[p].assign(ps.info_states[p].size(), -1);
    for (int s : support) {
      const int row = cache.stub_rows[s][p];
      if (slot_of[p][row] == -1) {
        slot_of[p][row] = static_cast<int>(touched[p].size());
        touched[p].push_back(row);
      }
    }
    std::sort(touched[p].begin(), touched[p].end());
    for (size_t i = 0; i < touched[p].size(); ++i) {
      slot_of[p][touched[p][i]] = static_cast<int>(i);
    }
    for (int row : touched[p]) {
      product[p] = SaturatingMul(product[p],
                                 cache.row_legal_counts[p][row]);
    }
  }

  // Optimize the player with the largest assignment space row by row;
  // enumerate everyone else. Exact: each history lies in exactly one of the
  // optimized player's rows, so the row choices decouple given the others.
  int opt = 0;
  for (int p = 1; p < players; ++p) {
    if (product[p] >= product[opt]) opt = p;
  }
  uint64_t enumerated = 1;
  for (int p = 0; p < players; ++p) {
    if (p != opt) enumerated = SaturatingMul(enumerated, product[p]);
  }
  if (enumerated > enumeration_cap) {
    throw std::runtime_error("closure enumeration exceeds cap");
  }

  // Flat odometer over the enumerated players' slots.
  struct EnumSlot {
    int player;
    int row;
    int count;
  };
  std::vector<EnumSlot> slots;
  for (int p = 0; p < players; ++p) {
    if (p == opt) continue;
    for (int row : touched[p]) {
      slots.push_back({p, row, cache.row_legal_counts[p][row]});
    }
  }
  std::vector<int> digits(slots.size(), 0);

  // Histories grouped by the optimized player's slot.
  std::vector<std::vector<int>> slices(touched[opt].size());
  for (int s : support) {
    slices[slot_of[opt][cache.stub_rows[s][opt]]].push_back(s);
  }

  // Per-support-stub slot ids for the enumerated players, so the inner loop
  // composes joint indices without map lookups.
  std::vector<std::vector<std::pair<int, uint64_t>>> stub_terms(
      support.size());  // (enumerated slot id, stride)
  std::vector<double> weights(support.size());
  std::vector<const double*> rewards(support.size());
  std::vector<uint64_t> opt_stride(support.size());
  std::vector<int> support_pos(stub_weights.size(), -1);
  for (size_t i = 0; i < support.size(); ++i) {
    const int s = support[i];
    support_pos[s] = static_cast<int>(i);
    weights[i] = stub_weights[s];
    rewards[i] = cache.stub_rewards[s].data();
    opt_stride[i] = cache.stub_strides[s][opt];
    for (size_t slot = 0; slot < slots.size(); ++slot) {
      if (cache.stub_rows[s][slots[slot].player] == slots[slot].row) {
        stub_terms[i].push_back(
            {static_cast<int>(slot),
             cache.stub_strides[s][slots[slot].player]});
      }
    }
  }

  double best = -kInf;
  std::vector<int> best_digits;
  std::vector<int> best_opt_actions;
  std::vector<int> opt_actions(touched[opt].size(), 0);
  std::vector<uint64_t> base(support.size());

  for (uint64_t iter = 0;; ++iter) {
    for (size_t i = 0; i < support.size(); ++i) {
      uint64_t b = 0;
      for (const auto& [slot, stride] : stub_terms[i]) {
        b += static_cast<uint64_t>(digits[slot]) * stride;
      }
      base[i] = b;
    }
    double value = 0.0;
    for (size_t slot = 0; slot < slices.size(); ++slot) {
      const int count = cache.row_legal_counts[opt][touched[opt][slot]];
      double row_best = -kInf;
      int row_arg = 0;
      for (int a = 0; a < count; ++a) {
        double sum = 0.0;
        for (int s : slices[slot]) {
          const int i = support_pos[s];
          sum += weights[i] * rewards[i][base[i] + a * opt_stride[i]];
        }
        if (sum > row_best) {
          row_best = sum;
          row_arg = a;
        }
      }
      value += row_best;
      opt_actions[slot] = row_arg;
    }
    if (value > best) {
      best = value;
      best_digits = digits;
      best_opt_actions = opt_actions;
    }
    // Advance the odometer, last slot fastest.
    bool done = slots.empty();
    size_t slot = slots.size();
    while (slot > 0) {
      --slot;
      if (++digits[slot] < slots[slot].count) break;
      digits[slot] = 0;
      if (slot == 0) done = true;
    }
    if (done) break;
  }

  solution.value = best;
  for (size_t slot = 0; slot < slots.size(); ++slot) {
    solution.rows[slots[slot].player][slots[slot].row] = best_digits[slot];
  }
  for (size_t slot = 0; slot < touched[opt].size(); ++slot) {
    solution.rows[opt][touched[opt][slot]] = best_opt_actions[slot];
  }
  return memo_.emplace(std::move(key), std::move(solution)).first->second;
}

namespace {

// One enumerated decision: a (player, information state) pair with at least
// two legal actions at a public state the brute force does not close.
struct DecisionSlot {
  int player;
  int info_state;       // id within the player's information-state list
  int public_state;
  int count;
};

struct WalkContext {
  const GameTree& tree;
  const BruteForceOptions& options;
  LastLevelCloser& closer;
  // Per player, per information state: enumerated slot id or -1.
  std::vector<std::vector<int>> slot_of;
  std::vector<int> assignment;
  // Closure accumulators, per public state, plus the list touched by the
  // current walk.
  std::vector<std::vector<double>> closure_weights;
  std::vector<int> touched_closables;
  std::vector<uint8_t> closable_touched;
  // Optimistic per-history values for pruning.
  std::vector<double> optimistic;
};

int ChosenLegalIndex(const WalkContext& ctx, const HistoryNode& stub, int p) {
  const int slot = ctx.slot_of[p][stub.info_states[p]];
  return slot < 0 ? 0 : ctx.assignment[slot];
}

// Expected return below `stub` under the current assignment, deferring
// closable public states into the closure accumulators.
double WalkAssigned(WalkContext& ctx, const HistoryNode& stub, double weight) {
  const int ps = stub.public_state;
  if (ctx.options.use_closure && ctx.closer.Closable(ps)) {
    if (!ctx.closable_touched[ps]) {
      ctx.closable_touched[ps] = 1;
      ctx.touched_closables.push_back(ps);
      ctx.closure_weights[ps].assign(
          ctx.tree.public_state(ps).stubs.size(), 0.0);
    }
    ctx.closure_weights[ps][ctx.closer.StubPosition(stub.id)] += weight;
    return 0.0;
  }
  const int players = ctx.tree.num_players();
  JointAction action(players);
  uint64_t joint = 0;
  for (int p = 0; p < players; ++p) {
    const auto& legal = ctx.tree.game().LegalActions(stub.world, p);
    const int choice = ChosenLegalIndex(ctx, stub, p);
    action[p] = legal[choice];
    joint = joint * legal.size() + static_cast<uint64_t>(choice);
  }
  std::vector<TransitionOutcome> outcomes;
  ctx.tree.game().AppendTransitions(stub.world, action, &outcomes);
  double value = 0.0;
  for (size_t oi = 0; oi < outcomes.size(); ++oi) {
    const TransitionOutcome& outcome = outcomes[oi];
    const double mass = weight * outcome.probability;
    value += mass * outcome.reward;
    if (!ctx.tree.game().IsTerminal(outcome.next_world)) {
      const int child = ctx.tree.ChildNode(stub, static_cast<int>(joint),
                                           static_cast<int>(oi));
      if (child < 0) throw std::runtime_error("missing child history");
      value += WalkAssigned(ctx, ctx.tree.node(child), mass);
    }
  }
  return value;
}

double EvaluateAssignment(WalkContext& ctx) {
  double value = 0.0;
  for (int root : ctx.tree.root_nodes()) {
    const HistoryNode& node = ctx.tree.node(root);
    value += WalkAssigned(ctx, node, node.chance_reach);
  }
  for (int ps : ctx.touched_closables) {
    value += ctx.closer
                 .Solve(ps, ctx.closure_weights[ps], ctx.options.policy_cap)
                 .value;
    ctx.closable_touched[ps] = 0;
  }
  ctx.touched_closables.clear();
  return value;
}

// Optimistic value of `stub`: every decision still open maximizes
// independently per history, an upper bound on any consistent assignment.
double OptimisticBound(WalkContext& ctx, const HistoryNode& stub,
                       double weight, size_t assigned_slots) {
  if (ctx.options.use_closure && ctx.closer.Closable(stub.public_state)) {
    return weight * ctx.optimistic[stub.id];
  }
  const int players = ctx.tree.num_players();
  bool all_assigned = true;
  for (int p = 0; p < players; ++p) {
    const int slot = ctx.slot_of[p][stub.info_states[p]];
    if (slot >= 0 && static_cast<size_t>(slot) >= assigned_slots) {
      all_assigned = false;
    }
  }
  if (all_assigned) {
    // Fixed joint action; recurse.
    JointAction action(players);
    uint64_t joint = 0;
    for (int p = 0; p < players; ++p) {
      const auto& legal = ctx.tree.game().LegalActions(stub.world, p);
      const int choice = ChosenLegalIndex(ctx, stub, p);
      action[p] = legal[choice];
      joint = joint * legal.size() + static_cast<uint64_t>(choice);
    }
    std::vector<TransitionOutcome> outcomes;
    ctx.tree.game().AppendTransitions(stub.world, action, &outcomes);
    double value = 0.0;
    for (size_t oi = 0; oi < outcomes.size(); ++oi) {
      const TransitionOutcome& outcome = outcomes[oi];
      const double mass = weight * outcome.probability;
      value += mass * outcome.reward;
      if (!ctx.tree.game().IsTerminal(outcome.next_world)) {
        const int child = ctx.tree.ChildNode(stub, static_cast<int>(joint),
                                             static_cast<int>(oi));
        value += OptimisticBound(ctx, ctx.tree.node(child), mass,
                                 assigned_slots);
      }
    }
    return value;
  }
  return weight * ctx.optimistic[stub.id];
}

double PruneBound(WalkContext& ctx, size_t assigned_slots) {
  double bound = 0.0;
  for (int root : ctx.tree.root_nodes()) {
    const HistoryNode& node = ctx.tree.node(root);
    bound += OptimisticBound(ctx, node, node.chance_reach, assigned_slots);
  }
  return bound;
}

}  // namespace

BruteForceResult BruteForceOptimal(const GameTree& tree,
                                   const BruteForceOptions& options) {
  LastLevelCloser closer(tree);
  WalkContext ctx{tree, options, closer, {}, {}, {}, {}, {}, {}};
  ctx.closure_weights.resize(tree.public_states().size());
  ctx.closable_touched.assign(tree.public_states().size(), 0);

  // Enumerated slots, ordered by (public depth, public state, player, row).
  std::vector<DecisionSlot> slots;
  ctx.slot_of.resize(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    ctx.slot_of[p].assign(tree.info_states(p).size(), -1);
  }
  uint64_t total = 1;
  for (const PublicState& ps : tree.public_states()) {
    if (ps.terminal) continue;
    if (options.use_closure && closer.Closable(ps.id)) continue;
    for (int p = 0; p < tree.num_players(); ++p) {
      for (int is_id : ps.info_states[p]) {
        const int count =
            static_cast<int>(tree.info_state(p, is_id).legal.size());
        if (count < 2) continue;
        ctx.slot_of[p][is_id] = static_cast<int>(slots.size());
        slots.push_back({p, is_id, ps.id, count});
        total = SaturatingMul(total, static_cast<uint64_t>(count));
      }
    }
  }
  if (total > options.policy_cap) {
    throw std::runtime_error("joint policy enumeration exceeds cap");
  }
  ctx.assignment.assign(slots.size(), 0);

  if (options.prune) {
    // Per-history optimistic values, exchanging max and expectation.
    ctx.optimistic.assign(tree.nodes().size(), 0.0);
    for (size_t id = tree.nodes().size(); id-- > 0;) {
      const HistoryNode& stub = tree.node(static_cast<int>(id));
      MixedRadixIndexer indexer = tree.JointIndexer(stub.world);
      JointAction action;
      std::vector<TransitionOutcome> outcomes;
      double best = -kInf;
      for (uint64_t j = 0; j < indexer.count(); ++j) {
        tree.DecodeJointAction(stub.world, j, &action);
        outcomes.clear();
        tree.game().AppendTransitions(stub.world, action, &outcomes);
        double value = 0.0;
        for (size_t oi = 0; oi < outcomes.size(); ++oi) {
          const TransitionOutcome& outcome = outcomes[oi];
          value += outcome.probability * outcome.reward;
          if (!tree.game().IsTerminal(outcome.next_world)) {
            const int child =
                tree.ChildNode(stub, static_cast<int>(j), static_cast<int>(oi));
            value += outcome.probability * ctx.optimistic[child];
          }
        }
        best = std::max(best, value);
      }
      ctx.optimistic[id] = best;
    }
  }

  BruteForceResult result;
  double best = -kInf;
  std::vector<int> best_assignment;

  if (!options.prune) {
    // Flat odometer over all assignments.
    for (;;) {
      ++result.assignments_enumerated;
      const double value = EvaluateAssignment(ctx);
      if (value > best) {
        best = value;
        best_assignment = ctx.assignment;
      }
      size_t slot = slots.size();
      bool done = slots.empty();
      while (slot > 0) {
        --slot;
        if (++ctx.assignment[slot] < slots[slot].count) break;
        ctx.assignment[slot] = 0;
        if (slot == 0) done = true;
      }
      if (done) break;
    }
  } else {
    // Depth-first over slots with bound checks at public-state boundaries.
    std::function<void(size_t)> dfs = [&](size_t depth) {
      if (depth == slots.size()) {
        ++result.assignments_enumerated;
        const double value = EvaluateAssignment(ctx);
        if (value > best) {
          best = value;
          best_assignment = ctx.assignment;
        }
        return;
      }
      const bool boundary =
          depth == 0 || slots[depth].public_state != slots[depth - 1].public_state;
      if (boundary && best > -kInf && PruneBound(ctx, depth) <= best) {
        return;
      }
      for (int a = 0; a < slots[depth].count; ++a) {
        ctx.assignment[depth] = a;
        dfs(depth + 1);
      }
      ctx.assignment[depth] = 0;
    };
    dfs(0);
  }

  result.value = best;

  // Rebuild the winning policy: assigned slots, closure rows under the
  // winning prefix, first legal action everywhere else.
  result.policy = MakeFirstLegalPolicy(tree);
  ctx.assignment = best_assignment;
  for (size_t slot = 0; slot < slots.size(); ++slot) {
    auto& row = result.policy.rows[slots[slot].player][slots[slot].info_state];
    std::fill(row.begin(), row.end(), 0.0);
    row[best_assignment[slot]] = 1.0;
  }
  for (int root : tree.root_nodes()) {
    const HistoryNode& node = tree.node(root);
    WalkAssigned(ctx, node, node.chance_reach);
  }
  for (int ps_id : ctx.touched_closables) {
    const LastLevelCloser::Solution& sol =
        closer.Solve(ps_id, ctx.closure_weights[ps_id], options.policy_cap);
    const PublicState& ps = tree.public_state(ps_id);
    for (int p = 0; p < tree.num_players(); ++p) {
      for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
        if (sol.rows[p][r] < 0) continue;
        auto& row = result.policy.rows[p][ps.info_states[p][r]];
        std::fill(row.begin(), row.end(), 0.0);
        row[sol.rows[p][r]] = 1.0;
      }
    }
    ctx.closable_touched[ps_id] = 0;
  }
  ctx.touched_closables.clear();
  return result;
}

namespace {

struct InductionState {
  const GameTree& tree;
  const BackwardInductionOptions& options;
  LastLevelCloser closer;
  std::unordered_map<std::string, double> values;
  std::unordered_map<std::string, PrescriptionVector> greedy;

  explicit InductionState(const GameTree& t,
                          const BackwardInductionOptions& o)
      : tree(t), options(o), closer(t) {}
};

double InductionValue(InductionState& state, const PublicBelief& belief) {
  const GameTree& tree = state.tree;
  if (IsTerminalBelief(tree, belief)) return 0.0;
  std::string key = BeliefKeyBytes(tree, belief);
  if (auto it = state.values.find(key); it != state.values.end()) {
    return it->second;
  }
  const PublicState& ps = tree.public_state(belief.public_state);

  if (state.closer.Closable(ps.id)) {
    std::vector<double> weights(ps.stubs.size(), 0.0);
    double total = 0.0;
    for (size_t pos = 0; pos < ps.stubs.size(); ++pos) {
      const HistoryNode& stub = tree.node(ps.stubs[pos]);
      double w = stub.chance_reach;
      for (int p = 0; p < tree.num_players(); ++p) {
        if (belief.indicators[p][stub.info_state_index[p]] == 0) w = 0.0;
      }
      weights[pos] = w;
      total += w;
    }
    if (total <= 0.0) throw std::runtime_error("belief has empty support");
    const LastLevelCloser::Solution& sol =
        state.closer.Solve(ps.id, weights, state.options.closure_cap);
    const double value = sol.value / total;
    PrescriptionVector prescription;
    prescription.actions.resize(tree.num_players());
    for (int p = 0; p < tree.num_players(); ++p) {
      prescription.actions[p].resize(ps.info_states[p].size());
      for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
        prescription.actions[p][r] = std::max(0, sol.rows[p][r]);
      }
    }
    state.values.emplace(key, value);
    state.greedy.emplace(std::move(key), std::move(prescription));
    return value;
  }

  PrescriptionSpace space(tree, belief, /*support_only=*/true);
  if (space.Overflowed() || space.Count() > state.options.stream_cap) {
    throw std::runtime_error(
        "prescription stream exceeds cap at a non-closable belief");
  }
  double best = -kInf;
  PrescriptionVector best_prescription;
  for (uint64_t i = 0; i < space.Count(); ++i) {
    PrescriptionVector prescription = space.Decode(i);
    StepOutcome step =
        ExpandStep(tree, belief, prescription, /*skip_terminal_next=*/true);
    double q = step.expected_reward;
    for (size_t o = 0; o < step.observations.size(); ++o) {
      if (step.next_terminal[o]) continue;
      q += step.probabilities[o] * InductionValue(state, step.next_beliefs[o]);
    }
    if (q > best) {
      best = q;
      best_prescription = std::move(prescription);
    }
  }
  state.values.emplace(key, best);
  state.greedy.emplace(std::move(key), std::move(best_prescription));
  return best;
}

void ExtractGreedy(InductionState& state, const PublicBelief& belief,
                   JointPolicy* policy) {
  const GameTree& tree = state.tree;
  if (IsTerminalBelief(tree, belief)) return;
  const std::string key = BeliefKeyBytes(tree, belief);
  const auto it = state.greedy.find(key);
  if (it == state.greedy.end()) {
    throw std::runtime_error("greedy prescription missing for a belief");
  }
  const PrescriptionVector& prescription = it->second;
  const PublicState& ps = tree.public_state(belief.public_state);
  for (int p = 0; p < tree.num_players(); ++p) {
    for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
      auto& row = policy->rows[p][ps.info_states[p][r]];
      std::fill(row.begin(), row.end(), 0.0);
      row[prescription.actions[p][r]] = 1.0;
    }
  }
  if (state.closer.Closable(ps.id)) return;
  StepOutcome step =
      ExpandStep(tree, belief, prescription, /*skip_terminal_next=*/true);
  for (size_t o = 0; o < step.observations.size(); ++o) {
    if (step.next_terminal[o]) continue;
    ExtractGreedy(state, step.next_beliefs[o], policy);
  }
}

}  // namespace

BackwardInductionResult BackwardInduction(
    const GameTree& tree, const BackwardInductionOptions& options) {
  InductionState state(tree, options);
  const PublicBelief root = InitialBelief(tree);
  BackwardInductionResult result;
  result.root_value = InductionValue(state, root);
  result.greedy_policy = MakeFirstLegalPolicy(tree);
  ExtractGreedy(state, root, &result.greedy_policy);
  result.greedy_policy_value = EvaluateJointPolicy(tree, result.greedy_policy);
  result.values = std::move(state.values);
  result.greedy_prescriptions = std::move(state.greedy);
  return result;
}

BeliefGraph BuildBeliefGraph(const GameTree& tree, uint64_t prescription_cap,
                             uint64_t node_cap) {
  BeliefGraph graph;
  const PublicBelief root = InitialBelief(tree);
  graph.nodes.push_back(
      {root, BeliefKeyBytes(tree, root), 0, IsTerminalBelief(tree, root), {}});
  graph.index.emplace(graph.nodes[0].key, 0);

  for (size_t current = 0; current < graph.nodes.size(); ++current) {
    if (graph.nodes[current].terminal) continue;
    const PublicBelief belief = graph.nodes[current].belief;
    const int depth = graph.nodes[current].depth;
    PrescriptionSpace space(tree, belief, /*support_only=*/false);
    if (space.Overflowed() || space.Count() > prescription_cap) {
      throw std::runtime_error("prescription enumeration exceeds cap");
    }
    for (uint64_t i = 0; i < space.Count(); ++i) {
      const PrescriptionVector prescription = space.Decode(i);
      StepOutcome step = ExpandStep(tree, belief, prescription);
      BeliefGraph::Edge edge;
      edge.prescription = i;
      edge.reward = step.expected_reward;
      for (size_t o = 0; o < step.observations.size(); ++o) {
        std::string key = BeliefKeyBytes(tree, step.next_beliefs[o]);
        auto [it, inserted] =
            graph.index.emplace(std::move(key), graph.nodes.size());
        if (inserted) {
          if (graph.nodes.size() >= node_cap) {
            throw std::runtime_error("belief graph exceeds node cap");
          }
          graph.nodes.push_back({std::move(step.next_beliefs[o]), it->first,
                                 depth + 1,
                                 static_cast<bool>(step.next_terminal[o]),
                                 {}});
        }
        edge.children.emplace_back(it->second, step.probabilities[o]);
      }
      graph.nodes[current].edges.push_back(std::move(edge));
    }
  }
  return graph;
}

ValueIterationResult ValueIteration(const BeliefGraph& graph, int max_sweeps) {
  ValueIterationResult result;
  result.values.assign(graph.nodes.size(), 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (size_t n = 0; n < graph.nodes.size(); ++n) {
      const BeliefGraph::Node& node = graph.nodes[n];
      if (node.terminal) continue;
      double best = -kInf;
      for (const auto& edge : node.edges) {
        double q = edge.reward;
        for (const auto& [child, prob] : edge.children) {
          q += prob * result.values[child];
        }
        best = std::max(best, q);
      }
      if (best != result.values[n]) {
        result.values[n] = best;
        changed = true;
      }
    }
    if (!changed) break;
    ++result.sweeps_to_converge;
  }
  result.root_value = result.values.empty() ? 0.0 : result.values[0];
  return result;
}

JointPolicy GreedyPolicyFromQ(const GameTree& tree, const BeliefGraph& graph,
                              const std::vector<std::vector<double>>& q) {
  JointPolicy policy = MakeFirstLegalPolicy(tree);
  std::vector<int> stack = {graph.root()};
  std::vector<uint8_t> visited(graph.nodes.size(), 0);
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (visited[n]) continue;
    visited[n] = 1;
    const BeliefGraph::Node& node = graph.nodes[n];
    if (node.terminal || node.edges.empty()) continue;
    size_t best_edge = 0;
    for (size_t e = 1; e < node.edges.size(); ++e) {
      if (q[n][e] > q[n][best_edge]) best_edge = e;
    }
    PrescriptionSpace space(tree, node.belief, /*support_only=*/false);
    const PrescriptionVector prescription =
        space.Decode(node.edges[best_edge].prescription);
    const PublicState& ps = tree.public_state(node.belief.public_state);
    for (int p = 0; p < tree.num_players(); ++p) {
      for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
        auto& row = policy.rows[p][ps.info_states[p][r]];
        std::fill(row.begin(), row.end(), 0.0);
        row[prescription.actions[p][r]] = 1.0;
      }
    }
    for (const auto& [child, prob] : node.edges[best_edge].children) {
      if (!graph.nodes[child].terminal) stack.push_back(child);
    }
  }
  return policy;
}

QLearningResult PubMdpQLearning(const GameTree& tree, const BeliefGraph& graph,
                                const QLearningConfig& config,
                                RandomStream* rng) {
  const int64_t eps_decay = config.epsilon_decay_episodes > 0
                                ? config.epsilon_decay_episodes
                                : config.episodes;
  const int64_t alpha_decay = config.alpha_decay_episodes > 0
                                  ? config.alpha_decay_episodes
                                  : config.episodes;
  const int64_t eval_every = std::max<int64_t>(1, config.eval_every);
  std::vector<std::vector<double>> q(graph.nodes.size());
  for (size_t n = 0; n < graph.nodes.size(); ++n) {
    q[n].assign(graph.nodes[n].edges.size(), 0.0);
  }

  QLearningResult result;
  const auto start = std::chrono::steady_clock::now();
  const auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };
  const auto evaluate = [&](int64_t episode) {
    JointPolicy greedy = GreedyPolicyFromQ(tree, graph, q);
    const double value = EvaluateJointPolicy(tree, greedy);
    result.best_greedy_value = std::max(result.best_greedy_value, value);
    result.curve.push_back({episode, value, result.best_greedy_value,
                            wall_ms()});
    return value;
  };
  result.best_greedy_value = -kInf;
  evaluate(0);

  std::vector<double> child_probs;
  for (int64_t episode = 0; episode < config.episodes; ++episode) {
    const double epsilon =
        config.initial_epsilon *
        std::max(0.0, 1.0 - static_cast<double>(episode) / eps_decay);
    const double alpha =
        config.initial_alpha *
        std::max(0.0, 1.0 - static_cast<double>(episode) / alpha_decay);
    int n = graph.root();
    while (!graph.nodes[n].terminal && !graph.nodes[n].edges.empty()) {
      const auto& edges = graph.nodes[n].edges;
      size_t e;
      if (rng->UniformDouble() < epsilon) {
        e = static_cast<size_t>(rng->UniformInt(
            static_cast<int>(edges.size())));
      } else {
        e = 0;
        for (size_t k = 1; k < edges.size(); ++k) {
          if (q[n][k] > q[n][e]) e = k;
        }
      }
      child_probs.clear();
      for (const auto& [child, prob] : edges[e].children) {
        child_probs.push_back(prob);
      }
      const int pick = rng->SampleIndex(child_probs);
      const int child = edges[e].children[pick].first;
      double bootstrap = 0.0;
      if (!graph.nodes[child].terminal && !q[child].empty()) {
        bootstrap = *std::max_element(q[child].begin(), q[child].end());
      }
      q[n][e] += alpha * (edges[e].reward + bootstrap - q[n][e]);
      n = child;
    }
    if ((episode + 1) % eval_every == 0 ||
        episode + 1 == config.episodes) {
      result.final_greedy_value = evaluate(episode + 1);
    }
  }
  if (config.episodes == 0) {
    result.final_greedy_value = result.curve.back().greedy_value;
  }
  result.final_greedy_policy = GreedyPolicyFromQ(tree, graph, q);
  return result;
}

std::map<std::string, double> ReadOracleGolden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle file: " + path);
  std::map<std::string, double> values;
  std::string name;
  double value;
  while (in >> name >> value) values[name] = value;
  return values;
}

void WriteOracleGolden(const std::string& path,
                       const std::map<std::string, double>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write oracle file: " + path);
  char buffer[64];
  for (const auto& [name, value] : values) {
    std::snprintf(buffer, sizeof(buffer), " %.9f\n", value);
    out << name << buffer;
  }
}

}  // namespace pubmdp
