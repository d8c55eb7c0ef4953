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

#include "pubmdp/capi.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pubmdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void ValidateCapiConfig(const CapiConfig& config) {
  if (config.rollouts < 1) {
    throw std::invalid_argument("rollouts must be at least 1");
  }
  if (config.epsilon < 0.0 || config.epsilon > 1.0) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (config.max_episode_decisions < 1) {
    throw std::invalid_argument("max_episode_decisions must be positive");
  }
}

std::vector<int> FlattenPrescription(const PrescriptionVector& prescription) {
  std::vector<int> flat;
  for (const auto& player_rows : prescription.actions) {
    flat.insert(flat.end(), player_rows.begin(), player_rows.end());
  }
  return flat;
}

uint64_t HashBytes(const void* data, size_t n, uint64_t hash = 1469598103934665603ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string ToHex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes.size());
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

std::string FromHex(const std::string& hex) {
  const auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw std::runtime_error("malformed hex key in checkpoint");
  };
  if (hex.size() % 2 != 0) {
    throw std::runtime_error("malformed hex key in checkpoint");
  }
  std::string out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  }
  return out;
}

PolicyRows UniformRows(const GameTree& tree, int public_state) {
  const PublicState& ps = tree.public_state(public_state);
  PolicyRows rows(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    rows[p].resize(ps.info_states[p].size());
    for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
      const size_t n = tree.info_state(p, ps.info_states[p][r]).legal.size();
      rows[p][r].assign(n, 1.0 / static_cast<double>(n));
    }
  }
  return rows;
}

}  // namespace

double PrescriptionProbability(const PolicyRows& rows,
                               const PrescriptionVector& prescription) {
  double probability = 1.0;
  for (size_t p = 0; p < rows.size(); ++p) {
    for (size_t r = 0; r < rows[p].size(); ++r) {
      probability *= rows[p][r][prescription.actions[p][r]];
    }
  }
  return probability;
}

std::vector<PrescriptionVector> AcquirePrescriptionVectors(
    const PolicyRows& rows, int k, AcquisitionMode mode, RandomStream* rng,
    uint64_t enumerate_cap) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  struct Slot {
    int player;
    int row;
  };
  std::vector<Slot> slots;
  for (size_t p = 0; p < rows.size(); ++p) {
    for (size_t r = 0; r < rows[p].size(); ++r) {
      if (rows[p][r].empty()) {
        throw std::invalid_argument("policy row without actions");
      }
      slots.push_back({static_cast<int>(p), static_cast<int>(r)});
    }
  }
  const auto make_vector = [&](const std::function<int(const Slot&)>& pick) {
    PrescriptionVector v;
    v.actions.resize(rows.size());
    for (size_t p = 0; p < rows.size(); ++p) {
      v.actions[p].assign(rows[p].size(), 0);
    }
    for (const Slot& slot : slots) {
      v.actions[slot.player][slot.row] = pick(slot);
    }
    return v;
  };

  std::vector<PrescriptionVector> out;
  switch (mode) {
    case AcquisitionMode::kSample: {
      std::set<std::vector<int>> seen;
      for (int draw = 0; draw < k; ++draw) {
        PrescriptionVector v = make_vector([&](const Slot& slot) {
          return rng->SampleIndex(rows[slot.player][slot.row]);
        });
        if (seen.insert(FlattenPrescription(v)).second) {
          out.push_back(std::move(v));
        }
      }
      break;
    }
    case AcquisitionMode::kMostLikely: {
      // Per slot, actions sorted by descending probability (ties by lower
      // index). Candidates are rank vectors into these sorted lists,
      // expanded best first; a candidate's probability is recomputed from
      // scratch in slot order so it matches direct multiplication bitwise.
      std::vector<std::vector<int>> order(slots.size());
      for (size_t i = 0; i < slots.size(); ++i) {
        const auto& row = rows[slots[i].player][slots[i].row];
        order[i].resize(row.size());
        for (size_t a = 0; a < row.size(); ++a) order[i][a] = static_cast<int>(a);
        std::stable_sort(order[i].begin(), order[i].end(),
                         [&row](int a, int b) { return row[a] > row[b]; });
      }
      struct Candidate {
        double probability;
        std::vector<int> actions;  // legal indices, slot order
        std::vector<int> ranks;
      };
      const auto worse = [](const Candidate& a, const Candidate& b) {
        if (a.probability != b.probability) {
          return a.probability < b.probability;
        }
        return a.actions > b.actions;
      };
      const auto build = [&](std::vector<int> ranks) {
        Candidate c;
        c.actions.resize(slots.size());
        c.probability = 1.0;
        for (size_t i = 0; i < slots.size(); ++i) {
          c.actions[i] = order[i][ranks[i]];
          c.probability *= rows[slots[i].player][slots[i].row][c.actions[i]];
        }
        c.ranks = std::move(ranks);
        return c;
      };
      std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)>
          frontier(worse);
      std::set<std::vector<int>> visited;
      std::vector<int> zero(slots.size(), 0);
      visited.insert(zero);
      frontier.push(build(zero));
      while (!frontier.empty() && static_cast<int>(out.size()) < k) {
        Candidate top = frontier.top();
        frontier.pop();
        PrescriptionVector v;
        v.actions.resize(rows.size());
        for (size_t p = 0; p < rows.size(); ++p) {
          v.actions[p].assign(rows[p].size(), 0);
        }
        for (size_t i = 0; i < slots.size(); ++i) {
          v.actions[slots[i].player][slots[i].row] = top.actions[i];
        }
        out.push_back(std::move(v));
        for (size_t i = 0; i < slots.size(); ++i) {
          if (top.ranks[i] + 1 >=
              static_cast<int>(rows[slots[i].player][slots[i].row].size())) {
            continue;
          }
          std::vector<int> next = top.ranks;
          ++next[i];
          if (visited.insert(next).second) frontier.push(build(std::move(next)));
        }
      }
      break;
    }
    case AcquisitionMode::kEnumerateAll: {
      uint64_t total = 1;
      for (const Slot& slot : slots) {
        const uint64_t n = rows[slot.player][slot.row].size();
        if (total > enumerate_cap / n) {
          throw std::runtime_error("prescription enumeration exceeds cap");
        }
        total *= n;
      }
      std::vector<int> digits(slots.size(), 0);
      for (uint64_t index = 0; index < total; ++index) {
        size_t i = 0;
        out.push_back(make_vector([&](const Slot&) { return digits[i++]; }));
        for (size_t slot = slots.size(); slot-- > 0;) {
          if (++digits[slot] <
              static_cast<int>(rows[slots[slot].player][slots[slot].row].size())) {
            break;
          }
          digits[slot] = 0;
        }
      }
      break;
    }
  }
  return out;
}

AssessResult Assess(const GameTree& tree, const PublicBelief& belief,
                    const PrescriptionVector& prescription, CapiModel* model) {
  AssessResult result;
  result.step =
      ExpandStep(tree, belief, prescription, /*skip_terminal_next=*/true);
  result.q = result.step.expected_reward;
  for (size_t o = 0; o < result.step.observations.size(); ++o) {
    if (result.step.next_terminal[o]) continue;
    result.q +=
        result.step.probabilities[o] * model->Value(result.step.next_beliefs[o]);
  }
  return result;
}

ActResult Act(const GameTree& tree, const PublicBelief& belief,
              CapiModel* model, const CapiConfig& config, bool explore,
              RandomStream* rng) {
  ValidateCapiConfig(config);
  PolicyRows rows = model->Policy(belief);
  if (explore && config.structured_rows) {
    int total_rows = 0;
    for (const auto& player_rows : rows) {
      total_rows += static_cast<int>(player_rows.size());
    }
    int pick = rng->UniformInt(total_rows);
    for (auto& player_rows : rows) {
      if (pick >= static_cast<int>(player_rows.size())) {
        pick -= static_cast<int>(player_rows.size());
        continue;
      }
      auto& row = player_rows[pick];
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
      break;
    }
  }

  ActResult result;
  result.explored = explore;
  result.assessed = AcquirePrescriptionVectors(
      rows, config.rollouts, config.acquisition, rng, config.enumerate_cap);
  result.q.resize(result.assessed.size());
  AssessResult best;
  double best_q = -kInf;
  for (size_t i = 0; i < result.assessed.size(); ++i) {
    AssessResult assessed = Assess(tree, belief, result.assessed[i], model);
    result.q[i] = assessed.q;
    if (assessed.q > best_q) {
      best_q = assessed.q;
      best = std::move(assessed);
      result.argmax_index = static_cast<int>(i);
    }
  }
  result.entry.belief = belief;
  result.entry.prescription = result.assessed[result.argmax_index];
  result.entry.value = best_q;

  result.executed_index = result.argmax_index;
  if (explore && !config.structured_rows) {
    result.executed_index =
        rng->UniformInt(static_cast<int>(result.assessed.size()));
  }
  if (result.executed_index == result.argmax_index) {
    result.executed_step = std::move(best.step);
  } else {
    result.executed_step =
        Assess(tree, belief, result.assessed[result.executed_index], model)
            .step;
  }
  return result;
}

EpisodeResult RunEpisode(const GameTree& tree, CapiModel* model,
                         const CapiConfig& config, RandomStream* rng) {
  ValidateCapiConfig(config);
  int64_t explore_at = -1;
  if (config.exploration == ExplorationMode::kOncePerEpisode) {
    // Probe pass on a copy of the stream: the real pass consumes the same
    // draws up to the exploring decision, so that decision index exists.
    RandomStream probe_rng = *rng;
    CapiConfig probe = config;
    probe.exploration = ExplorationMode::kNone;
    EpisodeResult counted = RunEpisode(tree, model, probe, &probe_rng);
    if (counted.decisions > 0) {
      explore_at = probe_rng.UniformInt(static_cast<int>(counted.decisions));
    }
  }

  EpisodeResult result;
  std::function<void(const PublicBelief&)> visit =
      [&](const PublicBelief& belief) {
        if (result.decisions >= config.max_episode_decisions) {
          throw std::runtime_error("episode exceeds the decision cap");
        }
        bool explore = false;
        switch (config.exploration) {
          case ExplorationMode::kEpsilonGreedy:
            explore = rng->UniformDouble() < config.epsilon;
            break;
          case ExplorationMode::kOncePerEpisode:
            explore = result.decisions == explore_at;
            break;
          case ExplorationMode::kNone:
            break;
        }
        ActResult act = Act(tree, belief, model, config, explore, rng);
        ++result.decisions;
        result.entries.push_back(std::move(act.entry));
        for (size_t o = 0; o < act.executed_step.observations.size(); ++o) {
          if (!act.executed_step.next_terminal[o]) {
            visit(act.executed_step.next_beliefs[o]);
          }
        }
      };
  const PublicBelief root = InitialBelief(tree);
  if (!IsTerminalBelief(tree, root)) visit(root);
  return result;
}

GreedyTraversal GreedyJointPolicy(const GameTree& tree, CapiModel* model,
                                  const CapiConfig& config,
                                  RandomStream* rng) {
  GreedyTraversal result;
  result.policy = MakeFirstLegalPolicy(tree);
  std::function<double(const PublicBelief&)> visit =
      [&](const PublicBelief& belief) -> double {
    ActResult act = Act(tree, belief, model, config, /*explore=*/false, rng);
    const PublicState& ps = tree.public_state(belief.public_state);
    for (int p = 0; p < tree.num_players(); ++p) {
      for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
        auto& row = result.policy.rows[p][ps.info_states[p][r]];
        std::fill(row.begin(), row.end(), 0.0);
        row[act.entry.prescription.actions[p][r]] = 1.0;
      }
    }
    double value = act.executed_step.expected_reward;
    for (size_t o = 0; o < act.executed_step.observations.size(); ++o) {
      if (!act.executed_step.next_terminal[o]) {
        value += act.executed_step.probabilities[o] *
                 visit(act.executed_step.next_beliefs[o]);
      }
    }
    return value;
  };
  const PublicBelief root = InitialBelief(tree);
  if (!IsTerminalBelief(tree, root)) result.backed_up_value = visit(root);
  return result;
}

CapiRunResult RunCapiTraining(const GameTree& tree, CapiModel* model,
                              const CapiRunOptions& options,
                              RandomStream* rng) {
  const bool logging = !options.episode_log_path.empty();
  const int64_t eval_every =
      logging ? 1 : std::max<int64_t>(1, options.eval_every);
  std::ofstream log;
  if (logging) {
    log.open(options.episode_log_path);
    if (!log) {
      throw std::runtime_error("cannot write episode log: " +
                               options.episode_log_path);
    }
    log << "episode,greedy_return,buffer_size,wall_ms\n";
  }

  const auto start = std::chrono::steady_clock::now();
  const auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };
  const RandomStream eval_base = rng->Child("greedy-eval");

  CapiRunResult result;
  result.best_greedy_value = -kInf;
  double last_value = 0.0;
  const auto evaluate = [&](int64_t episode) {
    RandomStream eval_rng = eval_base;
    GreedyTraversal greedy =
        GreedyJointPolicy(tree, model, options.config, &eval_rng);
    last_value = EvaluateJointPolicy(tree, greedy.policy);
    result.best_greedy_value = std::max(result.best_greedy_value, last_value);
    result.curve.push_back(
        {episode, last_value, result.best_greedy_value, wall_ms()});
    result.final_greedy_value = last_value;
    result.final_greedy_policy = std::move(greedy.policy);
  };
  evaluate(0);

  char row[128];
  for (int64_t episode = 1; episode <= options.episodes; ++episode) {
    EpisodeResult ep = RunEpisode(tree, model, options.config, rng);
    const double loss = model->Train(ep.entries);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("training loss is not finite");
    }
    if (episode % eval_every == 0 || episode == options.episodes) {
      evaluate(episode);
    }
    if (logging) {
      std::snprintf(row, sizeof(row), "%lld,%.9f,%zu,%.3f\n",
                    static_cast<long long>(episode), last_value,
                    ep.entries.size(), wall_ms());
      log << row;
    }
  }
  return result;
}

TabularCapiModel::TabularCapiModel(const GameTree& tree,
                                   const TabularCapiConfig& config)
    : tree_(tree), config_(config) {
  if (config_.policy_floor < 0.0) {
    throw std::invalid_argument("policy floor must be nonnegative");
  }
  if (config_.policy_floor > 0.0) {
    for (int p = 0; p < tree.num_players(); ++p) {
      for (const InfoState& info : tree.info_states(p)) {
        if (!info.legal.empty() &&
            config_.policy_floor >= 1.0 / static_cast<double>(info.legal.size())) {
          throw std::invalid_argument(
              "policy floor must be below one over the row width");
        }
      }
    }
  }
  policy_.resize(tree.public_states().size());
}

const PolicyRows& TabularCapiModel::RowsFor(int public_state) {
  PolicyRows& rows = policy_[public_state];
  if (rows.empty()) rows = UniformRows(tree_, public_state);
  return rows;
}

PolicyRows TabularCapiModel::Policy(const PublicBelief& belief) {
  return RowsFor(belief.public_state);
}

double TabularCapiModel::Value(const PublicBelief& belief) {
  if (IsTerminalBelief(tree_, belief)) return 0.0;
  const auto it = values_.find(BeliefKeyBytes(tree_, belief));
  return it == values_.end() ? config_.default_value : it->second;
}

namespace {

// Raises every probability to the floor, shrinking the rest proportionally.
// Entries once pinned to the floor stay pinned; with floor < 1/n the largest
// entry always survives unpinned, so the loop terminates.
void ApplyPolicyFloor(std::vector<double>* row, double floor) {
  double sum = 0.0;
  for (double x : *row) sum += x;
  for (double& x : *row) x /= sum;
  if (floor <= 0.0) return;
  const int n = static_cast<int>(row->size());
  std::vector<char> pinned(n, 0);
  for (;;) {
    int num_pinned = 0;
    double unpinned_mass = 0.0;
    for (int i = 0; i < n; ++i) {
      if (pinned[i]) {
        ++num_pinned;
      } else {
        unpinned_mass += (*row)[i];
      }
    }
    const double scale = (1.0 - floor * num_pinned) / unpinned_mass;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      if (!pinned[i] && (*row)[i] * scale < floor) {
        pinned[i] = 1;
        changed = true;
      }
    }
    if (!changed) {
      for (int i = 0; i < n; ++i) {
        (*row)[i] = pinned[i] ? floor : (*row)[i] * scale;
      }
      return;
    }
  }
}

}  // namespace

double TabularCapiModel::Train(const std::vector<BufferEntry>& buffer) {
  if (buffer.empty()) throw std::invalid_argument("empty training buffer");
  double loss = 0.0;
  for (const BufferEntry& entry : buffer) {
    std::string key = BeliefKeyBytes(tree_, entry.belief);
    auto [it, inserted] = values_.try_emplace(key, config_.default_value);
    const double error = entry.value - it->second;
    loss += error * error;
    it->second += config_.value_learning_rate * error;

    PolicyRows& rows = policy_[entry.belief.public_state];
    if (rows.empty()) rows = UniformRows(tree_, entry.belief.public_state);
    for (size_t p = 0; p < rows.size(); ++p) {
      for (size_t r = 0; r < rows[p].size(); ++r) {
        auto& row = rows[p][r];
        const int target = entry.prescription.actions[p][r];
        for (size_t a = 0; a < row.size(); ++a) {
          const double onehot = static_cast<int>(a) == target ? 1.0 : 0.0;
          row[a] += config_.policy_learning_rate * (onehot - row[a]);
        }
        ApplyPolicyFloor(&row, config_.policy_floor);
      }
    }
  }
  return loss / static_cast<double>(buffer.size());
}

void TabularCapiModel::Save(std::ostream& out) const {
  uint64_t hash = HashBytes(&config_.value_learning_rate, sizeof(double));
  hash = HashBytes(&config_.policy_learning_rate, sizeof(double), hash);
  hash = HashBytes(&config_.policy_floor, sizeof(double), hash);
  hash = HashBytes(&config_.default_value, sizeof(double), hash);
  out << "tabular 1 " << hash << '\n';
  std::vector<const std::pair<const std::string, double>*> entries;
  entries.reserve(values_.size());
  for (const auto& kv : values_) entries.push_back(&kv);
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  out << "values " << entries.size() << '\n';
  char buffer[64];
  for (const auto* kv : entries) {
    std::snprintf(buffer, sizeof(buffer), " %.17g\n", kv->second);
    out << ToHex(kv->first) << buffer;
  }
  int touched = 0;
  for (const PolicyRows& rows : policy_) {
    if (!rows.empty()) ++touched;
  }
  out << "policy " << touched << '\n';
  for (size_t ps = 0; ps < policy_.size(); ++ps) {
    if (policy_[ps].empty()) continue;
    out << ps << '\n';
    for (const auto& player_rows : policy_[ps]) {
      for (const auto& row : player_rows) {
        for (size_t a = 0; a < row.size(); ++a) {
          std::snprintf(buffer, sizeof(buffer), a == 0 ? "%.17g" : " %.17g",
                        row[a]);
          out << buffer;
        }
        out << '\n';
      }
    }
  }
}

void TabularCapiModel::Load(std::istream& in) {
  std::string magic;
  int version = 0;
  uint64_t hash = 0;
  in >> magic >> version >> hash;
  if (!in || magic != "tabular" || version != 1) {
    throw std::runtime_error("unrecognized tabular checkpoint");
  }
  uint64_t expected = HashBytes(&config_.value_learning_rate, sizeof(double));
  expected = HashBytes(&config_.policy_learning_rate, sizeof(double), expected);
  expected = HashBytes(&config_.policy_floor, sizeof(double), expected);
  expected = HashBytes(&config_.default_value, sizeof(double), expected);
  if (hash != expected) {
    throw std::runtime_error("checkpoint was written under another config");
  }
  std::string section;
  size_t count = 0;
  in >> section >> count;
  if (!in || section != "values") {
    throw std::runtime_error("malformed tabular checkpoint");
  }
  values_.clear();
  for (size_t i = 0; i < count; ++i) {
    std::string hex;
    double value;
    in >> hex >> value;
    values_[FromHex(hex)] = value;
  }
  in >> section >> count;
  if (!in || section != "policy") {
    throw std::runtime_error("malformed tabular checkpoint");
  }
  for (PolicyRows& rows : policy_) rows.clear();
  for (size_t i = 0; i < count; ++i) {
    int ps = -1;
    in >> ps;
    if (!in || ps < 0 || static_cast<size_t>(ps) >= policy_.size()) {
      throw std::runtime_error("malformed tabular checkpoint");
    }
    PolicyRows rows = UniformRows(tree_, ps);
    for (auto& player_rows : rows) {
      for (auto& row : player_rows) {
        for (double& x : row) in >> x;
      }
    }
    policy_[ps] = std::move(rows);
  }
  if (!in) throw std::runtime_error("truncated tabular checkpoint");
}

namespace {

uint64_t NeuralConfigHash(const NeuralCapiConfig& config) {
  uint64_t hash = HashBytes(&config.hidden_layers, sizeof(int));
  hash = HashBytes(&config.hidden_units, sizeof(int), hash);
  hash = HashBytes(&config.learning_rate, sizeof(double), hash);
  hash = HashBytes(&config.policy_loss_weight, sizeof(double), hash);
  const int squash = config.squash_value ? 1 : 0;
  hash = HashBytes(&squash, sizeof(int), hash);
  hash = HashBytes(&config.value_low, sizeof(double), hash);
  hash = HashBytes(&config.value_high, sizeof(double), hash);
  return hash;
}

}  // namespace

NeuralCapiModel::NeuralCapiModel(const GameTree& tree,
                                 const NeuralCapiConfig& config,
                                 RandomStream* rng)
    : tree_(tree),
      config_(config),
      encoder_(tree),
      net_([&] {
        num_actions_.resize(tree.num_players());
        player_logit_base_.resize(tree.num_players());
        int logits = 0;
        for (int p = 0; p < tree.num_players(); ++p) {
          num_actions_[p] = tree.game().num_actions(p);
          player_logit_base_[p] = logits;
          logits += tree.max_info_states_in_public(p) * num_actions_[p];
        }
        MlpConfig mlp;
        mlp.input_size = encoder_.input_size();
        mlp.logits_size = logits;
        mlp.hidden_layers = config.hidden_layers;
        mlp.hidden_units = config.hidden_units;
        mlp.learning_rate = config.learning_rate;
        mlp.adam_beta1 = config.adam_beta1;
        mlp.adam_beta2 = config.adam_beta2;
        mlp.adam_epsilon = config.adam_epsilon;
        return mlp;
      }(),
           rng) {
  if (config_.squash_value && config_.value_high <= config_.value_low) {
    throw std::invalid_argument("value squash range is empty");
  }
}

double NeuralCapiModel::SquashValue(double raw) const {
  if (!config_.squash_value) return raw;
  return config_.value_low + (config_.value_high - config_.value_low) /
                                 (1.0 + std::exp(-raw));
}

PolicyRows NeuralCapiModel::RowsFromLogits(const Eigen::VectorXd& logits,
                                           const PublicState& ps) const {
  PolicyRows rows(tree_.num_players());
  for (int p = 0; p < tree_.num_players(); ++p) {
    rows[p].resize(ps.info_states[p].size());
    for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
      const auto& legal = tree_.info_state(p, ps.info_states[p][r]).legal;
      const int base = LogitBase(p, static_cast<int>(r));
      double max_logit = -kInf;
      for (ActionId a : legal) max_logit = std::max(max_logit, logits[base + a]);
      auto& row = rows[p][r];
      row.resize(legal.size());
      double total = 0.0;
      for (size_t j = 0; j < legal.size(); ++j) {
        row[j] = std::exp(logits[base + legal[j]] - max_logit);
        total += row[j];
      }
      for (double& x : row) x /= total;
    }
  }
  return rows;
}

PolicyRows NeuralCapiModel::Policy(const PublicBelief& belief) {
  TwoHeadMlp::Activation act;
  net_.Forward(encoder_.Encode(belief), &act);
  return RowsFromLogits(act.logits, tree_.public_state(belief.public_state));
}

double NeuralCapiModel::Value(const PublicBelief& belief) {
  if (IsTerminalBelief(tree_, belief)) return 0.0;
  TwoHeadMlp::Activation act;
  net_.Forward(encoder_.Encode(belief), &act);
  return SquashValue(act.value_raw);
}

double NeuralCapiModel::BatchLossAndGradient(
    const std::vector<BufferEntry>& buffer) {
  if (buffer.empty()) throw std::invalid_argument("empty training buffer");
  net_.StartBatch();
  const double n = static_cast<double>(buffer.size());
  const double range = config_.value_high - config_.value_low;
  double loss = 0.0;
  TwoHeadMlp::Activation act;
  Eigen::VectorXd dlogits(net_.config().logits_size);
  for (const BufferEntry& entry : buffer) {
    net_.Forward(encoder_.Encode(entry.belief), &act);
    const double value = SquashValue(act.value_raw);
    const double error = value - entry.value;
    loss += error * error / n;
    double dvalue_raw = 2.0 * error / n;
    if (config_.squash_value) {
      const double sigmoid = (value - config_.value_low) / range;
      dvalue_raw *= range * sigmoid * (1.0 - sigmoid);
    }

    dlogits.setZero();
    const PublicState& ps = tree_.public_state(entry.belief.public_state);
    const double policy_scale = config_.policy_loss_weight / n;
    for (int p = 0; p < tree_.num_players(); ++p) {
      for (size_t r = 0; r < ps.info_states[p].size(); ++r) {
        const auto& legal = tree_.info_state(p, ps.info_states[p][r]).legal;
        const int base = LogitBase(p, static_cast<int>(r));
        double max_logit = -kInf;
        for (ActionId a : legal) {
          max_logit = std::max(max_logit, act.logits[base + a]);
        }
        double total = 0.0;
        for (ActionId a : legal) {
          total += std::exp(act.logits[base + a] - max_logit);
        }
        const int target = entry.prescription.actions[p][r];
        const double target_logit = act.logits[base + legal[target]];
        loss += policy_scale * (std::log(total) - (target_logit - max_logit));
        for (size_t j = 0; j < legal.size(); ++j) {
          const double prob =
              std::exp(act.logits[base + legal[j]] - max_logit) / total;
          dlogits[base + legal[j]] +=
              policy_scale *
              (prob - (static_cast<int>(j) == target ? 1.0 : 0.0));
        }
      }
    }
    net_.Backward(act, dvalue_raw, dlogits);
  }
  return loss;
}

double NeuralCapiModel::BatchLoss(const std::vector<BufferEntry>& buffer) {
  return BatchLossAndGradient(buffer);
}

double NeuralCapiModel::Train(const std::vector<BufferEntry>& buffer) {
  const double loss = BatchLossAndGradient(buffer);
  net_.AdamStep();
  return loss;
}

void NeuralCapiModel::Save(std::ostream& out) const {
  out << "neural 1 " << NeuralConfigHash(config_) << '\n';
  net_.Save(out);
}

void NeuralCapiModel::Load(std::istream& in) {
  std::string magic;
  int version = 0;
  uint64_t hash = 0;
  in >> magic >> version >> hash;
  if (!in || magic != "neural" || version != 1) {
    throw std::runtime_error("unrecognized network checkpoint");
  }
  if (hash != NeuralConfigHash(config_)) {
    throw std::runtime_error("checkpoint was written under another config");
  }
  net_.Load(in);
}

InjectedValueModel::InjectedValueModel(
    const GameTree& tree, std::unordered_map<std::string, double> values)
    : tree_(tree), values_(std::move(values)) {}

PolicyRows InjectedValueModel::Policy(const PublicBelief& belief) {
  return UniformRows(tree_, belief.public_state);
}

double InjectedValueModel::Value(const PublicBelief& belief) {
  if (IsTerminalBelief(tree_, belief)) return 0.0;
  const auto it = values_.find(BeliefKeyBytes(tree_, belief));
  if (it == values_.end()) {
    throw std::runtime_error("injected value table is missing a belief");
  }
  return it->second;
}

double InjectedValueModel::Train(const std::vector<BufferEntry>&) {
  return 0.0;
}

void InjectedValueModel::Save(std::ostream&) const {
  throw std::runtime_error("injected model has no checkpoint form");
}

void InjectedValueModel::Load(std::istream&) {
  throw std::runtime_error("injected model has no checkpoint form");
}

}  // namespace pubmdp
