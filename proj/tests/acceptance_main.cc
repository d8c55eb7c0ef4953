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
//
// End-to-end release gate. Each numbered check prints one PASS or FAIL line
// with its measured margin; the process exits nonzero when any hard check
// fails. Check 7 is reported for the record but never gates the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "support/bayes_check.h"
#include "pubmdp/baselines.h"
#include "pubmdp/belief.h"
#include "pubmdp/capi.h"
#include "pubmdp/exact.h"
#include "pubmdp/game_tree.h"
#include "pubmdp/games.h"
#include "pubmdp/harness.h"
#include "pubmdp/net.h"
#include "pubmdp/rng.h"

namespace pubmdp {
namespace {

constexpr const char* kHanabi[] = {"tiny_hanabi:A", "tiny_hanabi:B",
                                   "tiny_hanabi:C", "tiny_hanabi:D",
                                   "tiny_hanabi:E", "tiny_hanabi:F"};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

bool Report(int number, bool ok, const char* what, const std::string& detail) {
  std::printf("[%s] %d %s (%s)\n", ok ? "PASS" : "FAIL", number, what,
              detail.c_str());
  std::fflush(stdout);
  return ok;
}

std::string Format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buffer[512];
  std::vsnprintf(buffer, sizeof(buffer), fmt, args);
  va_end(args);
  return buffer;
}

// 1. Exhaustive policy search and backward induction agree to 1e-9 on every
//    game small enough to enumerate, within one minute.
bool CheckSolverAgreement(std::map<std::string, double>* oracles) {
  auto start = std::chrono::steady_clock::now();
  double max_gap = 0.0;
  int games = 0;
  std::vector<std::string> names(kHanabi, kHanabi + 6);
  names.insert(names.end(),
               {"trade_comm:1x1", "trade_comm:2x2", "trade_comm:3x3"});
  for (const std::string& name : names) {
    GameTree tree = GameTree::Build(MakeGame(name));
    BackwardInductionResult bi = BackwardInduction(tree);
    BruteForceResult bf = BruteForceOptimal(tree);
    max_gap = std::max(max_gap, std::fabs(bi.root_value - bf.value));
    (*oracles)[name] = bi.root_value;
    ++games;
  }
  double elapsed = Seconds(start);
  return Report(1, max_gap <= 1e-9 && elapsed < 60.0,
                "exhaustive search equals backward induction",
                Format("%d games, max gap %.2e", games, max_gap) +
                    Format(", %.1fs of 60s", elapsed));
}

// 2. Tabular belief-MDP Q-learning with linearly decayed epsilon and alpha
//    solves every signalling variant on at least 30 of 32 seeds within a
//    200000 episode budget, all inside ten minutes.
bool CheckQLearning(const std::map<std::string, double>& oracles) {
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const char* name : kHanabi) {
    GameTree tree = GameTree::Build(MakeGame(name));
    BeliefGraph graph = BuildBeliefGraph(tree);
    QLearningConfig config;
    config.episodes = 200'000;
    config.eval_every = 1000;
    int solved = 0;
    for (uint64_t seed = 0; seed < 32; ++seed) {
      RandomStream rng(seed);
      QLearningResult result = PubMdpQLearning(tree, graph, config, &rng);
      if (result.best_greedy_value >= oracles.at(name) - 1e-9) ++solved;
    }
    if (!detail.empty()) detail += ' ';
    detail += Format("%s:%d/32", name + 12, solved);
    ok = ok && solved >= 30;
  }
  double elapsed = Seconds(start);
  return Report(2, ok && elapsed < 600.0,
                "belief-space Q-learning solves every signalling variant",
                detail + Format(", %.1fs of 600s", elapsed));
}

// 3. The tabular search stack solves the 4x4 trading game from scratch on at
//    least 30 of 32 seeds within 500 episodes and five minutes. The full-size
//    12x12 parametric run keeps the same pipeline but takes hours; its preset
//    lives in tools/configs and its expectations in the README.
bool CheckCapiGate() {
  auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  config.game = "trade_comm:4x4";
  config.algorithm = "capi_tabular";
  for (uint64_t seed = 0; seed < 32; ++seed) config.seeds.push_back(seed);
  config.episodes = 500;
  config.eval_every = 10;
  std::filesystem::path out =
      std::filesystem::temp_directory_path() / "pubmdp_acceptance_gate";
  std::filesystem::remove_all(out);
  config.out_dir = out.string();
  config.options["rollouts"] = "1000";
  config.options["epsilon"] = "0.25";
  config.options["policy_floor"] = "0.01";
  ExperimentResult result = RunExperiment(config);
  std::filesystem::remove_all(out);
  int solved = (int)std::lround(result.solve_rate * 32.0);
  double elapsed = Seconds(start);
  std::printf("[INFO] 3 the 12x12 preset is tools/configs/trade_comm_12x12_capi_neural.cfg; see README for its multi-hour budget\n");
  return Report(3, solved >= 30 && elapsed < 300.0,
                "prescription search solves the 4x4 trading game",
                Format("%d/32 seeds within 500 episodes, %.1fs of 300s",
                       solved, elapsed));
}

// 4. Every reachable belief update matches an independent Bayes filter to
//    1e-12, pointwise, within one minute.
bool CheckBeliefUpdates() {
  auto start = std::chrono::steady_clock::now();
  RandomStream rng(2026);
  double max_error = 0.0;
  int64_t posteriors = 0;
  std::vector<std::string> names(kHanabi, kHanabi + 6);
  names.push_back("trade_comm:3x3");
  for (const std::string& name : names) {
    GameTree tree = GameTree::Build(MakeGame(name));
    testing::BayesCheckStats stats =
        testing::CheckBayesConsistency(tree, 2048, 64, 1e-12, &rng);
    max_error = std::max(max_error, stats.max_error);
    posteriors += stats.posteriors_compared;
  }
  double elapsed = Seconds(start);
  return Report(4, max_error <= 1e-12 && elapsed < 60.0,
                "belief updates match an independent Bayes filter",
                Format("%lld posteriors, max error %.2e, %.1fs of 60s",
                       (long long)posteriors, max_error, elapsed));
}

PolicyRows RandomRows(RandomStream* rng) {
  PolicyRows rows(1 + rng->UniformInt(3));
  for (auto& player_rows : rows) {
    player_rows.resize(1 + rng->UniformInt(3));
    for (auto& row : player_rows) {
      row.resize(1 + rng->UniformInt(4));
      double total = 0.0;
      for (double& p : row) {
        p = 0.05 + rng->UniformDouble();
        total += p;
      }
      for (double& p : row) p /= total;
    }
  }
  return rows;
}

std::vector<PrescriptionVector> EnumerateRows(const PolicyRows& rows) {
  std::vector<int> radixes;
  for (const auto& player_rows : rows) {
    for (const auto& row : player_rows) radixes.push_back((int)row.size());
  }
  std::vector<PrescriptionVector> out;
  std::vector<int> digits(radixes.size(), 0);
  while (true) {
    PrescriptionVector prescription;
    prescription.actions.resize(rows.size());
    int slot = 0;
    for (size_t player = 0; player < rows.size(); ++player) {
      for (size_t row = 0; row < rows[player].size(); ++row) {
        prescription.actions[player].push_back(digits[slot++]);
      }
    }
    out.push_back(prescription);
    int i = (int)digits.size() - 1;
    while (i >= 0 && ++digits[i] == radixes[i]) digits[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

// 5. Best-first most-likely acquisition reproduces a sorted enumeration on
//    200 random row sets, and sampling matches the product measure to three
//    standard errors over 100000 draws.
bool CheckAcquisition() {
  RandomStream rng(55);
  int instances = 0;
  int rank_mismatches = 0;
  while (instances < 200) {
    PolicyRows rows = RandomRows(&rng);
    std::vector<PrescriptionVector> all = EnumerateRows(rows);
    if (all.size() > 10000) continue;
    ++instances;
    std::stable_sort(
        all.begin(), all.end(),
        [&](const PrescriptionVector& a, const PrescriptionVector& b) {
          return PrescriptionProbability(rows, a) >
                 PrescriptionProbability(rows, b);
        });
    int k = 1 + rng.UniformInt((int)all.size() + 3);
    std::vector<PrescriptionVector> got = AcquirePrescriptionVectors(
        rows, k, AcquisitionMode::kMostLikely, &rng);
    size_t expect = std::min<size_t>(k, all.size());
    if (got.size() != expect) {
      ++rank_mismatches;
      continue;
    }
    for (size_t i = 0; i < got.size(); ++i) {
      if (!(got[i] == all[i])) ++rank_mismatches;
    }
  }

  PolicyRows rows = {{{0.6, 0.4}}, {{0.2, 0.5, 0.3}}};
  const int draws = 100000;
  std::map<std::pair<int, int>, int> counts;
  for (int i = 0; i < draws; ++i) {
    std::vector<PrescriptionVector> one =
        AcquirePrescriptionVectors(rows, 1, AcquisitionMode::kSample, &rng);
    counts[{one[0].actions[0][0], one[0].actions[1][0]}]++;
  }
  double worst_sigma = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 3; ++b) {
      double p = rows[0][0][a] * rows[1][0][b];
      double freq = counts[{a, b}] / (double)draws;
      double se = std::sqrt(p * (1.0 - p) / draws);
      worst_sigma = std::max(worst_sigma, std::fabs(freq - p) / se);
    }
  }
  return Report(5, rank_mismatches == 0 && worst_sigma <= 3.0,
                "acquisition ranking and sampling match their definitions",
                Format("200 instances, %d rank mismatches, worst draw "
                       "deviation %.2f standard errors",
                       rank_mismatches, worst_sigma));
}

// 6. With exact values injected, one-ply search plays optimally everywhere:
//    the greedy traversal recovers the optimum in every signalling variant.
bool CheckInjectedOracle(const std::map<std::string, double>& oracles) {
  double max_gap = 0.0;
  for (const char* name : kHanabi) {
    GameTree tree = GameTree::Build(MakeGame(name));
    BackwardInductionResult oracle = BackwardInduction(tree);
    InjectedValueModel model(tree, oracle.values);
    CapiConfig config;
    config.acquisition = AcquisitionMode::kEnumerateAll;
    config.exploration = ExplorationMode::kNone;
    RandomStream rng(1);
    GreedyTraversal greedy = GreedyJointPolicy(tree, &model, config, &rng);
    double value = EvaluateJointPolicy(tree, greedy.policy);
    max_gap = std::max(max_gap, std::fabs(value - oracles.at(name)));
  }
  return Report(6, max_gap <= 1e-9,
                "injected exact values make one-ply search optimal",
                Format("6 games, max gap %.2e", max_gap));
}

// 7. Reported, never gating: independent learners miss the optimum on at
//    least one signalling game each, across 32 seeds.
void ReportBaselines(const std::map<std::string, double>& oracles) {
  const std::pair<BaselineAlgorithm, const char*> algorithms[] = {
      {BaselineAlgorithm::kIql, "iql"},
      {BaselineAlgorithm::kHql, "hql"},
      {BaselineAlgorithm::kVdn, "vdn"},
      {BaselineAlgorithm::kSad, "sad"}};
  const char* games[] = {"tiny_hanabi:C", "trade_comm:2x2", "trade_comm:3x3"};
  std::map<std::string, double> values = oracles;
  bool all_have_failures = true;
  std::string detail;
  for (const auto& [algorithm, label] : algorithms) {
    std::string misses;
    for (const char* name : games) {
      GameTree tree = GameTree::Build(MakeGame(name));
      int solved = 0;
      for (uint64_t seed = 0; seed < 32; ++seed) {
        BaselineConfig config;
        config.algorithm = algorithm;
        config.episodes = 20'000;
        config.eval_every = 500;
        config.initial_alpha = 0.2;
        config.hysteretic_beta =
            algorithm == BaselineAlgorithm::kHql ? 0.02 : 0.0;
        RandomStream rng(seed);
        BaselineResult result = TrainBaseline(tree, config, &rng);
        if (result.best_greedy_value >= values.at(name) - 1e-9) ++solved;
      }
      if (solved < 32) misses += Format(" %s:%d/32", name, solved);
    }
    if (misses.empty()) {
      all_have_failures = false;
      detail += Format(" %s:none", label);
    } else {
      detail += Format(" %s:%s", label, misses.c_str());
    }
  }
  std::printf("[%s] 7 every independent learner misses a signalling game "
              "(reported, not gated:%s)\n",
              all_have_failures ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

// 8. Analytic loss gradients match central finite differences to a relative
//    error of 1e-4 on 100 random inputs, both value-head variants.
bool CheckGradients() {
  GameTree tree = GameTree::Build(MakeGame("tiny_hanabi:E"));
  RandomStream rng(77);

  std::vector<PublicBelief> beliefs;
  std::vector<PublicBelief> stack = {InitialBelief(tree)};
  while (!stack.empty()) {
    PublicBelief belief = stack.back();
    stack.pop_back();
    beliefs.push_back(belief);
    for (const PrescriptionVector& prescription :
         EnumeratePrescriptionVectors(tree, belief)) {
      for (const PublicBelief& child :
           ExpandStep(tree, belief, prescription).next_beliefs) {
        if (!IsTerminalBelief(tree, child)) stack.push_back(child);
      }
    }
  }

  double worst = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    NeuralCapiConfig config;
    config.hidden_layers = 2;
    config.hidden_units = 24;
    config.policy_loss_weight = 0.5;
    config.squash_value = variant == 1;
    config.value_low = 0.0;
    config.value_high = 10.0;
    RandomStream init = rng.Child(variant == 0 ? "raw" : "squash");
    NeuralCapiModel model(tree, config, &init);
    for (int input = 0; input < 50; ++input) {
      BufferEntry entry;
      entry.belief = beliefs[rng.UniformInt((int)beliefs.size())];
      PrescriptionSpace space(tree, entry.belief, false);
      entry.prescription = space.Decode(rng.UniformInt((int)space.Count()));
      entry.value = 10.0 * rng.UniformDouble();
      std::vector<BufferEntry> batch = {entry};

      model.BatchLossAndGradient(batch);
      Eigen::VectorXd gradient = model.net().gradient();
      Eigen::VectorXd theta = model.net().parameters();
      const double h = 1e-6;
      for (int c = 0; c < 4; ++c) {
        int64_t i = rng.UniformInt((int)theta.size());
        Eigen::VectorXd shifted = theta;
        shifted[i] = theta[i] + h;
        model.net().SetParameters(shifted);
        double up = model.BatchLoss(batch);
        shifted[i] = theta[i] - h;
        model.net().SetParameters(shifted);
        double down = model.BatchLoss(batch);
        model.net().SetParameters(theta);
        double fd = (up - down) / (2.0 * h);
        double scale = std::max({1e-3, std::fabs(fd), std::fabs(gradient[i])});
        worst = std::max(worst, std::fabs(fd - gradient[i]) / scale);
      }
    }
  }
  return Report(8, worst <= 1e-4,
                "loss gradients match finite differences",
                Format("100 inputs, worst relative error %.2e", worst));
}

int Main() {
  std::map<std::string, double> oracles;
  int failures = 0;
  failures += !CheckSolverAgreement(&oracles);
  failures += !CheckQLearning(oracles);
  failures += !CheckCapiGate();
  failures += !CheckBeliefUpdates();
  failures += !CheckAcquisition();
  failures += !CheckInjectedOracle(oracles);
  ReportBaselines(oracles);
  failures += !CheckGradients();
  std::printf("%d hard check%s failed\n", failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace pubmdp

int main() { return pubmdp::Main(); }
