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

#ifndef PUBMDP_HARNESS_H_
#define PUBMDP_HARNESS_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pubmdp/exact.h"
#include "pubmdp/game_tree.h"

namespace pubmdp {

// Rejected configuration (unknown game or algorithm, malformed file, bad
// value, unwritable output location). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string game;
  std::string algorithm;
  std::vector<uint64_t> seeds;
  int64_t episodes = -1;
  int64_t eval_every = 100;
  std::string out_dir;
  int workers = 0;  // 0 picks the hardware thread count
  bool has_oracle_override = false;
  double oracle_override = 0.0;
  // The algorithm's [section] block, keys specific to the algorithm.
  std::map<std::string, std::string> options;
};

// Flat key=value configuration with '#' comments and one optional
// [algorithm] section whose name must match the chosen algorithm. Top-level
// keys: game, algorithm, seeds (count or comma list), episodes, eval_every,
// out_dir, workers, oracle. Throws ConfigError on malformed input.
ExperimentConfig ParseConfigText(const std::string& text);
ExperimentConfig ParseConfigFile(const std::string& path);

// Names accepted in ExperimentConfig::algorithm. An actor-critic baseline
// slot is deliberately absent; nothing pins down its tabular mechanics, so
// shipping one would misrepresent what it reproduces.
const std::vector<std::string>& RegisteredAlgorithms();

// Exact optimal value used for solve rates: the configured override when
// present, else the constructive optimum for trading games with enough
// utterances to name every item, else backward induction. Throws
// ConfigError when none applies.
double OracleValue(const GameTree& tree, const ExperimentConfig& config);

struct SeedRun {
  uint64_t seed = 0;
  std::vector<CurvePoint> curve;
  double best_value = 0.0;
  double final_value = 0.0;
};

struct ExperimentResult {
  double oracle = 0.0;
  std::vector<SeedRun> runs;  // in config seed order
  double best_min = 0.0;
  double best_median = 0.0;
  double best_max = 0.0;
  double best_mean = 0.0;
  double solve_rate = 0.0;  // fraction of seeds with best >= oracle - 1e-9
  std::string summary_path;
};

// Runs every seed (dispatched to a worker pool), writes one curve CSV per
// seed (header seed,episode,greedy_value,best_value,wall_ms) and one
// summary JSON into out_dir. Everything except the wall_ms column is
// byte-reproducible from the config.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Folds every summary JSON directly inside `in_dir` into one long-format
// CSV (game,algorithm,statistic,value): five statistic rows per summary
// plus one oracle row per game. Throws ConfigError when no summary is
// found.
void EmitPlotData(const std::string& in_dir, const std::string& out_path);

}  // namespace pubmdp

#endif  // PUBMDP_HARNESS_H_
