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

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pubmdp/games.h"
#include "pubmdp/harness.h"

namespace {

constexpr int kExitConfigError = 2;

int RunCommand(const std::string& config_path, const std::string& game,
               const std::string& algorithm, int64_t seeds, int64_t episodes,
               int64_t eval_every, const std::string& out_dir, int workers,
               const std::vector<std::string>& sets) {
  pubmdp::ExperimentConfig config;
  if (!config_path.empty()) {
    config = pubmdp::ParseConfigFile(config_path);
  }
  if (!game.empty()) config.game = game;
  if (!algorithm.empty()) config.algorithm = algorithm;
  if (seeds > 0) {
    config.seeds.clear();
    for (int64_t s = 0; s < seeds; ++s) config.seeds.push_back(s);
  }
  if (episodes >= 0) config.episodes = episodes;
  if (eval_every > 0) config.eval_every = eval_every;
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (workers > 0) config.workers = workers;
  for (const std::string& assignment : sets) {
    size_t equals = assignment.find('=');
    if (equals == std::string::npos) {
      throw pubmdp::ConfigError("--set expects key=value, got '" + assignment +
                                "'");
    }
    config.options[assignment.substr(0, equals)] =
        assignment.substr(equals + 1);
  }
  pubmdp::ExperimentResult result = pubmdp::RunExperiment(config);
  std::printf("%s %s: seeds %zu oracle %.9f\n", config.game.c_str(),
              config.algorithm.c_str(), config.seeds.size(), result.oracle);
  std::printf("best value: min %.9f median %.9f max %.9f mean %.9f\n",
              result.best_min, result.best_median, result.best_max,
              result.best_mean);
  std::printf("solve rate: %.4f\n", result.solve_rate);
  std::printf("summary: %s\n", result.summary_path.c_str());
  return 0;
}

int OracleCommand(const std::string& game) {
  pubmdp::ExperimentConfig config;
  config.game = game;
  pubmdp::GameTree tree = pubmdp::GameTree::Build(pubmdp::MakeGame(game));
  std::printf("%.9f\n", pubmdp::OracleValue(tree, config));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Solvers and learning baselines for common-payoff games");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a multi-seed experiment");
  std::string config_path, game, algorithm, out_dir;
  int64_t seeds = 0, episodes = -1, eval_every = 0;
  int workers = 0;
  std::vector<std::string> sets;
  run->add_option("--config", config_path, "Experiment config file");
  run->add_option("--game", game, "Game name, e.g. tiny_hanabi:A");
  run->add_option("--algo", algorithm, "Algorithm name");
  run->add_option("--seeds", seeds, "Number of seeds (0..N-1)");
  run->add_option("--episodes", episodes, "Training episode budget");
  run->add_option("--eval-every", eval_every, "Greedy evaluation cadence");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Worker thread count");
  run->add_option("--set", sets, "Algorithm option override, key=value");

  auto* oracle = app.add_subcommand("oracle", "Print a game's optimal value");
  std::string oracle_game;
  oracle->add_option("--game", oracle_game, "Game name")->required();

  auto* plot = app.add_subcommand("plot-data",
                                  "Fold summary JSONs into one long CSV");
  std::string in_dir, out_file;
  plot->add_option("--in", in_dir, "Directory of summary JSON files")
      ->required();
  plot->add_option("--out", out_file, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return RunCommand(config_path, game, algorithm, seeds, episodes,
                        eval_every, out_dir, workers, sets);
    }
    if (oracle->parsed()) return OracleCommand(oracle_game);
    pubmdp::EmitPlotData(in_dir, out_file);
    std::printf("wrote %s\n", out_file.c_str());
    return 0;
  } catch (const pubmdp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const pubmdp::GameDefinitionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
