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

#include "pubmdp/harness.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "json.hpp"
#include "pubmdp/baselines.h"
#include "pubmdp/capi.h"
#include "pubmdp/games.h"
#include "pubmdp/rng.h"

namespace pubmdp {
namespace {

constexpr double kSolveTolerance = 1e-9;

std::string Trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

int64_t ParseInt(const std::string& key, const std::string& value) {
  int64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" +
                      value + "'");
  }
  return out;
}

uint64_t ParseSeed(const std::string& value) {
  uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config key 'seeds' expects an unsigned integer, got '" +
                      value + "'");
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    double out = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" +
                      value + "'");
  }
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "' expects true or false, got '" +
                    value + "'");
}

// A count "N" expands to seeds 0..N-1; any value containing a comma is an
// explicit list (a trailing comma makes a one-element list).
std::vector<uint64_t> ParseSeeds(const std::string& value) {
  std::vector<uint64_t> seeds;
  if (value.find(',') == std::string::npos) {
    int64_t count = ParseInt("seeds", value);
    if (count < 1) throw ConfigError("seed count must be at least 1");
    for (int64_t s = 0; s < count; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream stream(value);
  std::string part;
  while (std::getline(stream, part, ',')) {
    part = Trim(part);
    if (part.empty()) continue;
    seeds.push_back(ParseSeed(part));
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

void SetTopLevelKey(ExperimentConfig* config, const std::string& key,
                    const std::string& value) {
  if (key == "game") {
    config->game = value;
  } else if (key == "algorithm") {
    config->algorithm = value;
  } else if (key == "seeds") {
    config->seeds = ParseSeeds(value);
  } else if (key == "episodes") {
    config->episodes = ParseInt(key, value);
  } else if (key == "eval_every") {
    config->eval_every = ParseInt(key, value);
  } else if (key == "out_dir") {
    config->out_dir = value;
  } else if (key == "workers") {
    config->workers = static_cast<int>(ParseInt(key, value));
  } else if (key == "oracle") {
    config->oracle_override = ParseDouble(key, value);
    config->has_oracle_override = true;
  } else {
    throw ConfigError("unknown top-level config key '" + key + "'");
  }
}

// Pulls typed values out of the algorithm section and rejects leftovers so
// misspelled keys fail instead of silently using defaults.
class OptionReader {
 public:
  explicit OptionReader(const std::map<std::string, std::string>& options)
      : remaining_(options) {}

  int64_t Int(const std::string& key, int64_t fallback) {
    auto it = remaining_.find(key);
    if (it == remaining_.end()) return fallback;
    int64_t value = ParseInt(key, it->second);
    remaining_.erase(it);
    return value;
  }

  double Double(const std::string& key, double fallback) {
    auto it = remaining_.find(key);
    if (it == remaining_.end()) return fallback;
    double value = ParseDouble(key, it->second);
    remaining_.erase(it);
    return value;
  }

  bool Bool(const std::string& key, bool fallback) {
    auto it = remaining_.find(key);
    if (it == remaining_.end()) return fallback;
    bool value = ParseBool(key, it->second);
    remaining_.erase(it);
    return value;
  }

  std::string Str(const std::string& key, const std::string& fallback) {
    auto it = remaining_.find(key);
    if (it == remaining_.end()) return fallback;
    std::string value = it->second;
    remaining_.erase(it);
    return value;
  }

  void Finish(const std::string& algorithm) const {
    if (remaining_.empty()) return;
    throw ConfigError("unknown option '" + remaining_.begin()->first +
                      "' for algorithm " + algorithm);
  }

 private:
  std::map<std::string, std::string> remaining_;
};

CapiConfig ReadCapiOptions(OptionReader* reader) {
  CapiConfig config;
  config.rollouts = static_cast<int>(reader->Int("rollouts", config.rollouts));
  std::string acquisition = reader->Str("acquisition", "sample");
  if (acquisition == "sample") {
    config.acquisition = AcquisitionMode::kSample;
  } else if (acquisition == "k_most_likely") {
    config.acquisition = AcquisitionMode::kMostLikely;
  } else if (acquisition == "enumerate_all") {
    config.acquisition = AcquisitionMode::kEnumerateAll;
  } else {
    throw ConfigError("unknown acquisition mode '" + acquisition + "'");
  }
  std::string exploration = reader->Str("exploration", "epsilon_greedy");
  if (exploration == "epsilon_greedy") {
    config.exploration = ExplorationMode::kEpsilonGreedy;
  } else if (exploration == "once_per_episode") {
    config.exploration = ExplorationMode::kOncePerEpisode;
  } else if (exploration == "none") {
    config.exploration = ExplorationMode::kNone;
  } else {
    throw ConfigError("unknown exploration mode '" + exploration + "'");
  }
  config.epsilon = reader->Double("epsilon", config.epsilon);
  config.structured_rows =
      reader->Bool("structured_rows", config.structured_rows);
  config.enumerate_cap = static_cast<uint64_t>(
      reader->Int("enumerate_cap", static_cast<int64_t>(config.enumerate_cap)));
  config.max_episode_decisions =
      reader->Int("max_episode_decisions", config.max_episode_decisions);
  return config;
}

using SeedRunner = std::function<SeedRun(uint64_t)>;

SeedRun FromCurve(uint64_t seed, std::vector<CurvePoint> curve, double best,
                  double final_value) {
  SeedRun run;
  run.seed = seed;
  run.curve = std::move(curve);
  run.best_value = best;
  run.final_value = final_value;
  return run;
}

SeedRunner BuildRunner(const GameTree& tree, const ExperimentConfig& config) {
  OptionReader reader(config.options);
  const std::string& name = config.algorithm;
  if (name == "pubmdp_q") {
    QLearningConfig learn;
    learn.episodes = config.episodes;
    learn.eval_every = config.eval_every;
    learn.initial_epsilon = reader.Double("initial_epsilon", 1.0);
    learn.initial_alpha = reader.Double("initial_alpha", 0.5);
    learn.epsilon_decay_episodes = reader.Int("epsilon_decay_episodes", 0);
    learn.alpha_decay_episodes = reader.Int("alpha_decay_episodes", 0);
    int64_t prescription_cap = reader.Int("prescription_cap", 1'000'000);
    int64_t node_cap = reader.Int("node_cap", 1'000'000);
    reader.Finish(name);
    std::shared_ptr<BeliefGraph> graph;
    try {
      graph = std::make_shared<BeliefGraph>(
          BuildBeliefGraph(tree, prescription_cap, node_cap));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("cannot build belief graph for ") +
                        config.game + ": " + e.what());
    }
    return [&tree, graph, learn](uint64_t seed) {
      RandomStream root(seed);
      RandomStream train = root.Child("train");
      QLearningResult result = PubMdpQLearning(tree, *graph, learn, &train);
      return FromCurve(seed, std::move(result.curve), result.best_greedy_value,
                       result.final_greedy_value);
    };
  }
  if (name == "capi_tabular" || name == "capi_neural") {
    CapiRunOptions options;
    options.episodes = config.episodes;
    options.eval_every = config.eval_every;
    options.config = ReadCapiOptions(&reader);
    bool episode_log = reader.Bool("episode_log", false);
    if (name == "capi_tabular") {
      TabularCapiConfig model_config;
      model_config.value_learning_rate =
          reader.Double("value_learning_rate", 1.0);
      model_config.policy_learning_rate =
          reader.Double("policy_learning_rate", 1.0);
      model_config.policy_floor = reader.Double("policy_floor", 0.0);
      model_config.default_value = reader.Double("default_value", 0.0);
      reader.Finish(name);
      std::string out_dir = config.out_dir;
      return [&tree, options, model_config, episode_log,
              out_dir](uint64_t seed) {
        CapiRunOptions seed_options = options;
        if (episode_log) {
          seed_options.episode_log_path =
              out_dir + "/episodes_seed_" + std::to_string(seed) + ".csv";
        }
        TabularCapiModel model(tree, model_config);
        RandomStream root(seed);
        RandomStream train = root.Child("train");
        CapiRunResult result =
            RunCapiTraining(tree, &model, seed_options, &train);
        return FromCurve(seed, std::move(result.curve),
                         result.best_greedy_value, result.final_greedy_value);
      };
    }
    NeuralCapiConfig model_config;
    model_config.hidden_layers =
        static_cast<int>(reader.Int("hidden_layers", 3));
    model_config.hidden_units =
        static_cast<int>(reader.Int("hidden_units", 256));
    model_config.learning_rate = reader.Double("learning_rate", 1e-4);
    model_config.policy_loss_weight =
        reader.Double("policy_loss_weight", 0.01);
    model_config.squash_value = reader.Bool("squash_value", false);
    model_config.value_low = reader.Double("value_low", 0.0);
    model_config.value_high = reader.Double("value_high", 1.0);
    reader.Finish(name);
    std::string out_dir = config.out_dir;
    return [&tree, options, model_config, episode_log, out_dir](uint64_t seed) {
      CapiRunOptions seed_options = options;
      if (episode_log) {
        seed_options.episode_log_path =
            out_dir + "/episodes_seed_" + std::to_string(seed) + ".csv";
      }
      RandomStream root(seed);
      RandomStream init = root.Child("net-init");
      NeuralCapiModel model(tree, model_config, &init);
      RandomStream train = root.Child("train");
      CapiRunResult result =
          RunCapiTraining(tree, &model, seed_options, &train);
      return FromCurve(seed, std::move(result.curve), result.best_greedy_value,
                       result.final_greedy_value);
    };
  }
  BaselineConfig learn;
  if (name == "iql") {
    learn.algorithm = BaselineAlgorithm::kIql;
  } else if (name == "hql") {
    learn.algorithm = BaselineAlgorithm::kHql;
  } else if (name == "vdn") {
    learn.algorithm = BaselineAlgorithm::kVdn;
  } else if (name == "sad") {
    learn.algorithm = BaselineAlgorithm::kSad;
  } else {
    throw ConfigError("unknown algorithm '" + name + "'");
  }
  learn.episodes = config.episodes;
  learn.eval_every = config.eval_every;
  learn.initial_epsilon = reader.Double("initial_epsilon", 1.0);
  learn.initial_alpha = reader.Double("initial_alpha", 0.1);
  if (name == "hql") {
    learn.hysteretic_beta = reader.Double("hysteretic_beta", 0.0);
  }
  learn.epsilon_decay_episodes = reader.Int("epsilon_decay_episodes", 0);
  learn.alpha_decay_episodes = reader.Int("alpha_decay_episodes", 0);
  reader.Finish(name);
  return [&tree, learn](uint64_t seed) {
    RandomStream root(seed);
    RandomStream train = root.Child("train");
    BaselineResult result = TrainBaseline(tree, learn, &train);
    return FromCurve(seed, std::move(result.curve), result.best_greedy_value,
                     result.final_greedy_value);
  };
}

void ValidateExperiment(const ExperimentConfig& config) {
  if (config.game.empty()) throw ConfigError("config is missing 'game'");
  if (config.algorithm.empty()) {
    throw ConfigError("config is missing 'algorithm'");
  }
  const std::vector<std::string>& known = RegisteredAlgorithms();
  if (std::find(known.begin(), known.end(), config.algorithm) == known.end()) {
    throw ConfigError("unknown algorithm '" + config.algorithm + "'");
  }
  if (config.seeds.empty()) throw ConfigError("config is missing 'seeds'");
  std::set<uint64_t> distinct(config.seeds.begin(), config.seeds.end());
  if (distinct.size() != config.seeds.size()) {
    throw ConfigError("seed list contains duplicates");
  }
  if (config.episodes < 0) throw ConfigError("config is missing 'episodes'");
  if (config.eval_every < 1) {
    throw ConfigError("eval_every must be at least 1");
  }
  if (config.out_dir.empty()) throw ConfigError("config is missing 'out_dir'");
  if (config.workers < 0) throw ConfigError("workers must be nonnegative");
}

void WriteCurveCsv(const std::string& path, const SeedRun& run) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "seed,episode,greedy_value,best_value,wall_ms\n";
  char line[160];
  for (const CurvePoint& point : run.curve) {
    std::snprintf(line, sizeof(line), "%llu,%lld,%.9f,%.9f,%.3f\n",
                  static_cast<unsigned long long>(run.seed),
                  static_cast<long long>(point.episode), point.greedy_value,
                  point.best_value, point.wall_ms);
    out << line;
  }
  if (!out) throw ConfigError("cannot write " + path);
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

ExperimentConfig ParseConfigText(const std::string& text) {
  ExperimentConfig config;
  std::string section;
  bool saw_section = false;
  std::set<std::string> seen_top;
  std::set<std::string> seen_section;
  std::stringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    size_t comment = raw.find('#');
    if (comment != std::string::npos) raw = raw.substr(0, comment);
    std::string line = Trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": unterminated section header");
      }
      if (saw_section) {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": more than one algorithm section");
      }
      section = Trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": empty section name");
      }
      saw_section = true;
      continue;
    }
    size_t equals = line.find('=');
    if (equals == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected key=value, got '" + line + "'");
    }
    std::string key = Trim(line.substr(0, equals));
    std::string value = Trim(line.substr(equals + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_number) + ": empty key");
    }
    std::set<std::string>& seen = saw_section ? seen_section : seen_top;
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": duplicate key '" + key + "'");
    }
    if (saw_section) {
      config.options[key] = value;
    } else {
      SetTopLevelKey(&config, key, value);
    }
  }
  if (saw_section) {
    if (config.algorithm.empty()) {
      config.algorithm = section;
    } else if (config.algorithm != section) {
      throw ConfigError("section [" + section +
                        "] does not match algorithm '" + config.algorithm +
                        "'");
    }
  }
  return config;
}

ExperimentConfig ParseConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigText(buffer.str());
}

const std::vector<std::string>& RegisteredAlgorithms() {
  static const std::vector<std::string> names = {
      "pubmdp_q", "capi_tabular", "capi_neural", "iql", "hql", "vdn", "sad"};
  return names;
}

double OracleValue(const GameTree& tree, const ExperimentConfig& config) {
  if (config.has_oracle_override) return config.oracle_override;
  const std::string& name = config.game;
  const std::string prefix = "trade_comm:";
  if (name.rfind(prefix, 0) == 0) {
    std::string dims = name.substr(prefix.size());
    size_t split = dims.find('x');
    if (split != std::string::npos) {
      int64_t items = ParseInt("game", dims.substr(0, split));
      int64_t utterances = ParseInt("game", dims.substr(split + 1));
      if (utterances >= items) {
        JointPolicy policy = MakeTradeCommSignallingPolicy(tree);
        return EvaluateJointPolicy(tree, policy);
      }
    }
  }
  try {
    BackwardInductionResult result = BackwardInduction(tree, {});
    return result.root_value;
  } catch (const std::exception& e) {
    throw ConfigError("no oracle available for " + name +
                      " (backward induction failed: " + e.what() +
                      "); set 'oracle = <value>' in the config");
  }
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ValidateExperiment(config);
  std::shared_ptr<const FiniteGame> game;
  try {
    game = MakeGame(config.game);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("unknown game: ") + e.what());
  }
  GameTree tree = GameTree::Build(std::move(game));
  double oracle = OracleValue(tree, config);
  SeedRunner runner = BuildRunner(tree, config);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + config.out_dir +
                      ": " + ec.message());
  }
  std::string summary_path = config.out_dir + "/summary.json";
  {
    std::ofstream probe(summary_path);
    if (!probe) throw ConfigError("cannot write " + summary_path);
  }

  size_t num_seeds = config.seeds.size();
  std::vector<SeedRun> runs(num_seeds);
  std::vector<std::exception_ptr> errors(num_seeds);
  std::atomic<size_t> next{0};
  unsigned hardware = std::thread::hardware_concurrency();
  size_t workers = config.workers > 0 ? static_cast<size_t>(config.workers)
                                      : std::max(1u, hardware);
  workers = std::min(workers, num_seeds);
  auto work = [&]() {
    for (;;) {
      size_t index = next.fetch_add(1);
      if (index >= num_seeds) return;
      try {
        runs[index] = runner(config.seeds[index]);
      } catch (...) {
        errors[index] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& thread : pool) thread.join();
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  // Single collector: every result file is written here, in seed order.
  std::vector<double> best_values;
  best_values.reserve(num_seeds);
  int64_t solved = 0;
  for (const SeedRun& run : runs) {
    WriteCurveCsv(
        config.out_dir + "/seed_" + std::to_string(run.seed) + ".csv", run);
    best_values.push_back(run.best_value);
    if (run.best_value >= oracle - kSolveTolerance) ++solved;
  }

  ExperimentResult result;
  result.oracle = oracle;
  result.runs = std::move(runs);
  result.best_min = *std::min_element(best_values.begin(), best_values.end());
  result.best_max = *std::max_element(best_values.begin(), best_values.end());
  result.best_median = Median(best_values);
  result.best_mean =
      Sum(best_values) / static_cast<double>(best_values.size());
  result.solve_rate =
      static_cast<double>(solved) / static_cast<double>(num_seeds);
  result.summary_path = summary_path;

  nlohmann::ordered_json summary;
  summary["game"] = config.game;
  summary["algorithm"] = config.algorithm;
  summary["episodes"] = config.episodes;
  summary["eval_every"] = config.eval_every;
  summary["seeds"] = config.seeds;
  summary["oracle"] = oracle;
  summary["best_value"] = {{"min", result.best_min},
                           {"median", result.best_median},
                           {"max", result.best_max},
                           {"mean", result.best_mean}};
  summary["solve_rate"] = result.solve_rate;
  summary["solve_tolerance"] = kSolveTolerance;
  nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
  for (const SeedRun& run : result.runs) {
    per_seed.push_back({{"seed", run.seed},
                        {"best_value", run.best_value},
                        {"final_value", run.final_value}});
  }
  summary["per_seed"] = std::move(per_seed);
  std::ofstream out(summary_path);
  if (!out) throw ConfigError("cannot write " + summary_path);
  out << summary.dump(2) << '\n';
  if (!out) throw ConfigError("cannot write " + summary_path);
  return result;
}

void EmitPlotData(const std::string& in_dir, const std::string& out_path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(in_dir, ec)) {
    throw ConfigError("not a directory: " + in_dir);
  }
  struct Stats {
    double min, median, max, mean, solve_rate;
  };
  std::map<std::string, std::map<std::string, Stats>> by_game;
  std::map<std::string, double> oracles;
  std::vector<fs::path> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(in_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& path : files) {
    std::ifstream in(path);
    nlohmann::json summary;
    try {
      in >> summary;
    } catch (const std::exception& e) {
      throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    if (!summary.contains("game") || !summary.contains("algorithm") ||
        !summary.contains("oracle") || !summary.contains("best_value") ||
        !summary.contains("solve_rate")) {
      throw ConfigError("not an experiment summary: " + path.string());
    }
    std::string game = summary["game"].get<std::string>();
    std::string algorithm = summary["algorithm"].get<std::string>();
    const nlohmann::json& best = summary["best_value"];
    Stats stats{best["min"].get<double>(), best["median"].get<double>(),
                best["max"].get<double>(), best["mean"].get<double>(),
                summary["solve_rate"].get<double>()};
    if (!by_game[game].emplace(algorithm, stats).second) {
      throw ConfigError("duplicate summaries for " + game + " / " + algorithm);
    }
    oracles.emplace(game, summary["oracle"].get<double>());
  }
  if (by_game.empty()) {
    throw ConfigError("no summary JSON files in " + in_dir);
  }
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write " + out_path);
  out << "game,algorithm,statistic,value\n";
  char line[256];
  auto emit = [&](const std::string& game, const std::string& algorithm,
                  const char* statistic, double value) {
    std::snprintf(line, sizeof(line), "%s,%s,%s,%.9f\n", game.c_str(),
                  algorithm.c_str(), statistic, value);
    out << line;
  };
  for (const auto& [game, algorithms] : by_game) {
    for (const auto& [algorithm, stats] : algorithms) {
      emit(game, algorithm, "best_min", stats.min);
      emit(game, algorithm, "best_median", stats.median);
      emit(game, algorithm, "best_max", stats.max);
      emit(game, algorithm, "best_mean", stats.mean);
      emit(game, algorithm, "solve_rate", stats.solve_rate);
    }
    emit(game, "oracle", "oracle", oracles.at(game));
  }
  if (!out) throw ConfigError("cannot write " + out_path);
}

}  // namespace pubmdp
