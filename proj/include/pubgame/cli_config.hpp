#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pubgame/dynamics.hpp"
#include "pubgame/experiments.hpp"

namespace pubgame::cli {

struct GameParams {
  int n = 2;
  int k = 2;
  std::optional<double> lambda;  // no default: simulate requires it
  std::string ranking = "linear";
  std::optional<double> slope;
  double tie_tolerance = 1e-12;
  std::string distance = "squared-euclidean";
  // Explicit game; when absent the game is sampled from the seed.
  std::optional<std::vector<Point>> initial_docs;
  std::optional<Point> info_need;
};

struct DynamicsParams {
  std::string mode = "discrete";
  double epsilon = 1e-6;
  std::optional<int> max_iters;  // empty: 100 discrete, 100*k smooth
  std::optional<std::vector<double>> step_sizes;
  std::string infeasible = "clamp";
};

struct ExperimentParams {
  std::string axis = "lambda";
  std::vector<std::string> rankings = {"prp", "linear", "softmax"};
  std::vector<double> lambda_grid = ExperimentConfig::default_lambda_grid();
  std::vector<int> k_grid = {2, 4, 8, 16, 32};
  int games_per_cell = 200;
  int bootstrap_resamples = 500;
  double confidence = 0.95;
};

// Full resolved configuration. Precedence: built-in defaults, then the
// PUBGAME_SEED environment variable (seed only), then the config file, then
// command-line flags.
struct Settings {
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int jobs = 1;
  GameParams game;
  DynamicsParams dynamics;
  ExperimentParams experiment;
};

// Flag values captured by the CLI; every present field overrides the file.
struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<int> n, k;
  std::optional<double> lambda;
  std::optional<std::string> ranking;
  std::optional<double> slope;
  std::optional<double> tie_tolerance;
  std::optional<std::string> distance;
  std::optional<std::string> mode;
  std::optional<double> epsilon;
  std::optional<int> max_iters;
  std::optional<std::vector<double>> step_sizes;
  std::optional<std::string> infeasible;
  std::optional<std::string> axis;
  std::optional<std::vector<std::string>> rankings;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<std::vector<int>> k_grid;
  std::optional<int> games_per_cell;
  std::optional<int> bootstrap_resamples;
  std::optional<double> confidence;
};

// Merges a parsed config file into settings. Unknown keys anywhere are
// rejected with std::invalid_argument.
void apply_config_file(Settings& settings, const nlohmann::json& file);

void apply_flags(Settings& settings, const Flags& flags);

// List flags are comma separated, e.g. "0.5,1.0".
std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

RankingSpec build_ranking_spec(const GameParams& params);

// Builds the game described by the settings: the explicit documents when
// given (both initial_docs and info_need), otherwise sampled from the seed.
// Throws std::invalid_argument when lambda is missing or the game is
// half-specified.
PublishersGame build_game(const Settings& settings);

DynamicsConfig build_dynamics(const Settings& settings);

ExperimentConfig build_experiment(const Settings& settings);

}  // namespace pubgame::cli
