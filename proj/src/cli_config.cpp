#include "pubgame/cli_config.hpp"

#include <sstream>
#include <stdexcept>

#include "pubgame/rng.hpp"

namespace pubgame::cli {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void reject_unknown_keys(const nlohmann::json& section, const std::string& name,
                         std::initializer_list<const char*> allowed) {
  require(section.is_object(), "config: '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    bool known = false;
    for (const char* candidate : allowed)
      if (key == candidate) known = true;
    require(known, "config: unknown key '" + key + "' in " + name);
  }
}

template <typename T>
void read(const nlohmann::json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

template <typename T>
void read_optional(const nlohmann::json& section, const char* key,
                   std::optional<T>& out) {
  if (section.contains(key) && !section.at(key).is_null())
    out = section.at(key).get<T>();
}

}  // namespace

void apply_config_file(Settings& settings, const nlohmann::json& file) {
  reject_unknown_keys(file, "config", {"seed", "out", "jobs", "game", "dynamics",
                                       "experiment"});
  read(file, "seed", settings.seed);
  read(file, "out", settings.out_dir);
  read(file, "jobs", settings.jobs);

  if (file.contains("game")) {
    const nlohmann::json& game = file.at("game");
    reject_unknown_keys(game, "game",
                        {"n", "k", "lambda", "ranking", "slope", "tie_tolerance",
                         "distance", "initial_docs", "info_need"});
    read(game, "n", settings.game.n);
    read(game, "k", settings.game.k);
    read_optional(game, "lambda", settings.game.lambda);
    read(game, "ranking", settings.game.ranking);
    read_optional(game, "slope", settings.game.slope);
    read(game, "tie_tolerance", settings.game.tie_tolerance);
    read(game, "distance", settings.game.distance);
    read_optional(game, "initial_docs", settings.game.initial_docs);
    read_optional(game, "info_need", settings.game.info_need);
  }

  if (file.contains("dynamics")) {
    const nlohmann::json& dynamics = file.at("dynamics");
    reject_unknown_keys(dynamics, "dynamics",
                        {"mode", "epsilon", "max_iters", "step_sizes", "infeasible"});
    read(dynamics, "mode", settings.dynamics.mode);
    read(dynamics, "epsilon", settings.dynamics.epsilon);
    read_optional(dynamics, "max_iters", settings.dynamics.max_iters);
    read_optional(dynamics, "step_sizes", settings.dynamics.step_sizes);
    read(dynamics, "infeasible", settings.dynamics.infeasible);
  }

  if (file.contains("experiment")) {
    const nlohmann::json& experiment = file.at("experiment");
    reject_unknown_keys(experiment, "experiment",
                        {"axis", "rankings", "lambda_grid", "k_grid", "games_per_cell",
                         "bootstrap_b", "confidence"});
    read(experiment, "axis", settings.experiment.axis);
    read(experiment, "rankings", settings.experiment.rankings);
    read(experiment, "lambda_grid", settings.experiment.lambda_grid);
    read(experiment, "k_grid", settings.experiment.k_grid);
    read(experiment, "games_per_cell", settings.experiment.games_per_cell);
    read(experiment, "bootstrap_b", settings.experiment.bootstrap_resamples);
    read(experiment, "confidence", settings.experiment.confidence);
  }
}

void apply_flags(Settings& settings, const Flags& flags) {
  auto take = [](auto& target, const auto& source) {
    if (source.has_value()) target = *source;
  };
  take(settings.seed, flags.seed);
  take(settings.out_dir, flags.out_dir);
  take(settings.jobs, flags.jobs);
  take(settings.game.n, flags.n);
  take(settings.game.k, flags.k);
  if (flags.lambda) settings.game.lambda = *flags.lambda;
  take(settings.game.ranking, flags.ranking);
  if (flags.slope) settings.game.slope = *flags.slope;
  take(settings.game.tie_tolerance, flags.tie_tolerance);
  take(settings.game.distance, flags.distance);
  take(settings.dynamics.mode, flags.mode);
  take(settings.dynamics.epsilon, flags.epsilon);
  if (flags.max_iters) settings.dynamics.max_iters = *flags.max_iters;
  if (flags.step_sizes) settings.dynamics.step_sizes = *flags.step_sizes;
  take(settings.dynamics.infeasible, flags.infeasible);
  take(settings.experiment.axis, flags.axis);
  take(settings.experiment.rankings, flags.rankings);
  take(settings.experiment.lambda_grid, flags.lambda_grid);
  take(settings.experiment.k_grid, flags.k_grid);
  take(settings.experiment.games_per_cell, flags.games_per_cell);
  take(settings.experiment.bootstrap_resamples, flags.bootstrap_resamples);
  take(settings.experiment.confidence, flags.confidence);
}

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    require(!item.empty(), "empty entry in list '" + text + "'");
    parts.push_back(item);
  }
  require(!parts.empty(), "empty list");
  return parts;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split_commas(text)) {
    std::size_t used = 0;
    out.push_back(std::stod(part, &used));
    require(used == part.size(), "bad number '" + part + "'");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& part : split_commas(text)) {
    std::size_t used = 0;
    out.push_back(std::stoi(part, &used));
    require(used == part.size(), "bad integer '" + part + "'");
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  return split_commas(text);
}

RankingSpec build_ranking_spec(const GameParams& params) {
  RankingSpec spec;
  spec.kind = ranking_kind_from_string(params.ranking);
  spec.slope = params.slope;
  spec.tie_tolerance = params.tie_tolerance;
  return spec;
}

PublishersGame build_game(const Settings& settings) {
  const GameParams& params = settings.game;
  require(params.lambda.has_value(), "lambda is required");
  const RankingSpec ranking = build_ranking_spec(params);
  const DistanceKind kind = distance_kind_from_string(params.distance);
  const DistanceSpec dist = kind == DistanceKind::Absolute1d
                                ? DistanceSpec::absolute_1d()
                                : DistanceSpec::normalized_squared_euclidean(params.k);

  if (params.initial_docs.has_value() || params.info_need.has_value()) {
    require(params.initial_docs.has_value() && params.info_need.has_value(),
            "explicit games need both initial_docs and info_need");
    return PublishersGame(params.n, params.k, *params.lambda, dist,
                          *params.initial_docs, *params.info_need, ranking);
  }
  Rng rng(derive_seed(settings.seed, 10));
  if (kind == DistanceKind::Absolute1d) {
    // The sampled-game factory is squared-Euclidean; sample coordinates here
    // so absolute-1d games can be sampled too.
    require(params.k == 1, "absolute-1d distance needs k = 1");
    std::vector<Point> docs(params.n, Point(1));
    for (Point& doc : docs) doc[0] = rng.uniform01();
    Point star{rng.uniform01()};
    return PublishersGame(params.n, 1, *params.lambda, dist, docs, star, ranking);
  }
  return sample_game(params.n, params.k, *params.lambda, ranking, rng);
}

DynamicsConfig build_dynamics(const Settings& settings) {
  DynamicsConfig config;
  config.mode = dynamics_mode_from_string(settings.dynamics.mode);
  config.epsilon = settings.dynamics.epsilon;
  config.max_iters = settings.dynamics.max_iters;
  if (settings.dynamics.step_sizes.has_value())
    config.step_sizes = *settings.dynamics.step_sizes;
  config.infeasible = infeasible_policy_from_string(settings.dynamics.infeasible);
  config.rng_seed = derive_seed(settings.seed, 11);
  return config;
}

ExperimentConfig build_experiment(const Settings& settings) {
  ExperimentConfig config;
  config.n = settings.game.n;
  config.k = settings.game.k;
  config.lambda = settings.game.lambda.value_or(1.0);
  config.lambda_values = settings.experiment.lambda_grid;
  config.k_values = settings.experiment.k_grid;
  config.rankings.clear();
  for (const std::string& name : settings.experiment.rankings)
    config.rankings.push_back(ranking_kind_from_string(name));
  config.mode = dynamics_mode_from_string(settings.dynamics.mode);
  config.epsilon = settings.dynamics.epsilon;
  config.max_iters = settings.dynamics.max_iters;
  config.games_per_cell = settings.experiment.games_per_cell;
  config.bootstrap_resamples = settings.experiment.bootstrap_resamples;
  config.confidence = settings.experiment.confidence;
  config.master_seed = settings.seed;
  config.jobs = settings.jobs;
  return config;
}

}  // namespace pubgame::cli
