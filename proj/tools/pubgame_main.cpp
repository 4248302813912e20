// pubgame: simulator and verification suite for the strategic publishers
// ranking game. Subcommands: simulate | sweep | verify | figures.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pubgame/cli_config.hpp"
#include "pubgame/errors.hpp"
#include "pubgame/verification.hpp"

namespace fs = std::filesystem;
using namespace pubgame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitUnsupported = 3;

struct CommonFlags {
  std::optional<std::string> config_path;
  cli::Flags values;
  std::optional<std::string> step_sizes_text;
  std::optional<std::string> rankings_text;
  std::optional<std::string> lambda_grid_text;
  std::optional<std::string> k_grid_text;
  std::optional<std::string> values_text;  // sweep: grid for the chosen axis
};

void add_global_options(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--config,-c", flags.config_path, "JSON config file");
  cmd.add_option("--seed", flags.values.seed, "master RNG seed");
  cmd.add_option("--out,-o", flags.values.out_dir, "output directory");
  cmd.add_option("--jobs,-j", flags.values.jobs, "worker threads (no effect on results)");
}

void add_game_options(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--n", flags.values.n, "number of publishers");
  cmd.add_option("--k", flags.values.k, "embedding dimension");
  cmd.add_option("--lambda", flags.values.lambda, "cost factor");
  cmd.add_option("--ranking", flags.values.ranking, "prp|linear|softmax|random");
  cmd.add_option("--slope", flags.values.slope, "linear ranking slope (default 1/n)");
  cmd.add_option("--tie-tolerance", flags.values.tie_tolerance, "PRP tie tolerance");
  cmd.add_option("--distance", flags.values.distance,
                 "squared-euclidean|absolute-1d");
}

void add_dynamics_options(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--mode", flags.values.mode, "discrete|smooth");
  cmd.add_option("--epsilon", flags.values.epsilon, "improvement threshold");
  cmd.add_option("--max-iters,-T", flags.values.max_iters,
                 "iteration cap (default 100, or 100*k in smooth mode)");
  cmd.add_option("--step-sizes", flags.step_sizes_text,
                 "comma-separated step sizes (default (1/2)^1..(1/2)^10)");
  cmd.add_option("--infeasible", flags.values.infeasible,
                 "out-of-cube moves: clamp|discard");
}

void add_experiment_options(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--rankings", flags.rankings_text, "comma-separated ranking list");
  cmd.add_option("--games-per-cell", flags.values.games_per_cell,
                 "simulations per cell");
  cmd.add_option("--bootstrap-b", flags.values.bootstrap_resamples,
                 "bootstrap resample count");
  cmd.add_option("--confidence", flags.values.confidence, "CI confidence level");
}

cli::Settings resolve_settings(CommonFlags& flags) {
  cli::Settings settings;
  if (const char* env = std::getenv("PUBGAME_SEED")) {
    std::size_t used = 0;
    settings.seed = std::stoull(env, &used);
    if (used != std::string(env).size())
      throw std::invalid_argument("PUBGAME_SEED is not an integer");
  }
  if (flags.config_path) {
    std::ifstream in(*flags.config_path);
    if (!in) throw std::invalid_argument("cannot read config file " + *flags.config_path);
    nlohmann::json parsed = nlohmann::json::parse(in);
    cli::apply_config_file(settings, parsed);
  }
  if (flags.step_sizes_text)
    flags.values.step_sizes = cli::parse_double_list(*flags.step_sizes_text);
  if (flags.rankings_text)
    flags.values.rankings = cli::parse_string_list(*flags.rankings_text);
  if (flags.lambda_grid_text)
    flags.values.lambda_grid = cli::parse_double_list(*flags.lambda_grid_text);
  if (flags.k_grid_text)
    flags.values.k_grid = cli::parse_int_list(*flags.k_grid_text);
  cli::apply_flags(settings, flags.values);
  return settings;
}

fs::path ensure_out_dir(const cli::Settings& settings) {
  fs::path dir(settings.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::invalid_argument("cannot create output directory " + dir.string());
  return dir;
}

int cmd_simulate(CommonFlags& flags, const std::optional<std::string>& trace_path) {
  const cli::Settings settings = resolve_settings(flags);
  const PublishersGame game = cli::build_game(settings);
  const DynamicsConfig dynamics = cli::build_dynamics(settings);

  const SimulationTrace trace = run_dynamic(game, dynamics);

  fs::path out_file;
  if (trace_path) {
    out_file = *trace_path;
    if (out_file.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(out_file.parent_path(), ec);
    }
  } else {
    out_file = ensure_out_dir(settings) / "trace.jsonl";
  }
  std::ofstream out(out_file);
  if (!out) throw std::invalid_argument("cannot write trace file " + out_file.string());
  write_trace_jsonl(out, game, dynamics, trace);

  std::cout << "converged=" << (trace.converged ? "true" : "false")
            << " iters=" << trace.iterations_used
            << " publishers_welfare=" << trace.final_welfare.publishers_welfare
            << " users_welfare=" << trace.final_welfare.users_welfare
            << " trace=" << out_file.string() << '\n';
  return kExitOk;
}

int cmd_sweep(CommonFlags& flags) {
  cli::Settings settings = resolve_settings(flags);
  if (flags.values_text) {
    if (settings.experiment.axis == "k")
      settings.experiment.k_grid = cli::parse_int_list(*flags.values_text);
    else
      settings.experiment.lambda_grid = cli::parse_double_list(*flags.values_text);
  }
  if (settings.experiment.axis != "lambda" && settings.experiment.axis != "k")
    throw std::invalid_argument("sweep axis must be lambda or k");
  const SweepAxis axis =
      settings.experiment.axis == "k" ? SweepAxis::K : SweepAxis::Lambda;

  if (!settings.game.lambda.has_value()) settings.game.lambda = 1.0;
  const ExperimentConfig config = cli::build_experiment(settings);
  const SweepOutput output = run_sweep(config, axis);

  const fs::path dir = ensure_out_dir(settings);
  const fs::path csv_path = dir / "sweep.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::invalid_argument("cannot write " + csv_path.string());
  write_summary_csv(csv, "sweep", output.rows);
  const fs::path runs_path = dir / "sweep_runs.jsonl";
  std::ofstream runs(runs_path);
  if (!runs) throw std::invalid_argument("cannot write " + runs_path.string());
  write_runs_jsonl(runs, "sweep", output.raw);

  std::cout << "wrote " << csv_path.string() << " and " << runs_path.string() << '\n';
  return kExitOk;
}

int cmd_figures(CommonFlags& flags) {
  cli::Settings settings = resolve_settings(flags);
  if (!settings.game.lambda.has_value()) settings.game.lambda = 1.0;
  const ExperimentConfig config = cli::build_experiment(settings);
  const fs::path dir = ensure_out_dir(settings);
  for (const std::string& path : reproduce_figures(config, dir.string()))
    std::cout << "wrote " << path << '\n';
  return kExitOk;
}

int cmd_verify(CommonFlags& flags, const std::string& only, int potential_samples,
               int grid_resolution, const std::string& inject_fault) {
  const cli::Settings settings = resolve_settings(flags);
  VerifyOptions options;
  options.only = only;
  options.seed = settings.seed;
  options.potential_samples = potential_samples;
  options.grid_resolution = grid_resolution;
  options.jobs = settings.jobs;
  if (!inject_fault.empty()) {
    if (inject_fault != "slope-validation")
      throw std::invalid_argument("unknown fault name: " + inject_fault);
    options.inject_slope_fault = true;
  }

  const std::vector<CheckResult> checks = run_verification_suite(options);
  if (checks.empty()) throw std::invalid_argument("no checks match '" + only + "'");
  int failures = 0;
  for (const CheckResult& check : checks) {
    std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << "  "
              << check.detail << '\n';
    if (!check.passed) ++failures;
  }
  std::cout << (failures == 0 ? "all checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << '\n';
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategic publishers ranking-game simulator"};
  app.require_subcommand(1);

  CommonFlags simulate_flags;
  std::optional<std::string> trace_path;
  CLI::App* simulate = app.add_subcommand("simulate", "run one dynamic, write a trace");
  add_global_options(*simulate, simulate_flags);
  add_game_options(*simulate, simulate_flags);
  add_dynamics_options(*simulate, simulate_flags);
  simulate->add_option("--trace", trace_path, "trace file path (default <out>/trace.jsonl)");

  CommonFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "sweep lambda or k, write summary CSV");
  add_global_options(*sweep, sweep_flags);
  add_game_options(*sweep, sweep_flags);
  add_dynamics_options(*sweep, sweep_flags);
  add_experiment_options(*sweep, sweep_flags);
  sweep->add_option("--axis", sweep_flags.values.axis, "sweep axis: lambda|k");
  sweep->add_option("--values", sweep_flags.values_text,
                    "comma-separated grid for the chosen axis");

  CommonFlags verify_flags;
  std::string only;
  std::string inject_fault;
  int potential_samples = 10000;
  int grid_resolution = 101;
  CLI::App* verify = app.add_subcommand("verify", "run the numeric check table");
  add_global_options(*verify, verify_flags);
  verify->add_option("--only", only, "run only checks whose name contains this");
  verify->add_option("--potential-samples", potential_samples,
                     "deviations per potential-identity check");
  verify->add_option("--grid-resolution", grid_resolution, "grid oracle resolution");
  verify->add_option("--inject-fault", inject_fault)->group("");

  CommonFlags figures_flags;
  CLI::App* figures = app.add_subcommand("figures", "write fig1/fig2/fig3 CSV sets");
  add_global_options(*figures, figures_flags);
  add_experiment_options(*figures, figures_flags);
  figures->add_option("--lambda-grid", figures_flags.lambda_grid_text,
                      "comma-separated lambda grid for fig1");
  figures->add_option("--k-grid", figures_flags.k_grid_text,
                      "comma-separated k grid for fig2/fig3");
  figures->add_option("--epsilon", figures_flags.values.epsilon,
                      "improvement threshold");
  figures->add_option("--max-iters,-T", figures_flags.values.max_iters,
                      "iteration cap override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(simulate_flags, trace_path);
    if (sweep->parsed()) return cmd_sweep(sweep_flags);
    if (verify->parsed())
      return cmd_verify(verify_flags, only, potential_samples, grid_resolution,
                        inject_fault);
    if (figures->parsed()) return cmd_figures(figures_flags);
  } catch (const unsupported_config& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  return kExitBadConfig;
}
