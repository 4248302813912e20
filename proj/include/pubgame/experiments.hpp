#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pubgame/dynamics.hpp"
#include "pubgame/rng.hpp"

namespace pubgame {

enum class SweepAxis { Lambda, K };

struct ExperimentConfig {
  int n = 2;
  int k = 2;           // fixed k for lambda sweeps
  double lambda = 1.0; // fixed lambda for k sweeps
  std::vector<double> lambda_values = default_lambda_grid();
  std::vector<int> k_values = {2, 4, 8, 16, 32};
  std::vector<RankingKind> rankings = {RankingKind::Prp, RankingKind::LinearRrp,
                                       RankingKind::SoftmaxRrp};
  DynamicsMode mode = DynamicsMode::Discrete;
  double epsilon = 1e-6;
  std::optional<int> max_iters;  // empty: 100 discrete, 100*k smooth
  int games_per_cell = 200;
  int bootstrap_resamples = 500;
  double confidence = 0.95;
  std::uint64_t master_seed = 42;
  int jobs = 1;

  static std::vector<double> default_lambda_grid();  // 0.1, 0.2, ..., 2.0
};

// Outcome of one simulation. Welfare is taken at the final profile, i.e. at
// the reached equilibrium when converged and truncated at T otherwise.
struct RunResult {
  bool converged = false;
  int iterations = 0;
  double publishers_welfare = 0.0;
  double users_welfare = 0.0;
};

struct RawRun {
  std::string x_name;
  double x_value = 0.0;
  RankingKind ranking = RankingKind::LinearRrp;
  int game_index = 0;
  std::uint64_t dynamics_seed = 0;
  RunResult result;
};

struct CellStats {
  std::optional<double> mean, ci_lo, ci_hi;
  int n_used = 0;  // samples behind the mean
};

struct CellSummary {
  std::string x_name;
  double x_value = 0.0;
  RankingKind ranking = RankingKind::LinearRrp;
  double convergence_rate = 0.0;
  double rate_ci_lo = 0.0, rate_ci_hi = 0.0;
  CellStats publishers;
  CellStats users;
  int n_converged = 0;
  int n_total = 0;
};

struct SweepOutput {
  std::vector<CellSummary> rows;  // ordered by (x index, ranking index)
  std::vector<RawRun> raw;        // ordered by (x index, game index, ranking index)
};

// Game with uniformly sampled initial documents and information need, using
// the normalized squared-Euclidean distance. Draw order: documents row-major,
// then the information need.
PublishersGame sample_game(int n, int k, double lambda, const RankingSpec& ranking,
                           Rng& rng);

// Percentile bootstrap interval for the mean: B resamples with replacement,
// interval at the (1-confidence)/2 and 1-(1-confidence)/2 quantiles of the
// resampled means. Throws std::invalid_argument on empty samples.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, int B,
                                       double confidence, Rng& rng);

// One (x value, ranking) cell in isolation; welfare statistics are computed
// over this cell's own converged runs.
CellSummary run_cell(const ExperimentConfig& config, SweepAxis axis, double x_value,
                     RankingKind ranking);

// Full sweep over the axis values. Sampled games and dynamics seeds are
// shared across rankings at each x value, and welfare statistics are
// restricted to the games on which every swept ranking converged. Results do
// not depend on the worker count.
SweepOutput run_sweep(const ExperimentConfig& config, SweepAxis axis);

// CSV rows in the fixed schema
// figure,x_name,x_value,ranking,metric,mean,ci_lo,ci_hi,n_converged,n_total.
void write_summary_csv(std::ostream& os, const std::string& figure,
                       const std::vector<CellSummary>& rows);

// One JSON line per simulation, converged or not.
void write_runs_jsonl(std::ostream& os, const std::string& figure,
                      const std::vector<RawRun>& raw);

// Emits fig1.csv/fig2.csv/fig3.csv (plus *_runs.jsonl) into out_dir:
// a lambda sweep of prp/linear/softmax under discrete dynamics, then k sweeps
// of linear vs softmax under smooth dynamics at lambda = 1 and lambda = 0.1.
// Returns the paths written.
std::vector<std::string> reproduce_figures(const ExperimentConfig& config,
                                           const std::string& out_dir);

}  // namespace pubgame
