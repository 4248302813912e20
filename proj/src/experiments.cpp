#include "pubgame/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pubgame {

namespace {

// Sub-stream tags for seed derivation.
constexpr std::uint64_t kStreamGame = 1;
constexpr std::uint64_t kStreamDynamics = 2;
constexpr std::uint64_t kStreamBootstrap = 3;

std::uint64_t x_bits(double x_value) { return std::bit_cast<std::uint64_t>(x_value); }

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, jobs);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct SampledCoords {
  std::vector<Point> docs;
  Point star;
};

SampledCoords sample_coords(int n, int k, Rng& rng) {
  SampledCoords coords;
  coords.docs.assign(n, Point(k));
  for (Point& doc : coords.docs)
    for (double& v : doc) v = rng.uniform01();
  coords.star.resize(k);
  for (double& v : coords.star) v = rng.uniform01();
  return coords;
}

RankingSpec spec_for(RankingKind kind) {
  RankingSpec spec;
  spec.kind = kind;
  return spec;
}

struct CellParams {
  int n, k;
  double lambda;
  double x_value;
  std::string x_name;
};

CellParams cell_params(const ExperimentConfig& config, SweepAxis axis, double x_value) {
  CellParams p;
  p.x_value = x_value;
  if (axis == SweepAxis::Lambda) {
    p.x_name = "lambda";
    p.n = config.n;
    p.k = config.k;
    p.lambda = x_value;
  } else {
    p.x_name = "k";
    p.n = config.n;
    p.k = static_cast<int>(x_value);
    p.lambda = config.lambda;
  }
  return p;
}

RunResult run_one(const ExperimentConfig& config, const CellParams& params,
                  RankingKind ranking, const SampledCoords& coords,
                  std::uint64_t dynamics_seed) {
  PublishersGame game(params.n, params.k, params.lambda,
                      DistanceSpec::normalized_squared_euclidean(params.k), coords.docs,
                      coords.star, spec_for(ranking));
  DynamicsConfig dynamics;
  dynamics.mode = config.mode;
  dynamics.epsilon = config.epsilon;
  dynamics.max_iters = config.max_iters;
  dynamics.rng_seed = dynamics_seed;
  const SimulationTrace trace = run_dynamic(game, dynamics);
  return {trace.converged, trace.iterations_used,
          trace.final_welfare.publishers_welfare, trace.final_welfare.users_welfare};
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

CellStats summarize_metric(const std::vector<double>& samples, int B, double confidence,
                           Rng& rng) {
  CellStats stats;
  stats.n_used = static_cast<int>(samples.size());
  if (samples.empty()) return stats;
  stats.mean = mean_of(samples);
  const auto [lo, hi] = bootstrap_ci(samples, B, confidence, rng);
  stats.ci_lo = lo;
  stats.ci_hi = hi;
  return stats;
}

// Convergence rate and welfare summary for one (x, ranking) cell, with the
// welfare mask selecting which games contribute welfare samples.
CellSummary summarize_cell(const ExperimentConfig& config, const CellParams& params,
                           RankingKind ranking, std::size_t ranking_index,
                           const std::vector<RunResult>& runs,
                           const std::vector<char>& welfare_mask) {
  CellSummary row;
  row.x_name = params.x_name;
  row.x_value = params.x_value;
  row.ranking = ranking;
  row.n_total = static_cast<int>(runs.size());
  std::vector<double> indicators(runs.size());
  std::vector<double> pub, users;
  for (std::size_t g = 0; g < runs.size(); ++g) {
    indicators[g] = runs[g].converged ? 1.0 : 0.0;
    if (runs[g].converged) ++row.n_converged;
    if (welfare_mask[g]) {
      pub.push_back(runs[g].publishers_welfare);
      users.push_back(runs[g].users_welfare);
    }
  }
  row.convergence_rate = runs.empty() ? 0.0 : mean_of(indicators);

  Rng rate_rng(derive_seed(config.master_seed, kStreamBootstrap,
                           x_bits(params.x_value), ranking_index * 4));
  const auto [rate_lo, rate_hi] =
      bootstrap_ci(indicators, config.bootstrap_resamples, config.confidence, rate_rng);
  row.rate_ci_lo = rate_lo;
  row.rate_ci_hi = rate_hi;

  Rng pub_rng(derive_seed(config.master_seed, kStreamBootstrap,
                          x_bits(params.x_value), ranking_index * 4 + 1));
  row.publishers =
      summarize_metric(pub, config.bootstrap_resamples, config.confidence, pub_rng);
  Rng users_rng(derive_seed(config.master_seed, kStreamBootstrap,
                            x_bits(params.x_value), ranking_index * 4 + 2));
  row.users =
      summarize_metric(users, config.bootstrap_resamples, config.confidence, users_rng);
  return row;
}

}  // namespace

std::vector<double> ExperimentConfig::default_lambda_grid() {
  std::vector<double> grid(20);
  for (int i = 0; i < 20; ++i) grid[i] = (i + 1) / 10.0;
  return grid;
}

PublishersGame sample_game(int n, int k, double lambda, const RankingSpec& ranking,
                           Rng& rng) {
  SampledCoords coords = sample_coords(n, k, rng);
  return PublishersGame(n, k, lambda, DistanceSpec::normalized_squared_euclidean(k),
                        std::move(coords.docs), std::move(coords.star), ranking);
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, int B,
                                       double confidence, Rng& rng) {
  if (samples.empty()) throw std::invalid_argument("bootstrap: empty sample");
  if (B < 1) throw std::invalid_argument("bootstrap: need at least one resample");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("bootstrap: confidence must lie in (0,1)");

  const std::size_t n = samples.size();
  std::vector<double> means(B);
  for (int b = 0; b < B; ++b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += samples[rng.uniform_index(n)];
    means[b] = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * (B - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min<std::size_t>(lo + 1, B - 1);
    const double frac = pos - static_cast<double>(lo);
    return means[lo] * (1.0 - frac) + means[hi] * frac;
  };
  const double tail = (1.0 - confidence) / 2.0;
  return {quantile(tail), quantile(1.0 - tail)};
}

CellSummary run_cell(const ExperimentConfig& config, SweepAxis axis, double x_value,
                     RankingKind ranking) {
  ExperimentConfig one = config;
  one.rankings = {ranking};
  const CellParams params = cell_params(one, axis, x_value);

  std::vector<RunResult> runs(one.games_per_cell);
  parallel_for(runs.size(), one.jobs, [&](std::size_t g) {
    Rng game_rng(derive_seed(one.master_seed, kStreamGame, x_bits(x_value), g));
    const SampledCoords coords = sample_coords(params.n, params.k, game_rng);
    const std::uint64_t dyn_seed =
        derive_seed(one.master_seed, kStreamDynamics, x_bits(x_value), g);
    runs[g] = run_one(one, params, ranking, coords, dyn_seed);
  });

  std::vector<char> own_converged(runs.size());
  for (std::size_t g = 0; g < runs.size(); ++g) own_converged[g] = runs[g].converged;
  return summarize_cell(one, params, ranking, 0, runs, own_converged);
}

SweepOutput run_sweep(const ExperimentConfig& config, SweepAxis axis) {
  if (config.rankings.empty())
    throw std::invalid_argument("sweep: need at least one ranking");
  if (config.games_per_cell < 1)
    throw std::invalid_argument("sweep: games_per_cell must be >= 1");

  std::vector<double> x_values;
  if (axis == SweepAxis::Lambda) {
    x_values = config.lambda_values;
  } else {
    x_values.reserve(config.k_values.size());
    for (int k : config.k_values) x_values.push_back(static_cast<double>(k));
  }
  if (x_values.empty()) throw std::invalid_argument("sweep: empty value grid");

  const std::size_t games = static_cast<std::size_t>(config.games_per_cell);
  const std::size_t n_rankings = config.rankings.size();
  // results[x][ranking][game]
  std::vector<std::vector<std::vector<RunResult>>> results(
      x_values.size(), std::vector<std::vector<RunResult>>(
                           n_rankings, std::vector<RunResult>(games)));

  parallel_for(x_values.size() * games, config.jobs, [&](std::size_t task) {
    const std::size_t xi = task / games;
    const std::size_t g = task % games;
    const double x = x_values[xi];
    const CellParams params = cell_params(config, axis, x);
    // One sampled game per (x, game index), shared by every ranking, and one
    // dynamics seed shared likewise.
    Rng game_rng(derive_seed(config.master_seed, kStreamGame, x_bits(x), g));
    const SampledCoords coords = sample_coords(params.n, params.k, game_rng);
    const std::uint64_t dyn_seed =
        derive_seed(config.master_seed, kStreamDynamics, x_bits(x), g);
    for (std::size_t r = 0; r < n_rankings; ++r)
      results[xi][r][g] = run_one(config, params, config.rankings[r], coords, dyn_seed);
  });

  SweepOutput output;
  for (std::size_t xi = 0; xi < x_values.size(); ++xi) {
    const CellParams params = cell_params(config, axis, x_values[xi]);
    // Welfare comparisons are fair only on games every ranking finished.
    std::vector<char> jointly_converged(games, 1);
    for (std::size_t r = 0; r < n_rankings; ++r)
      for (std::size_t g = 0; g < games; ++g)
        if (!results[xi][r][g].converged) jointly_converged[g] = 0;

    for (std::size_t r = 0; r < n_rankings; ++r)
      output.rows.push_back(summarize_cell(config, params, config.rankings[r], r,
                                           results[xi][r], jointly_converged));

    for (std::size_t g = 0; g < games; ++g) {
      for (std::size_t r = 0; r < n_rankings; ++r) {
        RawRun raw;
        raw.x_name = params.x_name;
        raw.x_value = x_values[xi];
        raw.ranking = config.rankings[r];
        raw.game_index = static_cast<int>(g);
        raw.dynamics_seed =
            derive_seed(config.master_seed, kStreamDynamics, x_bits(x_values[xi]), g);
        raw.result = results[xi][r][g];
        output.raw.push_back(std::move(raw));
      }
    }
  }
  return output;
}

void write_summary_csv(std::ostream& os, const std::string& figure,
                       const std::vector<CellSummary>& rows) {
  os << "figure,x_name,x_value,ranking,metric,mean,ci_lo,ci_hi,n_converged,n_total\n";
  auto emit = [&](const CellSummary& row, const std::string& metric, double mean,
                  double lo, double hi, int n_converged) {
    os << figure << ',' << row.x_name << ',' << format_double(row.x_value) << ','
       << to_string(row.ranking) << ',' << metric << ',' << format_double(mean) << ','
       << format_double(lo) << ',' << format_double(hi) << ',' << n_converged << ','
       << row.n_total << '\n';
  };
  for (const CellSummary& row : rows) {
    emit(row, "convergence_rate", row.convergence_rate, row.rate_ci_lo, row.rate_ci_hi,
         row.n_converged);
    for (const auto& [metric, stats] :
         {std::pair<std::string, const CellStats&>{"publishers_welfare", row.publishers},
          std::pair<std::string, const CellStats&>{"users_welfare", row.users}}) {
      if (stats.mean.has_value()) {
        emit(row, metric, *stats.mean, *stats.ci_lo, *stats.ci_hi, stats.n_used);
      } else {
        os << figure << ',' << row.x_name << ',' << format_double(row.x_value) << ','
           << to_string(row.ranking) << ',' << metric << ",,,," << stats.n_used << ','
           << row.n_total << '\n';
      }
    }
  }
}

void write_runs_jsonl(std::ostream& os, const std::string& figure,
                      const std::vector<RawRun>& raw) {
  for (const RawRun& run : raw) {
    nlohmann::json j;
    j["figure"] = figure;
    j["x_name"] = run.x_name;
    j["x_value"] = run.x_value;
    j["ranking"] = to_string(run.ranking);
    j["game"] = run.game_index;
    j["seed"] = run.dynamics_seed;
    j["converged"] = run.result.converged;
    j["iters"] = run.result.iterations;
    j["publishers_welfare"] = run.result.publishers_welfare;
    j["users_welfare"] = run.result.users_welfare;
    os << j.dump() << '\n';
  }
}

std::vector<std::string> reproduce_figures(const ExperimentConfig& config,
                                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  auto write_figure = [&](const std::string& figure, const SweepOutput& output) {
    std::vector<std::string> paths;
    const fs::path csv_path = fs::path(out_dir) / (figure + ".csv");
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    write_summary_csv(csv, figure, output.rows);
    paths.push_back(csv_path.string());

    const fs::path runs_path = fs::path(out_dir) / (figure + "_runs.jsonl");
    std::ofstream runs(runs_path);
    if (!runs) throw std::runtime_error("cannot write " + runs_path.string());
    write_runs_jsonl(runs, figure, output.raw);
    paths.push_back(runs_path.string());
    return paths;
  };

  std::vector<std::string> written;

  // Discrete-dynamics comparison of all three rankings over the lambda grid.
  ExperimentConfig fig1 = config;
  fig1.mode = DynamicsMode::Discrete;
  fig1.rankings = {RankingKind::Prp, RankingKind::LinearRrp, RankingKind::SoftmaxRrp};
  for (const std::string& p : write_figure("fig1", run_sweep(fig1, SweepAxis::Lambda)))
    written.push_back(p);

  // Smooth-dynamics linear vs softmax over the k grid, at lambda = 1 and 0.1.
  ExperimentConfig fig2 = config;
  fig2.mode = DynamicsMode::Smooth;
  fig2.rankings = {RankingKind::LinearRrp, RankingKind::SoftmaxRrp};
  fig2.lambda = 1.0;
  for (const std::string& p : write_figure("fig2", run_sweep(fig2, SweepAxis::K)))
    written.push_back(p);

  ExperimentConfig fig3 = fig2;
  fig3.lambda = 0.1;
  for (const std::string& p : write_figure("fig3", run_sweep(fig3, SweepAxis::K)))
    written.push_back(p);

  return written;
}

}  // namespace pubgame
