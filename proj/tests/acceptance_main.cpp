// Acceptance suite: exercises the headline guarantees end to end and prints
// one pass/fail line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pubgame/experiments.hpp"
#include "pubgame/rng.hpp"
#include "pubgame/verification.hpp"

using namespace pubgame;

namespace {

constexpr std::uint64_t kSeed = 42;

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& name, bool passed, const std::string& detail,
            double seconds, std::optional<double> budget = {}) {
  std::string timing = " [" + std::to_string(seconds).substr(0, 6) + "s";
  if (budget) {
    timing += " / budget " + std::to_string(static_cast<int>(*budget)) + "s";
    if (seconds >= *budget) passed = false;
  }
  timing += "]";
  std::printf("[%s] criterion %d: %s — %s%s\n", passed ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str(), timing.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

int worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : static_cast<int>(hw);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

RankingSpec spec_of(RankingKind kind, std::optional<double> slope = {}) {
  RankingSpec spec;
  spec.kind = kind;
  spec.slope = slope;
  return spec;
}

PublishersGame random_game(RankingKind kind, int n, int k, Rng& rng,
                           std::optional<double> slope = {}) {
  std::vector<Point> docs(n, Point(k));
  for (Point& doc : docs)
    for (double& v : doc) v = rng.uniform01();
  Point star(k);
  for (double& v : star) v = rng.uniform01();
  return PublishersGame(n, k, rng.uniform(0.1, 2.0),
                        DistanceSpec::normalized_squared_euclidean(k), docs, star,
                        spec_of(kind, slope));
}

void criterion_potential_identity() {
  Timer timer;
  Rng rng(derive_seed(kSeed, 101));
  double worst = 0.0;
  long deviations = 0;
  while (deviations < 10000) {
    for (int n : {2, 3, 5}) {
      for (int k : {1, 2, 8}) {
        const PublishersGame game = random_game(RankingKind::LinearRrp, n, k, rng);
        const int samples = 120;
        worst = std::max(worst, check_potential_identity(
                                    game, samples, derive_seed(kSeed, 102, deviations)));
        deviations += samples;
      }
    }
  }
  report(1, "exact-potential identity", worst < 1e-9,
         std::to_string(deviations) + " deviations, max violation " + fmt(worst) +
             " (< 1e-9)",
         timer.seconds(), 10.0);
}

PublishersGame line_game(RankingKind kind) {
  return PublishersGame(2, 1, 1.0, DistanceSpec::absolute_1d(), {{0.0}, {0.0}},
                        {1.0}, spec_of(kind));
}

void criterion_grid_oracle() {
  Timer timer;
  const int resolution = 101;
  const double epsilon = default_grid_epsilon(1.0, resolution);
  const GridSearchResult prp =
      grid_pne_search(line_game(RankingKind::Prp), resolution, epsilon, worker_count());
  const GridSearchResult linear = grid_pne_search(line_game(RankingKind::LinearRrp),
                                                  resolution, epsilon, worker_count());
  const bool passed = prp.exhaustive && linear.exhaustive &&
                      prp.found_equilibria.empty() && !linear.found_equilibria.empty();
  report(2, "exhaustive grid oracle",
         passed,
         "winner-take-all equilibria: " + std::to_string(prp.found_equilibria.size()) +
             " (want 0), linear equilibria: " +
             std::to_string(linear.found_equilibria.size()) + " (want >= 1)",
         timer.seconds(), 30.0);
}

ExperimentConfig base_experiment() {
  ExperimentConfig config;
  config.master_seed = kSeed;
  config.jobs = worker_count();
  return config;
}

std::string csv_bytes(const std::string& figure, const std::vector<CellSummary>& rows) {
  std::ostringstream out;
  write_summary_csv(out, figure, rows);
  return out.str();
}

void criterion_discrete_convergence(const SweepOutput& fig1) {
  Timer timer;
  bool rrp_perfect = true;
  double prp_rate_sum = 0.0;
  int prp_cells = 0;
  for (const CellSummary& row : fig1.rows) {
    if (row.ranking == RankingKind::LinearRrp || row.ranking == RankingKind::SoftmaxRrp) {
      if (row.convergence_rate != 1.0) rrp_perfect = false;
    } else if (row.ranking == RankingKind::Prp) {
      prp_rate_sum += row.convergence_rate;
      ++prp_cells;
    }
  }
  const double prp_avg = prp_cells > 0 ? prp_rate_sum / prp_cells : 1.0;
  const bool passed = rrp_perfect && prp_avg <= 0.5;
  report(3, "discrete convergence rates", passed,
         std::string("linear/softmax rate == 1.0 at every lambda: ") +
             (rrp_perfect ? "yes" : "NO") + ", mean winner-take-all rate " +
             fmt(prp_avg) + " (<= 0.5)",
         timer.seconds());
}

void criterion_diec_ratios() {
  Timer timer;
  bool passed = true;
  std::string detail;

  for (int n : {3, 4, 10, 1000}) {
    const double measured =
        diec_ratio(spec_of(RankingKind::LinearRrp), n).measured_ratio;
    const double expected = (2.0 * n - 2.0) / (n - 2.0);
    if (std::abs(measured - expected) > 1e-12) {
      passed = false;
      detail += "linear n=" + std::to_string(n) + " off; ";
    }
  }
  if (std::abs(diec_ratio(spec_of(RankingKind::LinearRrp), 1000).measured_ratio - 2.0) >
      0.02)
    passed = false;

  double softmax_worst = 0.0;
  for (int n = 2; n <= 1000; ++n) {
    const double measured =
        diec_ratio(spec_of(RankingKind::SoftmaxRrp), n).measured_ratio;
    const double expected = std::exp(static_cast<double>(n) / (n - 1.0));
    softmax_worst = std::max(softmax_worst, std::abs(measured - expected));
  }
  if (softmax_worst > 1e-12) passed = false;
  if (std::abs(diec_ratio(spec_of(RankingKind::SoftmaxRrp), 2).measured_ratio -
               std::exp(2.0)) > 1e-12)
    passed = false;

  for (int n : {2, 3, 10, 100}) {
    if (diec_ratio(spec_of(RankingKind::Random), n).measured_ratio != 1.0)
      passed = false;
  }

  report(4, "extreme-profile ratio formulas", passed,
         detail + "softmax max deviation " + fmt(softmax_worst) + " (< 1e-12)",
         timer.seconds());
}

void criterion_slope_boundary() {
  Timer timer;
  bool passed = true;
  std::string detail;
  for (int n : {2, 3, 5, 10, 100}) {
    RankingSpec spec = spec_of(RankingKind::LinearRrp);
    spec.slope = 1.0 / n;
    try {
      resolved_slope(spec, n);
    } catch (const std::invalid_argument&) {
      passed = false;
      detail += "1/n rejected at n=" + std::to_string(n) + "; ";
    }
    for (double bad : {1.0 / n + 1e-9, 0.0}) {
      spec.slope = bad;
      try {
        resolved_slope(spec, n);
        passed = false;
        detail += "slope " + fmt(bad) + " accepted at n=" + std::to_string(n) + "; ";
      } catch (const std::invalid_argument&) {
      }
    }
  }

  Rng rng(derive_seed(kSeed, 105));
  double worst_sum = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(8));
    std::vector<double> dstar(n);
    for (double& v : dstar) v = rng.uniform01();
    RankingSpec spec = spec_of(RankingKind::LinearRrp);
    const double draw = rng.uniform01();
    spec.slope = draw > 0.0 ? draw / n : 1.0 / n;
    double total = 0.0;
    for (double p : rank_from_dstar(spec, dstar).probs) {
      total += p;
      if (p < 0.0 || p > 1.0) passed = false;
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  if (worst_sum > 1e-12) passed = false;
  report(5, "slope acceptance boundary", passed,
         detail + "max |sum - 1| over 10000 profiles " + fmt(worst_sum) + " (< 1e-12)",
         timer.seconds());
}

void criterion_gradient_check() {
  Timer timer;
  const double h = 1e-6;
  bool passed = true;
  std::string detail;
  Rng rng(derive_seed(kSeed, 106));
  for (RankingKind kind : {RankingKind::LinearRrp, RankingKind::SoftmaxRrp}) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_index(4));
      const int k = 1 + static_cast<int>(rng.uniform_index(8));
      const PublishersGame game = random_game(kind, n, k, rng);
      StrategyProfile profile;
      profile.docs.assign(n, Point(k));
      for (Point& doc : profile.docs)
        for (double& v : doc) v = rng.uniform(0.05, 0.95);
      const int i = static_cast<int>(rng.uniform_index(n));

      const std::vector<double> analytic = utility_gradient(game, profile, i);
      double err_sq = 0.0, norm_sq = 0.0;
      for (int t = 0; t < k; ++t) {
        StrategyProfile up = profile, down = profile;
        up.docs[i][t] += h;
        down.docs[i][t] -= h;
        const double fd = (utility(game, up)[i] - utility(game, down)[i]) / (2.0 * h);
        err_sq += (analytic[t] - fd) * (analytic[t] - fd);
        norm_sq += fd * fd;
      }
      worst =
          std::max(worst, std::sqrt(err_sq) / std::max(std::sqrt(norm_sq), 1e-6));
    }
    if (worst >= 1e-5) passed = false;
    detail += to_string(kind) + " worst rel err " + fmt(worst) + "; ";
  }
  report(6, "analytic gradients vs finite differences", passed, detail + "(< 1e-5)",
         timer.seconds(), 5.0);
}

struct OrderingOutcome {
  bool ordering = true;
  int separated_pub = 0;
  int separated_users = 0;
  int cells = 0;
  double worst_pub_gap = 1.0;    // smallest (winner - loser) publisher gap
  double worst_users_gap = 1.0;  // smallest (winner - loser) users gap
};

// fig2-style dominance: the designated winner must beat the other ranking on
// its metric at every k.
OrderingOutcome compare_rankings(const SweepOutput& output, RankingKind pub_winner,
                                 RankingKind users_winner) {
  OrderingOutcome outcome;
  for (std::size_t i = 0; i < output.rows.size(); i += 2) {
    const CellSummary& a = output.rows[i];
    const CellSummary& b = output.rows[i + 1];
    const CellSummary& pub_hi = a.ranking == pub_winner ? a : b;
    const CellSummary& pub_lo = a.ranking == pub_winner ? b : a;
    const CellSummary& users_hi = a.ranking == users_winner ? a : b;
    const CellSummary& users_lo = a.ranking == users_winner ? b : a;
    ++outcome.cells;
    if (!pub_hi.publishers.mean || !pub_lo.publishers.mean ||
        *pub_hi.publishers.mean < *pub_lo.publishers.mean)
      outcome.ordering = false;
    if (!users_hi.users.mean || !users_lo.users.mean ||
        *users_hi.users.mean < *users_lo.users.mean)
      outcome.ordering = false;
    if (pub_hi.publishers.mean && pub_lo.publishers.mean)
      outcome.worst_pub_gap = std::min(
          outcome.worst_pub_gap, *pub_hi.publishers.mean - *pub_lo.publishers.mean);
    if (users_hi.users.mean && users_lo.users.mean)
      outcome.worst_users_gap =
          std::min(outcome.worst_users_gap, *users_hi.users.mean - *users_lo.users.mean);
    if (pub_hi.publishers.ci_lo && pub_lo.publishers.ci_hi &&
        *pub_hi.publishers.ci_lo > *pub_lo.publishers.ci_hi)
      ++outcome.separated_pub;
    if (users_hi.users.ci_lo && users_lo.users.ci_hi &&
        *users_hi.users.ci_lo > *users_lo.users.ci_hi)
      ++outcome.separated_users;
  }
  return outcome;
}

void criterion_fig2(const SweepOutput& fig2) {
  Timer timer;
  const OrderingOutcome outcome =
      compare_rankings(fig2, RankingKind::SoftmaxRrp, RankingKind::SoftmaxRrp);
  const bool majority = outcome.separated_pub * 2 > outcome.cells &&
                        outcome.separated_users * 2 > outcome.cells;
  report(7, "smooth welfare dominance at unit cost", outcome.ordering && majority,
         std::string("softmax >= linear on both metrics at every k: ") +
             (outcome.ordering ? "yes" : "NO") + " (smallest gaps " +
             fmt(outcome.worst_pub_gap) + " pub, " + fmt(outcome.worst_users_gap) +
             " users); CI separation " + std::to_string(outcome.separated_pub) + "/" +
             std::to_string(outcome.cells) + " (publishers), " +
             std::to_string(outcome.separated_users) + "/" +
             std::to_string(outcome.cells) + " (users)",
         timer.seconds());
}

void criterion_fig3(const SweepOutput& fig3) {
  Timer timer;
  const OrderingOutcome outcome =
      compare_rankings(fig3, RankingKind::SoftmaxRrp, RankingKind::LinearRrp);
  report(8, "smooth welfare trade-off at low cost", outcome.ordering,
         std::string("softmax wins publishers and linear wins users at every k: ") +
             (outcome.ordering ? "yes" : "NO") + " (smallest gaps " +
             fmt(outcome.worst_pub_gap) + " pub, " + fmt(outcome.worst_users_gap) +
             " users)",
         timer.seconds());
}

}  // namespace

int main() {
  criterion_potential_identity();
  criterion_grid_oracle();

  // Shared sweeps behind criteria 3, 7, 8 and the determinism rerun.
  ExperimentConfig fig1_config = base_experiment();
  fig1_config.mode = DynamicsMode::Discrete;
  fig1_config.rankings = {RankingKind::Prp, RankingKind::LinearRrp,
                          RankingKind::SoftmaxRrp};

  ExperimentConfig fig2_config = base_experiment();
  fig2_config.mode = DynamicsMode::Smooth;
  fig2_config.rankings = {RankingKind::LinearRrp, RankingKind::SoftmaxRrp};
  fig2_config.lambda = 1.0;

  ExperimentConfig fig3_config = fig2_config;
  fig3_config.lambda = 0.1;

  Timer fig1_timer;
  const SweepOutput fig1 = run_sweep(fig1_config, SweepAxis::Lambda);
  const double fig1_seconds = fig1_timer.seconds();
  criterion_discrete_convergence(fig1);
  std::printf("       (lambda sweep took %.1fs; budget 600s)\n", fig1_seconds);
  if (fig1_seconds >= 600.0) {
    std::printf("[FAIL] criterion 3 runtime budget exceeded\n");
    ++g_failures;
  }

  criterion_diec_ratios();
  criterion_slope_boundary();
  criterion_gradient_check();

  Timer smooth_timer;
  const SweepOutput fig2 = run_sweep(fig2_config, SweepAxis::K);
  const SweepOutput fig3 = run_sweep(fig3_config, SweepAxis::K);
  const double smooth_seconds = smooth_timer.seconds();
  criterion_fig2(fig2);
  criterion_fig3(fig3);
  std::printf("       (k sweeps took %.1fs combined; budget 1800s)\n", smooth_seconds);
  if (smooth_seconds >= 1800.0) {
    std::printf("[FAIL] criteria 7-8 runtime budget exceeded\n");
    ++g_failures;
  }

  {
    Timer timer;
    // Same seeds, different pool widths: the bytes must not move.
    ExperimentConfig fig1_again = fig1_config;
    fig1_again.jobs = std::max(1, fig1_config.jobs / 2);
    ExperimentConfig fig2_again = fig2_config;
    fig2_again.jobs = fig2_config.jobs + 1;
    ExperimentConfig fig3_again = fig3_config;
    fig3_again.jobs = 1 + fig3_config.jobs % 3;
    const bool identical =
        csv_bytes("fig1", fig1.rows) ==
            csv_bytes("fig1", run_sweep(fig1_again, SweepAxis::Lambda).rows) &&
        csv_bytes("fig2", fig2.rows) ==
            csv_bytes("fig2", run_sweep(fig2_again, SweepAxis::K).rows) &&
        csv_bytes("fig3", fig3.rows) ==
            csv_bytes("fig3", run_sweep(fig3_again, SweepAxis::K).rows);
    report(9, "byte-identical reruns", identical,
           identical ? "all three CSV sets reproduced exactly"
                     : "CSV bytes differ between reruns",
           timer.seconds());
  }

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
