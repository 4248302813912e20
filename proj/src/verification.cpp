#include "pubgame/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <thread>

#include "pubgame/errors.hpp"
#include "pubgame/rng.hpp"

namespace pubgame {

namespace {

constexpr double kGridBudget = 1e8;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

double exact_potential(const PublishersGame& game, const StrategyProfile& profile) {
  if (game.ranking_spec().kind != RankingKind::LinearRrp)
    throw unsupported_config("exact potential is defined for linear rankings only");
  game.validate_profile(profile);
  const double a = resolved_slope(game.ranking_spec(), game.n());
  const double intercept = 1.0 / game.n();
  double phi = 0.0;
  for (int i = 0; i < game.n(); ++i) {
    const double ds = game.dist_to_info_need(profile.docs[i]);
    const double d0 = game.dist_to_initial(i, profile.docs[i]);
    phi += -(a * ds + intercept) - game.lambda() * d0;
  }
  return phi;
}

double check_potential_identity(const PublishersGame& game, int samples,
                                std::uint64_t seed) {
  if (game.ranking_spec().kind != RankingKind::LinearRrp)
    throw unsupported_config("potential identity is defined for linear rankings only");
  if (samples < 1) throw std::invalid_argument("need at least one sample");

  Rng rng(seed);
  const int n = game.n();
  const int k = game.k();
  auto random_point = [&] {
    Point p(k);
    for (double& v : p) v = rng.uniform01();
    return p;
  };

  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    StrategyProfile base;
    base.docs.resize(n);
    for (Point& doc : base.docs) doc = random_point();
    const int i = static_cast<int>(rng.uniform_index(n));

    StrategyProfile first = base;
    first.docs[i] = random_point();
    StrategyProfile second = base;
    second.docs[i] = random_point();

    const double delta_phi =
        exact_potential(game, first) - exact_potential(game, second);
    const double delta_u = utility(game, first)[i] - utility(game, second)[i];
    worst = std::max(worst, std::abs(delta_phi - delta_u));
  }
  return worst;
}

DiecReport diec_ratio(const RankingSpec& ranking, int n) {
  if (n < 2) throw std::invalid_argument("diec ratio: n must be >= 2");
  // The extreme profile matters only through d*, so it is built abstractly:
  // the winner at d* = 0, everyone else at d* = 1.
  std::vector<double> dstar(n, 1.0);
  dstar[0] = 0.0;
  const RankingDistribution r = rank_from_dstar(ranking, dstar);

  DiecReport report;
  report.kind = ranking.kind;
  report.n = n;
  const double winner = r.probs[0];
  const double loser = r.probs[1];
  report.measured_ratio = loser > 0.0 ? winner / loser
                                      : std::numeric_limits<double>::infinity();
  switch (ranking.kind) {
    case RankingKind::Prp:
      report.claimed_alpha = std::numeric_limits<double>::infinity();
      break;
    case RankingKind::LinearRrp:
      report.claimed_alpha = 2.0;
      break;
    case RankingKind::SoftmaxRrp:
      report.claimed_alpha = std::exp(1.0);
      break;
    case RankingKind::Random:
      report.claimed_alpha = 1.0;
      break;
  }
  return report;
}

double default_grid_epsilon(double lambda, int resolution) {
  return 0.5 * lambda / resolution;
}

GridSearchResult grid_pne_search(const PublishersGame& game, int resolution,
                                 double epsilon, int jobs) {
  if (resolution < 2) throw std::invalid_argument("grid search: resolution must be >= 2");
  if (epsilon < 0.0) throw std::invalid_argument("grid search: epsilon must be >= 0");
  const int n = game.n();
  const int k = game.k();
  if (std::pow(static_cast<double>(resolution), n * k) > kGridBudget)
    throw budget_exceeded("grid search: resolution^(n*k) exceeds the 1e8 budget");

  // All R^k grid documents, with d* and per-publisher d0 precomputed.
  long docs_count = 1;
  for (int t = 0; t < k; ++t) docs_count *= resolution;
  std::vector<Point> docs(docs_count, Point(k));
  for (long idx = 0; idx < docs_count; ++idx) {
    long rem = idx;
    for (int t = 0; t < k; ++t) {
      docs[idx][t] = static_cast<double>(rem % resolution) / (resolution - 1);
      rem /= resolution;
    }
  }
  std::vector<double> dstar_table(docs_count);
  std::vector<std::vector<double>> d0_table(n, std::vector<double>(docs_count));
  for (long idx = 0; idx < docs_count; ++idx) {
    dstar_table[idx] = game.dist_to_info_need(docs[idx]);
    for (int i = 0; i < n; ++i)
      d0_table[i][idx] = game.dist_to_initial(i, docs[idx]);
  }

  long profile_count = 1;
  for (int i = 0; i < n; ++i) profile_count *= docs_count;

  auto is_equilibrium = [&](long profile_idx, std::vector<long>& doc_idx,
                            std::vector<double>& dstar) {
    long rem = profile_idx;
    for (int i = 0; i < n; ++i) {
      doc_idx[i] = rem % docs_count;
      rem /= docs_count;
      dstar[i] = dstar_table[doc_idx[i]];
    }
    for (int i = 0; i < n; ++i) {
      const double u_now = rank_from_dstar(game.ranking_spec(), dstar).probs[i] -
                           game.lambda() * d0_table[i][doc_idx[i]];
      const double saved = dstar[i];
      for (long alt = 0; alt < docs_count; ++alt) {
        if (alt == doc_idx[i]) continue;
        dstar[i] = dstar_table[alt];
        const double u_alt = rank_from_dstar(game.ranking_spec(), dstar).probs[i] -
                             game.lambda() * d0_table[i][alt];
        if (u_alt - u_now > epsilon) {
          dstar[i] = saved;
          return false;
        }
      }
      dstar[i] = saved;
    }
    return true;
  };

  const int workers = std::max(1, jobs);
  std::vector<std::vector<long>> found_per_worker(workers);
  std::atomic<long> next_chunk{0};
  const long chunk_size = 1024;
  const long chunks = (profile_count + chunk_size - 1) / chunk_size;

  auto worker_fn = [&](int w) {
    std::vector<long> doc_idx(n);
    std::vector<double> dstar(n);
    for (;;) {
      const long chunk = next_chunk.fetch_add(1);
      if (chunk >= chunks) break;
      const long lo = chunk * chunk_size;
      const long hi = std::min(lo + chunk_size, profile_count);
      for (long p = lo; p < hi; ++p)
        if (is_equilibrium(p, doc_idx, dstar)) found_per_worker[w].push_back(p);
    }
  };

  if (workers == 1) {
    worker_fn(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn, w);
    for (std::thread& t : pool) t.join();
  }

  std::vector<long> found;
  for (const auto& part : found_per_worker)
    found.insert(found.end(), part.begin(), part.end());
  std::sort(found.begin(), found.end());

  GridSearchResult result;
  result.resolution = resolution;
  result.epsilon = epsilon;
  result.exhaustive = true;
  result.found_equilibria.reserve(found.size());
  for (long profile_idx : found) {
    StrategyProfile profile;
    profile.docs.resize(n);
    long rem = profile_idx;
    for (int i = 0; i < n; ++i) {
      profile.docs[i] = docs[rem % docs_count];
      rem /= docs_count;
    }
    result.found_equilibria.push_back(std::move(profile));
  }
  return result;
}

namespace {

PublishersGame random_linear_game(int n, int k, std::optional<double> slope, Rng& rng) {
  std::vector<Point> docs(n, Point(k));
  for (Point& doc : docs)
    for (double& v : doc) v = rng.uniform01();
  Point star(k);
  for (double& v : star) v = rng.uniform01();
  RankingSpec ranking;
  ranking.kind = RankingKind::LinearRrp;
  ranking.slope = slope;
  return PublishersGame(n, k, rng.uniform(0.1, 2.0),
                        DistanceSpec::normalized_squared_euclidean(k), docs, star,
                        ranking);
}

CheckResult check_potential_family(const std::string& name, double slope_factor,
                                   const VerifyOptions& options) {
  // slope = slope_factor / n, exercised over a spread of game sizes.
  const int sizes[] = {2, 3, 5};
  const int dims[] = {1, 2, 8};
  const int per_game =
      options.potential_samples / (std::size(sizes) * std::size(dims)) + 1;
  Rng rng(derive_seed(options.seed, 1, static_cast<std::uint64_t>(slope_factor * 1e6)));
  double worst = 0.0;
  for (int n : sizes) {
    for (int k : dims) {
      PublishersGame game = random_linear_game(n, k, slope_factor / n, rng);
      worst = std::max(worst, check_potential_identity(
                                  game, per_game, derive_seed(options.seed, 2, n, k)));
    }
  }
  return {name, worst < 1e-9,
          "max |d(potential) - d(utility)| = " + format_double(worst)};
}

CheckResult check_slope_boundary(const VerifyOptions& options) {
  bool ok = true;
  std::string detail;
  auto slope_accepted = [&](int n, double a) {
    if (options.inject_slope_fault) {
      // Broken predicate on purpose: accepts slopes just past the cap.
      return a > 0.0 && a <= 1.0 / n + 1e-8;
    }
    RankingSpec spec;
    spec.kind = RankingKind::LinearRrp;
    spec.slope = a;
    try {
      resolved_slope(spec, n);
      return true;
    } catch (const std::invalid_argument&) {
      return false;
    }
  };

  for (int n : {2, 3, 5, 10}) {
    if (!slope_accepted(n, 1.0 / n)) {
      ok = false;
      detail += "slope 1/n rejected at n=" + std::to_string(n) + "; ";
    }
    if (slope_accepted(n, 1.0 / n + 1e-9)) {
      ok = false;
      detail += "slope 1/n+1e-9 accepted at n=" + std::to_string(n) + "; ";
    }
    if (slope_accepted(n, 0.0)) {
      ok = false;
      detail += "slope 0 accepted at n=" + std::to_string(n) + "; ";
    }
  }

  // Accepted slopes must produce genuine distributions.
  Rng rng(derive_seed(options.seed, 3));
  double worst_sum = 0.0;
  double worst_range = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    std::vector<double> dstar(n);
    for (double& v : dstar) v = rng.uniform01();
    RankingSpec spec;
    spec.kind = RankingKind::LinearRrp;
    spec.slope = rng.uniform01() / n;
    if (*spec.slope == 0.0) spec.slope = 1.0 / n;
    const RankingDistribution r = rank_from_dstar(spec, dstar);
    double total = 0.0;
    for (double p : r.probs) {
      total += p;
      worst_range = std::max({worst_range, -p, p - 1.0});
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  if (worst_sum > 1e-12 || worst_range > 0.0) ok = false;
  detail += "max |sum - 1| = " + format_double(worst_sum);
  return {"slope-boundary", ok, detail};
}

CheckResult check_diec_linear(const VerifyOptions&) {
  RankingSpec spec;
  spec.kind = RankingKind::LinearRrp;
  bool ok = true;
  std::string detail;
  for (int n : {3, 4, 10, 1000}) {
    const DiecReport report = diec_ratio(spec, n);
    const double expected = (2.0 * n - 2.0) / (n - 2.0);
    if (std::abs(report.measured_ratio - expected) > 1e-12) {
      ok = false;
      detail += "n=" + std::to_string(n) + " off; ";
    }
  }
  if (!std::isinf(diec_ratio(spec, 2).measured_ratio)) {
    ok = false;
    detail += "n=2 ratio not infinite; ";
  }
  const double at_1000 = diec_ratio(spec, 1000).measured_ratio;
  if (std::abs(at_1000 - 2.0) > 0.02) {
    ok = false;
    detail += "limit at n=1000 off; ";
  }
  detail += "ratio(1000) = " + format_double(at_1000);
  return {"diec-ratio-linear", ok, detail};
}

CheckResult check_diec_softmax(const VerifyOptions&) {
  RankingSpec spec;
  spec.kind = RankingKind::SoftmaxRrp;
  bool ok = true;
  double worst = 0.0;
  for (int n = 2; n <= 1000; ++n) {
    const DiecReport report = diec_ratio(spec, n);
    const double expected = std::exp(static_cast<double>(n) / (n - 1.0));
    worst = std::max(worst, std::abs(report.measured_ratio - expected));
  }
  if (worst > 1e-12) ok = false;
  const double at_1000 = diec_ratio(spec, 1000).measured_ratio;
  if (std::abs(at_1000 - std::exp(1.0)) > 0.01 * std::exp(1.0)) ok = false;
  return {"diec-ratio-softmax", ok,
          "max |ratio - e^(n/(n-1))| = " + format_double(worst) +
              ", ratio(1000) = " + format_double(at_1000)};
}

CheckResult check_diec_random_prp(const VerifyOptions&) {
  bool ok = true;
  std::string detail;
  RankingSpec random_spec;
  random_spec.kind = RankingKind::Random;
  for (int n : {2, 3, 10}) {
    if (diec_ratio(random_spec, n).measured_ratio != 1.0) {
      ok = false;
      detail += "random ratio != 1 at n=" + std::to_string(n) + "; ";
    }
  }
  RankingSpec prp_spec;
  prp_spec.kind = RankingKind::Prp;
  for (int n : {2, 3, 10}) {
    if (!std::isinf(diec_ratio(prp_spec, n).measured_ratio)) {
      ok = false;
      detail += "prp ratio finite at n=" + std::to_string(n) + "; ";
    }
  }
  if (detail.empty()) detail = "random = 1, prp = inf";
  return {"diec-ratio-random-prp", ok, detail};
}

CheckResult check_diec_slope_monotone(const VerifyOptions&) {
  // The extreme-profile ratio grows with the slope at fixed n.
  const int n = 5;
  bool ok = true;
  double prev = 0.0;
  for (double a : {0.02, 0.05, 0.1, 0.15, 1.0 / n}) {
    RankingSpec spec;
    spec.kind = RankingKind::LinearRrp;
    spec.slope = a;
    const double ratio = diec_ratio(spec, n).measured_ratio;
    if (ratio <= prev) ok = false;
    prev = ratio;
  }
  return {"diec-slope-monotone", ok, "ratio at n=5 strictly increasing in slope"};
}

PublishersGame no_equilibrium_game(RankingKind kind) {
  RankingSpec ranking;
  ranking.kind = kind;
  return PublishersGame(2, 1, 1.0, DistanceSpec::absolute_1d(),
                        {{0.0}, {0.0}}, {1.0}, ranking);
}

CheckResult check_grid_oracle(const VerifyOptions& options) {
  const int resolution = options.grid_resolution;
  const double epsilon = default_grid_epsilon(1.0, resolution);
  const GridSearchResult under_prp =
      grid_pne_search(no_equilibrium_game(RankingKind::Prp), resolution, epsilon,
                      options.jobs);
  const GridSearchResult under_linear =
      grid_pne_search(no_equilibrium_game(RankingKind::LinearRrp), resolution, epsilon,
                      options.jobs);
  const bool ok =
      under_prp.found_equilibria.empty() && !under_linear.found_equilibria.empty();
  return {"grid-oracle-no-pne", ok,
          "prp equilibria = " + std::to_string(under_prp.found_equilibria.size()) +
              ", linear equilibria = " +
              std::to_string(under_linear.found_equilibria.size())};
}

CheckResult check_grid_known_equilibrium(const VerifyOptions& options) {
  // A cost factor this large pins everyone to the grid point nearest their
  // initial document; the search must find exactly that profile.
  RankingSpec ranking;
  ranking.kind = RankingKind::Random;
  PublishersGame game(2, 1, 100.0, DistanceSpec::normalized_squared_euclidean(1),
                      {{0.31}, {0.74}}, {0.5}, ranking);
  const int resolution = 11;
  const GridSearchResult result = grid_pne_search(game, resolution, 1e-9, options.jobs);
  const StrategyProfile expected{{{0.3}, {0.7}}};
  bool found = false;
  for (const StrategyProfile& p : result.found_equilibria) {
    if (std::abs(p.docs[0][0] - expected.docs[0][0]) < 1e-12 &&
        std::abs(p.docs[1][0] - expected.docs[1][0]) < 1e-12)
      found = true;
  }
  return {"grid-known-equilibrium", found,
          "found " + std::to_string(result.found_equilibria.size()) + " equilibria"};
}

CheckResult check_prp_discontinuity(const VerifyOptions&) {
  RankingSpec ranking;
  ranking.kind = RankingKind::Prp;
  PublishersGame game(2, 1, 1.0, DistanceSpec::absolute_1d(), {{0.0}, {0.0}}, {1.0},
                      ranking);
  const StrategyProfile near{{{0.5}, {0.5 - 1e-7}}};
  const StrategyProfile far{{{0.5}, {0.5 + 1e-7}}};
  const RankingDistribution r_near = rank(game, near);
  const RankingDistribution r_far = rank(game, far);
  const double jump = std::abs(r_near.probs[0] - r_far.probs[0]);
  return {"prp-discontinuity", jump == 1.0,
          "probability jump " + format_double(jump) + " across a 2e-7 move"};
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const VerifyOptions& options) {
  std::vector<CheckResult> all;
  all.push_back(check_potential_family("potential-identity-slope-max", 1.0, options));
  all.push_back(check_potential_family("potential-identity-slope-half", 0.5, options));
  all.push_back(check_potential_family("potential-identity-slope-tenth", 0.1, options));
  all.push_back(check_slope_boundary(options));
  all.push_back(check_diec_linear(options));
  all.push_back(check_diec_softmax(options));
  all.push_back(check_diec_random_prp(options));
  all.push_back(check_diec_slope_monotone(options));
  all.push_back(check_grid_oracle(options));
  all.push_back(check_grid_known_equilibrium(options));
  all.push_back(check_prp_discontinuity(options));

  if (options.only.empty()) return all;
  std::vector<CheckResult> filtered;
  for (CheckResult& check : all)
    if (check.name.find(options.only) != std::string::npos)
      filtered.push_back(std::move(check));
  return filtered;
}

}  // namespace pubgame
