#include "pubgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "pubgame/errors.hpp"
#include "pubgame/rng.hpp"

namespace pubgame {

namespace {

constexpr double kTieTolerance = 1e-12;
// 3^k - 1 directions; beyond this the discrete move set is impractical.
constexpr int kMaxDiscreteDim = 12;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool ranking_is_differentiable(RankingKind kind) {
  return kind == RankingKind::LinearRrp || kind == RankingKind::SoftmaxRrp;
}

struct ResolvedConfig {
  DynamicsMode mode;
  double epsilon;
  int max_iters;
  std::vector<double> step_sizes;
  std::vector<Point> directions;  // discrete mode only
  InfeasiblePolicy infeasible;
  std::uint64_t rng_seed;
};

ResolvedConfig resolve(const PublishersGame& game, const DynamicsConfig& config) {
  ResolvedConfig rc;
  rc.mode = config.mode;
  rc.epsilon = config.epsilon;
  rc.max_iters =
      config.max_iters.value_or(DynamicsConfig::default_max_iters(config.mode, game.k()));
  rc.step_sizes = config.step_sizes;
  rc.infeasible = config.infeasible;
  rc.rng_seed = config.rng_seed;

  require(rc.epsilon > 0.0, "dynamics: epsilon must be positive");
  require(rc.max_iters >= 1, "dynamics: iteration cap must be >= 1");
  require(!rc.step_sizes.empty(), "dynamics: step-size set must be nonempty");
  for (double s : rc.step_sizes)
    require(s > 0.0, "dynamics: step sizes must be positive");

  if (rc.mode == DynamicsMode::Discrete) {
    rc.directions = config.directions.empty()
                        ? DynamicsConfig::default_directions(game.k())
                        : config.directions;
    require(!rc.directions.empty(), "dynamics: direction set must be nonempty");
    for (const Point& d : rc.directions) {
      require(static_cast<int>(d.size()) == game.k(),
              "dynamics: direction has wrong dimension");
      double sq = 0.0;
      for (double v : d) sq += v * v;
      require(std::abs(std::sqrt(sq) - 1.0) <= 1e-9,
              "dynamics: directions must have unit norm");
    }
  } else {
    if (!ranking_is_differentiable(game.ranking_spec().kind))
      throw unsupported_config("smooth dynamics need a differentiable ranking");
    if (game.distance_spec().kind != DistanceKind::NormalizedSquaredEuclidean)
      throw unsupported_config("smooth dynamics need the squared-Euclidean distance");
  }
  return rc;
}

// Utility of publisher i if it moved to doc, everyone else fixed. dstar is
// the current profile's d* vector; entry i is patched and restored.
double utility_if_moved(const PublishersGame& game, std::vector<double>& dstar,
                        int i, const Point& doc) {
  const double saved = dstar[i];
  dstar[i] = game.dist_to_info_need(doc);
  const RankingDistribution r = rank_from_dstar(game.ranking_spec(), dstar);
  dstar[i] = saved;
  return r.probs[i] - game.lambda() * game.dist_to_initial(i, doc);
}

struct ScoredCandidate {
  Point doc;
  double utility;
};

// Argmax tie set (sorted, deduplicated) with each candidate's utility.
std::vector<ScoredCandidate> scored_best_response(const PublishersGame& game,
                                                  const StrategyProfile& profile,
                                                  int publisher,
                                                  const ResolvedConfig& config,
                                                  std::vector<double>& dstar) {
  const Point& current = profile.docs[publisher];
  std::vector<Point> candidates;
  auto add_candidate = [&](Point p) {
    if (config.infeasible == InfeasiblePolicy::Clamp) {
      candidates.push_back(clamped_to_unit_cube(std::move(p)));
    } else if (in_unit_cube(p)) {
      candidates.push_back(std::move(p));
    }
  };

  if (config.mode == DynamicsMode::Discrete) {
    candidates.reserve(config.directions.size() * config.step_sizes.size());
    for (const Point& dir : config.directions) {
      for (double s : config.step_sizes) {
        Point p = current;
        for (int t = 0; t < game.k(); ++t) p[t] += s * dir[t];
        add_candidate(std::move(p));
      }
    }
  } else {
    const std::vector<double> grad = utility_gradient(game, profile, publisher);
    for (double s : config.step_sizes) {
      Point p = current;
      for (int t = 0; t < game.k(); ++t) p[t] += s * grad[t];
      add_candidate(std::move(p));
    }
  }
  if (candidates.empty()) return {};  // discard policy can strand a corner point

  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  double best = -std::numeric_limits<double>::infinity();
  for (Point& p : candidates) {
    const double u = utility_if_moved(game, dstar, publisher, p);
    best = std::max(best, u);
    scored.push_back({std::move(p), u});
  }
  std::erase_if(scored, [&](const ScoredCandidate& c) {
    return c.utility < best - kTieTolerance;
  });
  return scored;
}

double current_utility(const PublishersGame& game, const StrategyProfile& profile,
                       int publisher, const std::vector<double>& dstar) {
  const RankingDistribution r = rank_from_dstar(game.ranking_spec(), dstar);
  return r.probs[publisher] -
         game.lambda() * game.dist_to_initial(publisher, profile.docs[publisher]);
}

}  // namespace

std::vector<double> DynamicsConfig::default_step_sizes() {
  std::vector<double> steps(10);
  double v = 1.0;
  for (int j = 0; j < 10; ++j) {
    v *= 0.5;
    steps[j] = v;
  }
  return steps;
}

std::vector<Point> DynamicsConfig::default_directions(int k) {
  if (k < 1) throw std::invalid_argument("directions: dimension must be >= 1");
  if (k > kMaxDiscreteDim)
    throw std::invalid_argument(
        "directions: default discrete set has 3^k - 1 members; too large for k > " +
        std::to_string(kMaxDiscreteDim) + " (use smooth mode or pass directions)");
  long count = 1;
  for (int t = 0; t < k; ++t) count *= 3;
  std::vector<Point> dirs;
  dirs.reserve(count - 1);
  for (long idx = 0; idx < count; ++idx) {
    Point d(k);
    long rem = idx;
    double sq = 0.0;
    for (int t = 0; t < k; ++t) {
      d[t] = static_cast<double>(rem % 3 - 1);
      rem /= 3;
      sq += d[t] * d[t];
    }
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (double& v : d) v /= norm;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

int DynamicsConfig::default_max_iters(DynamicsMode mode, int k) {
  return mode == DynamicsMode::Discrete ? 100 : 100 * k;
}

std::vector<Point> restricted_best_response(const PublishersGame& game,
                                            const StrategyProfile& profile,
                                            int publisher,
                                            const DynamicsConfig& config) {
  game.validate_profile(profile);
  require(publisher >= 0 && publisher < game.n(), "best response: bad publisher index");
  const ResolvedConfig rc = resolve(game, config);
  std::vector<double> dstar = game.dstar(profile);
  std::vector<ScoredCandidate> scored =
      scored_best_response(game, profile, publisher, rc, dstar);
  std::vector<Point> out;
  out.reserve(scored.size());
  for (ScoredCandidate& c : scored) out.push_back(std::move(c.doc));
  return out;
}

std::vector<int> non_optimal_publishers(const PublishersGame& game,
                                        const StrategyProfile& profile,
                                        const DynamicsConfig& config) {
  game.validate_profile(profile);
  const ResolvedConfig rc = resolve(game, config);
  std::vector<double> dstar = game.dstar(profile);
  std::vector<int> improvable;
  for (int i = 0; i < game.n(); ++i) {
    const auto scored = scored_best_response(game, profile, i, rc, dstar);
    if (scored.empty()) continue;
    const double gain = scored.front().utility - current_utility(game, profile, i, dstar);
    if (gain >= rc.epsilon) improvable.push_back(i);
  }
  return improvable;
}

SimulationTrace run_dynamic(const PublishersGame& game, const DynamicsConfig& config) {
  const ResolvedConfig rc = resolve(game, config);
  Rng rng(rc.rng_seed);

  StrategyProfile profile = game.initial_profile();
  std::vector<double> dstar = game.dstar(profile);

  SimulationTrace trace;
  trace.converged = false;

  for (int t = 1; t <= rc.max_iters; ++t) {
    std::vector<int> improvable;
    std::vector<std::vector<ScoredCandidate>> responses(game.n());
    std::vector<double> current(game.n());
    for (int i = 0; i < game.n(); ++i) {
      responses[i] = scored_best_response(game, profile, i, rc, dstar);
      current[i] = current_utility(game, profile, i, dstar);
      if (!responses[i].empty() &&
          responses[i].front().utility - current[i] >= rc.epsilon)
        improvable.push_back(i);
    }

    if (improvable.empty()) {
      trace.converged = true;
      trace.iterations_used = t - 1;
      trace.final_profile = std::move(profile);
      trace.final_welfare = welfare(game, trace.final_profile);
      return trace;
    }

    // Two draws per iteration, in this order: mover, then candidate.
    const int mover =
        improvable[rng.uniform_index(improvable.size())];
    std::vector<ScoredCandidate>& tied = responses[mover];
    std::erase_if(tied, [&](const ScoredCandidate& c) {
      return c.utility - current[mover] < rc.epsilon;
    });
    const ScoredCandidate& choice = tied[rng.uniform_index(tied.size())];

    trace.steps.push_back({t, mover, profile.docs[mover], choice.doc,
                           choice.utility - current[mover]});
    profile.docs[mover] = choice.doc;
    dstar[mover] = game.dist_to_info_need(choice.doc);
  }

  trace.iterations_used = rc.max_iters;
  trace.final_profile = std::move(profile);
  trace.final_welfare = welfare(game, trace.final_profile);
  return trace;
}

std::vector<double> utility_gradient(const PublishersGame& game,
                                     const StrategyProfile& profile, int publisher) {
  game.validate_profile(profile);
  require(publisher >= 0 && publisher < game.n(), "gradient: bad publisher index");
  const RankingKind kind = game.ranking_spec().kind;
  if (!ranking_is_differentiable(kind))
    throw unsupported_config("utility gradient needs a differentiable ranking");
  if (game.distance_spec().kind != DistanceKind::NormalizedSquaredEuclidean)
    throw unsupported_config("utility gradient needs the squared-Euclidean distance");

  const int n = game.n();
  const std::vector<double> dstar = game.dstar(profile);

  // Sensitivity of the publisher's win probability to its own d*. Moving
  // publisher i changes every publisher's relative relevance: its own by -1
  // and each rival's by 1/(n-1) per unit of d*.
  double dprob_ddstar;
  if (kind == RankingKind::LinearRrp) {
    dprob_ddstar = -resolved_slope(game.ranking_spec(), n);
  } else {
    const std::vector<double> probs =
        softmax_map(relative_relevance_from_dstar(dstar));
    const double p = probs[publisher];
    dprob_ddstar = -p * (1.0 - p) * n / (n - 1.0);
  }

  const double scale = 2.0 / game.distance_spec().normalizer;
  const Point& doc = profile.docs[publisher];
  const Point& star = game.info_need();
  const Point& anchor = game.initial_docs()[publisher];
  std::vector<double> grad(game.k());
  for (int t = 0; t < game.k(); ++t) {
    grad[t] = dprob_ddstar * scale * (doc[t] - star[t]) -
              game.lambda() * scale * (doc[t] - anchor[t]);
  }
  return grad;
}

namespace {

nlohmann::json game_to_json(const PublishersGame& game) {
  nlohmann::json j;
  j["n"] = game.n();
  j["k"] = game.k();
  j["lambda"] = game.lambda();
  j["distance"] = {{"kind", to_string(game.distance_spec().kind)},
                   {"normalizer", game.distance_spec().normalizer}};
  j["initial_docs"] = game.initial_docs();
  j["info_need"] = game.info_need();
  nlohmann::json r;
  r["kind"] = to_string(game.ranking_spec().kind);
  if (game.ranking_spec().kind == RankingKind::LinearRrp)
    r["slope"] = resolved_slope(game.ranking_spec(), game.n());
  if (game.ranking_spec().kind == RankingKind::Prp)
    r["tie_tolerance"] = game.ranking_spec().tie_tolerance;
  j["ranking"] = r;
  return j;
}

nlohmann::json config_to_json(const PublishersGame& game, const DynamicsConfig& config) {
  nlohmann::json j;
  j["mode"] = to_string(config.mode);
  j["epsilon"] = config.epsilon;
  j["max_iters"] =
      config.max_iters.value_or(DynamicsConfig::default_max_iters(config.mode, game.k()));
  j["step_sizes"] = config.step_sizes;
  if (config.mode == DynamicsMode::Discrete)
    j["directions"] = config.directions.empty()
                          ? DynamicsConfig::default_directions(game.k())
                          : config.directions;
  j["infeasible"] = to_string(config.infeasible);
  j["seed"] = config.rng_seed;
  return j;
}

}  // namespace

void write_trace_jsonl(std::ostream& os, const PublishersGame& game,
                       const DynamicsConfig& config, const SimulationTrace& trace) {
  nlohmann::json header;
  header["game"] = game_to_json(game);
  header["config"] = config_to_json(game, config);
  os << header.dump() << '\n';
  for (const TraceStep& step : trace.steps) {
    nlohmann::json j;
    j["t"] = step.iteration;
    j["mover"] = step.mover;
    j["old"] = step.old_doc;
    j["new"] = step.new_doc;
    j["gain"] = step.gain;
    os << j.dump() << '\n';
  }
  nlohmann::json footer;
  footer["converged"] = trace.converged;
  footer["iters"] = trace.iterations_used;
  footer["publishers_welfare"] = trace.final_welfare.publishers_welfare;
  footer["users_welfare"] = trace.final_welfare.users_welfare;
  os << footer.dump() << '\n';
}

std::string to_string(DynamicsMode mode) {
  return mode == DynamicsMode::Discrete ? "discrete" : "smooth";
}

DynamicsMode dynamics_mode_from_string(const std::string& name) {
  if (name == "discrete") return DynamicsMode::Discrete;
  if (name == "smooth") return DynamicsMode::Smooth;
  throw std::invalid_argument("unknown dynamics mode: " + name);
}

std::string to_string(InfeasiblePolicy policy) {
  return policy == InfeasiblePolicy::Clamp ? "clamp" : "discard";
}

InfeasiblePolicy infeasible_policy_from_string(const std::string& name) {
  if (name == "clamp") return InfeasiblePolicy::Clamp;
  if (name == "discard") return InfeasiblePolicy::Discard;
  throw std::invalid_argument("unknown infeasible-move policy: " + name);
}

}  // namespace pubgame
