#include "pubgame/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pubgame/game.hpp"

namespace pubgame {

double max_valid_slope(int n) {
  if (n < 2) throw std::invalid_argument("max_valid_slope: n must be >= 2");
  return 1.0 / n;
}

double resolved_slope(const RankingSpec& spec, int n) {
  const double cap = max_valid_slope(n);
  const double a = spec.slope.value_or(cap);
  if (!(a > 0.0) || a > cap)
    throw std::invalid_argument("linear ranking slope must lie in (0, 1/n]");
  return a;
}

std::vector<double> relative_relevance_from_dstar(const std::vector<double>& dstar) {
  const int n = static_cast<int>(dstar.size());
  if (n < 2) throw std::invalid_argument("relative relevance needs >= 2 publishers");
  const double total = std::accumulate(dstar.begin(), dstar.end(), 0.0);
  std::vector<double> nu(n);
  for (int i = 0; i < n; ++i)
    nu[i] = (total - dstar[i]) / (n - 1) - dstar[i];
  return nu;
}

std::vector<double> linear_rrp_map(double slope, int n, const std::vector<double>& nu) {
  if (static_cast<int>(nu.size()) != n)
    throw std::invalid_argument("linear_rrp_map: size mismatch");
  const double intercept = 1.0 / n;
  std::vector<double> probs(n);
  for (int i = 0; i < n; ++i) {
    // Rounding of d* can push nu a hair past +-1; clamp the few-ulp spill.
    probs[i] = std::clamp(slope * nu[i] + intercept, 0.0, 1.0);
  }
  return probs;
}

std::vector<double> softmax_map(const std::vector<double>& nu) {
  if (nu.empty()) throw std::invalid_argument("softmax_map: empty input");
  const double shift = *std::max_element(nu.begin(), nu.end());
  std::vector<double> probs(nu.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    probs[i] = std::exp(nu[i] - shift);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

RankingDistribution rank_from_dstar(const RankingSpec& spec,
                                    const std::vector<double>& dstar) {
  const int n = static_cast<int>(dstar.size());
  if (n < 2) throw std::invalid_argument("ranking needs >= 2 publishers");
  switch (spec.kind) {
    case RankingKind::Prp: {
      if (spec.tie_tolerance < 0.0)
        throw std::invalid_argument("tie tolerance must be >= 0");
      const double best = *std::min_element(dstar.begin(), dstar.end());
      std::vector<double> probs(n, 0.0);
      int winners = 0;
      for (int i = 0; i < n; ++i)
        if (dstar[i] <= best + spec.tie_tolerance) ++winners;
      for (int i = 0; i < n; ++i)
        if (dstar[i] <= best + spec.tie_tolerance) probs[i] = 1.0 / winners;
      return {std::move(probs)};
    }
    case RankingKind::LinearRrp: {
      const double a = resolved_slope(spec, n);
      return {linear_rrp_map(a, n, relative_relevance_from_dstar(dstar))};
    }
    case RankingKind::SoftmaxRrp:
      return {softmax_map(relative_relevance_from_dstar(dstar))};
    case RankingKind::Random:
      return {std::vector<double>(n, 1.0 / n)};
  }
  throw std::invalid_argument("unknown ranking kind");
}

RankingDistribution rank(const PublishersGame& game, const StrategyProfile& profile) {
  game.validate_profile(profile);
  return rank_from_dstar(game.ranking_spec(), game.dstar(profile));
}

namespace {

RankingSpec with_kind(const PublishersGame& game, RankingKind kind) {
  RankingSpec spec;
  spec.kind = kind;
  if (game.ranking_spec().kind == kind) {
    spec.slope = game.ranking_spec().slope;
    spec.tie_tolerance = game.ranking_spec().tie_tolerance;
  }
  return spec;
}

RankingDistribution rank_as(const PublishersGame& game, const StrategyProfile& profile,
                            RankingKind kind) {
  game.validate_profile(profile);
  return rank_from_dstar(with_kind(game, kind), game.dstar(profile));
}

}  // namespace

RankingDistribution prp_rank(const PublishersGame& game, const StrategyProfile& profile) {
  return rank_as(game, profile, RankingKind::Prp);
}

RankingDistribution linear_rrp_rank(const PublishersGame& game,
                                    const StrategyProfile& profile) {
  return rank_as(game, profile, RankingKind::LinearRrp);
}

RankingDistribution softmax_rrp_rank(const PublishersGame& game,
                                     const StrategyProfile& profile) {
  return rank_as(game, profile, RankingKind::SoftmaxRrp);
}

RankingDistribution random_rank(const PublishersGame& game,
                                const StrategyProfile& profile) {
  return rank_as(game, profile, RankingKind::Random);
}

std::string to_string(RankingKind kind) {
  switch (kind) {
    case RankingKind::Prp: return "prp";
    case RankingKind::LinearRrp: return "linear";
    case RankingKind::SoftmaxRrp: return "softmax";
    case RankingKind::Random: return "random";
  }
  return "?";
}

RankingKind ranking_kind_from_string(const std::string& name) {
  if (name == "prp") return RankingKind::Prp;
  if (name == "linear" || name == "linear-rrp") return RankingKind::LinearRrp;
  if (name == "softmax" || name == "softmax-rrp") return RankingKind::SoftmaxRrp;
  if (name == "random") return RankingKind::Random;
  throw std::invalid_argument("unknown ranking kind: " + name);
}

}  // namespace pubgame
