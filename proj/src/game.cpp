#include "pubgame/game.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace pubgame {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

PublishersGame::PublishersGame(int n, int k, double lambda, DistanceSpec distance,
                               std::vector<Point> initial_docs, Point info_need,
                               RankingSpec ranking)
    : n_(n),
      k_(k),
      lambda_(lambda),
      distance_(distance),
      initial_docs_(std::move(initial_docs)),
      info_need_(std::move(info_need)),
      ranking_(ranking) {
  require(n_ >= 2, "game: need at least 2 publishers");
  require(k_ >= 1, "game: dimension must be >= 1");
  require(lambda_ > 0.0, "game: lambda must be positive");
  require(distance_.normalizer > 0.0, "game: distance normalizer must be positive");
  require(distance_.kind != DistanceKind::Absolute1d || k_ == 1,
          "game: absolute-1d distance needs k = 1");
  require(static_cast<int>(initial_docs_.size()) == n_,
          "game: expected one initial document per publisher");
  for (const Point& doc : initial_docs_) {
    require(static_cast<int>(doc.size()) == k_, "game: initial document has wrong dimension");
    require(in_unit_cube(doc), "game: initial document outside [0,1]^k");
  }
  require(static_cast<int>(info_need_.size()) == k_, "game: information need has wrong dimension");
  require(in_unit_cube(info_need_), "game: information need outside [0,1]^k");
  require(ranking_.tie_tolerance >= 0.0, "game: tie tolerance must be >= 0");
  if (ranking_.kind == RankingKind::LinearRrp)
    resolved_slope(ranking_, n_);  // throws on an invalid slope
}

double PublishersGame::dist_to_info_need(const Point& doc) const {
  return distance(distance_, doc, info_need_);
}

double PublishersGame::dist_to_initial(int publisher, const Point& doc) const {
  return distance(distance_, doc, initial_docs_[publisher]);
}

std::vector<double> PublishersGame::dstar(const StrategyProfile& profile) const {
  std::vector<double> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = dist_to_info_need(profile.docs[i]);
  return out;
}

void PublishersGame::validate_profile(const StrategyProfile& profile) const {
  require(static_cast<int>(profile.docs.size()) == n_,
          "profile: expected one document per publisher");
  for (const Point& doc : profile.docs) {
    require(static_cast<int>(doc.size()) == k_, "profile: document has wrong dimension");
    require(in_unit_cube(doc), "profile: document outside [0,1]^k");
  }
}

std::vector<double> relative_relevance(const PublishersGame& game,
                                       const StrategyProfile& profile) {
  game.validate_profile(profile);
  return relative_relevance_from_dstar(game.dstar(profile));
}

std::vector<double> utility(const PublishersGame& game, const StrategyProfile& profile) {
  const RankingDistribution r = rank(game, profile);
  std::vector<double> u(game.n());
  for (int i = 0; i < game.n(); ++i)
    u[i] = r.probs[i] - game.lambda() * game.dist_to_initial(i, profile.docs[i]);
  return u;
}

WelfareReport welfare(const PublishersGame& game, const StrategyProfile& profile) {
  WelfareReport report;
  report.per_publisher_utility = utility(game, profile);
  double sum_d0 = 0.0;
  double quality_loss = 0.0;
  for (int i = 0; i < game.n(); ++i) {
    const double d0 = game.dist_to_initial(i, profile.docs[i]);
    sum_d0 += d0;
    quality_loss += game.dist_to_info_need(profile.docs[i]) * d0;
  }
  report.publishers_welfare = 1.0 - game.lambda() * sum_d0;
  report.users_welfare = -quality_loss;
  return report;
}

}  // namespace pubgame
