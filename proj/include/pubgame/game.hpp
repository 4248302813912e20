#pragma once

#include <vector>

#include "pubgame/geometry.hpp"
#include "pubgame/ranking.hpp"

namespace pubgame {

// The live state of a dynamic: one document per publisher, inside [0,1]^k.
struct StrategyProfile {
  std::vector<Point> docs;
};

// Immutable description of a publishers game: publisher count, embedding
// dimension, cost factor, distance, initial documents, information need and
// ranking scheme. All invariants are checked once, at construction.
class PublishersGame {
 public:
  PublishersGame(int n, int k, double lambda, DistanceSpec distance,
                 std::vector<Point> initial_docs, Point info_need,
                 RankingSpec ranking);

  int n() const { return n_; }
  int k() const { return k_; }
  double lambda() const { return lambda_; }
  const DistanceSpec& distance_spec() const { return distance_; }
  const std::vector<Point>& initial_docs() const { return initial_docs_; }
  const Point& info_need() const { return info_need_; }
  const RankingSpec& ranking_spec() const { return ranking_; }

  // d*: distance from a document to the information need.
  double dist_to_info_need(const Point& doc) const;
  // d0: distance from a document to publisher i's initial document.
  double dist_to_initial(int publisher, const Point& doc) const;

  std::vector<double> dstar(const StrategyProfile& profile) const;

  // Throws std::invalid_argument if the profile does not match the game.
  void validate_profile(const StrategyProfile& profile) const;

  StrategyProfile initial_profile() const { return {initial_docs_}; }

 private:
  int n_;
  int k_;
  double lambda_;
  DistanceSpec distance_;
  std::vector<Point> initial_docs_;
  Point info_need_;
  RankingSpec ranking_;
};

struct WelfareReport {
  double publishers_welfare = 0.0;  // 1 - lambda * sum of d0
  double users_welfare = 0.0;       // -sum of d* * d0, always <= 0
  std::vector<double> per_publisher_utility;
};

std::vector<double> relative_relevance(const PublishersGame& game,
                                       const StrategyProfile& profile);

// u_i = (probability of being ranked first) - lambda * d0(x_i).
std::vector<double> utility(const PublishersGame& game, const StrategyProfile& profile);

WelfareReport welfare(const PublishersGame& game, const StrategyProfile& profile);

}  // namespace pubgame
