#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pubgame/game.hpp"
#include "pubgame/rng.hpp"

using namespace pubgame;

namespace {

RankingSpec spec_of(RankingKind kind) {
  RankingSpec spec;
  spec.kind = kind;
  return spec;
}

// Two publishers on a line, both starting at 0, information need at 1.
PublishersGame line_game(RankingKind kind, double lambda = 1.0) {
  return PublishersGame(2, 1, lambda, DistanceSpec::absolute_1d(), {{0.0}, {0.0}},
                        {1.0}, spec_of(kind));
}

PublishersGame random_game(RankingKind kind, int n, int k, Rng& rng,
                           double lambda = 1.0) {
  std::vector<Point> docs(n, Point(k));
  for (Point& doc : docs)
    for (double& v : doc) v = rng.uniform01();
  Point star(k);
  for (double& v : star) v = rng.uniform01();
  return PublishersGame(n, k, lambda, DistanceSpec::normalized_squared_euclidean(k),
                        docs, star, spec_of(kind));
}

StrategyProfile random_profile(int n, int k, Rng& rng) {
  StrategyProfile profile;
  profile.docs.assign(n, Point(k));
  for (Point& doc : profile.docs)
    for (double& v : doc) v = rng.uniform01();
  return profile;
}

}  // namespace

TEST_CASE("distance: squared-Euclidean basics") {
  const DistanceSpec spec = DistanceSpec::normalized_squared_euclidean(2);
  CHECK(distance(spec, {0.0, 0.0}, {0.0, 0.0}) == 0.0);
  // (1 + 1) / 2 by hand
  CHECK(distance(spec, {0.0, 0.0}, {1.0, 1.0}) == 1.0);
}

TEST_CASE("distance: absolute-1d basics") {
  const DistanceSpec spec = DistanceSpec::absolute_1d();
  CHECK(distance(spec, {0.25}, {1.0}) == 0.75);
  CHECK(distance(spec, {0.4}, {0.4}) == 0.0);
}

TEST_CASE("distance: symmetric and bounded on random pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_index(8));
    const DistanceSpec spec = DistanceSpec::normalized_squared_euclidean(k);
    Point x(k), y(k);
    for (double& v : x) v = rng.uniform01();
    for (double& v : y) v = rng.uniform01();
    const double forward = distance(spec, x, y);
    CHECK(forward == distance(spec, y, x));
    CHECK(forward >= 0.0);
    CHECK(forward <= 1.0);
    CHECK((forward == 0.0) == (x == y));
  }
}

TEST_CASE("distance: dimension mismatch is rejected") {
  const DistanceSpec spec = DistanceSpec::normalized_squared_euclidean(2);
  CHECK_THROWS_AS(distance(spec, {0.1, 0.2}, {0.3}), std::invalid_argument);
  CHECK_THROWS_AS(distance(DistanceSpec::absolute_1d(), {0.1, 0.2}, {0.3, 0.4}),
                  std::invalid_argument);
}

TEST_CASE("relative relevance: everyone at the information need") {
  RankingSpec spec = spec_of(RankingKind::Random);
  PublishersGame game(3, 2, 1.0, DistanceSpec::normalized_squared_euclidean(2),
                      {{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}}, {0.5, 0.5}, spec);
  StrategyProfile profile{{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}};
  for (double nu : relative_relevance(game, profile)) CHECK(nu == 0.0);
}

TEST_CASE("relative relevance: hand-evaluated two-publisher case") {
  const PublishersGame game = line_game(RankingKind::Prp);
  const StrategyProfile profile{{{0.0}, {0.5}}};
  const std::vector<double> nu = relative_relevance(game, profile);
  CHECK(nu[0] == -0.5);
  CHECK(nu[1] == 0.5);
}

TEST_CASE("relative relevance: hand-evaluated three-publisher case") {
  // d* values (0, 1, 1) via documents on a line with the need at 0.
  PublishersGame game(3, 1, 1.0, DistanceSpec::absolute_1d(), {{0.0}, {0.0}, {0.0}},
                      {0.0}, spec_of(RankingKind::Random));
  const StrategyProfile profile{{{0.0}, {1.0}, {1.0}}};
  const std::vector<double> nu = relative_relevance(game, profile);
  CHECK(nu[0] == 1.0);
  CHECK(nu[1] == -0.5);
  CHECK(nu[2] == -0.5);
}

TEST_CASE("relative relevance: sums to zero and stays within [-1, 1]") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(6));
    const int k = 1 + static_cast<int>(rng.uniform_index(4));
    const PublishersGame game = random_game(RankingKind::Random, n, k, rng);
    const StrategyProfile profile = random_profile(n, k, rng);
    const std::vector<double> nu = relative_relevance(game, profile);
    double total = 0.0;
    for (double v : nu) {
      total += v;
      CHECK(v >= -1.0 - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(std::abs(total) < 1e-12);
  }
}

TEST_CASE("utility: symmetric game at the initial documents under random ranking") {
  Rng rng(3);
  const PublishersGame game = random_game(RankingKind::Random, 4, 3, rng);
  const std::vector<double> u = utility(game, game.initial_profile());
  for (double v : u) CHECK(v == 0.25);
}

TEST_CASE("utility: both at the need under PRP splits the win minus full cost") {
  const PublishersGame game = line_game(RankingKind::Prp);
  const std::vector<double> u = utility(game, {{{1.0}, {1.0}}});
  CHECK(u[0] == -0.5);
  CHECK(u[1] == -0.5);
}

TEST_CASE("utility: asymmetric PRP winner pays its move cost") {
  const PublishersGame game = line_game(RankingKind::Prp);
  const std::vector<double> u = utility(game, {{{0.0}, {0.5}}});
  CHECK(u[0] == 0.0);
  CHECK(u[1] == 0.5);
}

TEST_CASE("welfare: staying put maximizes publishers' welfare") {
  Rng rng(5);
  const PublishersGame game = random_game(RankingKind::LinearRrp, 3, 2, rng);
  const WelfareReport report = welfare(game, game.initial_profile());
  CHECK(report.publishers_welfare == 1.0);
  CHECK(report.users_welfare == 0.0);
}

TEST_CASE("welfare: everyone at the information need costs users nothing") {
  Rng rng(6);
  const PublishersGame game = random_game(RankingKind::SoftmaxRrp, 3, 2, rng);
  StrategyProfile profile;
  profile.docs.assign(3, game.info_need());
  CHECK(welfare(game, profile).users_welfare == 0.0);
}

TEST_CASE("welfare: hand-evaluated two-publisher case") {
  // d0 = (0.25, 0.5), d* = (0.5, 0.2) on a line with the need at 1.
  PublishersGame game(2, 1, 1.0, DistanceSpec::absolute_1d(), {{0.25}, {0.3}}, {1.0},
                      spec_of(RankingKind::Random));
  const StrategyProfile profile{{{0.5}, {0.8}}};
  const WelfareReport report = welfare(game, profile);
  CHECK(report.publishers_welfare == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(report.users_welfare == doctest::Approx(-0.225).epsilon(1e-15));
}

TEST_CASE("welfare: utilities sum to the closed form for every ranking") {
  Rng rng(13);
  for (RankingKind kind : {RankingKind::Prp, RankingKind::LinearRrp,
                           RankingKind::SoftmaxRrp, RankingKind::Random}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_index(4));
      const int k = 1 + static_cast<int>(rng.uniform_index(3));
      const PublishersGame game = random_game(kind, n, k, rng, rng.uniform(0.1, 2.0));
      const StrategyProfile profile = random_profile(n, k, rng);
      const WelfareReport report = welfare(game, profile);
      double total = 0.0;
      for (double u : report.per_publisher_utility) total += u;
      CHECK(std::abs(total - report.publishers_welfare) < 1e-12);
      CHECK(report.users_welfare <= 0.0);
    }
  }
}

TEST_CASE("game construction rejects malformed inputs") {
  const RankingSpec linear = spec_of(RankingKind::LinearRrp);
  const DistanceSpec dist = DistanceSpec::normalized_squared_euclidean(1);
  CHECK_THROWS_AS(PublishersGame(1, 1, 1.0, dist, {{0.0}}, {0.5}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 0, 1.0, dist, {{}, {}}, {}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 1, 0.0, dist, {{0.0}, {0.0}}, {0.5}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 1, -1.0, dist, {{0.0}, {0.0}}, {0.5}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 1, 1.0, dist, {{0.0}}, {0.5}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 1, 1.0, dist, {{0.0}, {1.5}}, {0.5}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 1, 1.0, dist, {{0.0}, {0.0}}, {-0.1}, linear),
                  std::invalid_argument);
  CHECK_THROWS_AS(PublishersGame(2, 2, 1.0, DistanceSpec::absolute_1d(),
                                 {{0.0, 0.0}, {0.1, 0.1}}, {0.5, 0.5}, linear),
                  std::invalid_argument);

  RankingSpec bad_slope = linear;
  bad_slope.slope = 0.6;  // above 1/2 for n = 2
  CHECK_THROWS_AS(PublishersGame(2, 1, 1.0, dist, {{0.0}, {0.0}}, {0.5}, bad_slope),
                  std::invalid_argument);

  RankingSpec bad_tie = spec_of(RankingKind::Prp);
  bad_tie.tie_tolerance = -1e-9;
  CHECK_THROWS_AS(PublishersGame(2, 1, 1.0, dist, {{0.0}, {0.0}}, {0.5}, bad_tie),
                  std::invalid_argument);
}

TEST_CASE("profile validation") {
  const PublishersGame game = line_game(RankingKind::Prp);
  CHECK_THROWS_AS(utility(game, {{{0.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(utility(game, {{{0.0}, {1.2}}}), std::invalid_argument);
  CHECK_THROWS_AS(utility(game, {{{0.0, 0.1}, {0.2, 0.3}}}), std::invalid_argument);
}
