#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pubgame/game.hpp"

namespace pubgame {

// Potential function of a linear-ranking game: unilateral differences of this
// function equal the deviating publisher's utility differences exactly.
// Throws unsupported_config for non-linear rankings.
double exact_potential(const PublishersGame& game, const StrategyProfile& profile);

// Samples random unilateral deviations and returns the largest absolute
// mismatch between the potential difference and the utility difference.
double check_potential_identity(const PublishersGame& game, int samples,
                                std::uint64_t seed);

struct DiecReport {
  RankingKind kind = RankingKind::LinearRrp;
  int n = 2;
  // Winner/loser probability ratio in the extreme profile (one publisher at
  // d* = 0, everyone else at d* = 1); +infinity when the loser gets 0.
  double measured_ratio = 0.0;
  double claimed_alpha = 0.0;
};

DiecReport diec_ratio(const RankingSpec& ranking, int n);

struct GridSearchResult {
  int resolution = 0;
  double epsilon = 0.0;
  std::vector<StrategyProfile> found_equilibria;
  bool exhaustive = false;
};

// Exhaustively tests every profile on the uniform grid (resolution points per
// axis) against every single-publisher grid deviation. A profile is reported
// iff no deviation improves the deviator's utility by more than epsilon.
// Throws budget_exceeded when resolution^(n*k) > 1e8.
GridSearchResult grid_pne_search(const PublishersGame& game, int resolution,
                                 double epsilon, int jobs = 1);

// Epsilon used by the verification suite's grid oracle: half a grid cell of
// cost, so discretization cannot manufacture spurious equilibria.
double default_grid_epsilon(double lambda, int resolution);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::string only;                 // substring filter on check names
  std::uint64_t seed = 20240801;
  int potential_samples = 10000;    // per slope family
  int grid_resolution = 101;
  int jobs = 1;
  // Test hook: deliberately breaks the slope-validation predicate so the
  // corresponding check fails.
  bool inject_slope_fault = false;
};

std::vector<CheckResult> run_verification_suite(const VerifyOptions& options);

}  // namespace pubgame
