#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pubgame {

class PublishersGame;
struct StrategyProfile;

enum class RankingKind { Prp, LinearRrp, SoftmaxRrp, Random };

struct RankingSpec {
  RankingKind kind = RankingKind::LinearRrp;
  // Linear slope; empty means "use the maximal valid slope 1/n".
  std::optional<double> slope;
  // PRP only: documents within this d* margin of the minimum share the win.
  double tie_tolerance = 1e-12;
};

// Probability of each publisher being ranked first. Entries lie in [0,1] and
// sum to 1 (within 1e-12).
struct RankingDistribution {
  std::vector<double> probs;
};

// Largest slope for which the linear ranking is a valid distribution.
double max_valid_slope(int n);

// Slope to use for a linear ranking with n publishers; defaults to 1/n.
// Throws std::invalid_argument outside (0, 1/n].
double resolved_slope(const RankingSpec& spec, int n);

// Relative relevance: mean of the other publishers' distances to the
// information need minus one's own. Sums to zero over publishers.
std::vector<double> relative_relevance_from_dstar(const std::vector<double>& dstar);

// Rankings evaluated directly on the d* vector. The game-level wrappers below
// compute d* from a profile and delegate here.
RankingDistribution rank_from_dstar(const RankingSpec& spec, const std::vector<double>& dstar);

// The maps applied to the relative-relevance vector (useful for checking
// coordinate monotonicity in isolation).
std::vector<double> linear_rrp_map(double slope, int n, const std::vector<double>& nu);
std::vector<double> softmax_map(const std::vector<double>& nu);

// Evaluate the game's own ranking spec on a profile.
RankingDistribution rank(const PublishersGame& game, const StrategyProfile& profile);

// Kind-specific entry points. Parameters (slope, tie tolerance) are taken
// from the game's spec when the kind matches, otherwise the defaults apply.
RankingDistribution prp_rank(const PublishersGame& game, const StrategyProfile& profile);
RankingDistribution linear_rrp_rank(const PublishersGame& game, const StrategyProfile& profile);
RankingDistribution softmax_rrp_rank(const PublishersGame& game, const StrategyProfile& profile);
RankingDistribution random_rank(const PublishersGame& game, const StrategyProfile& profile);

std::string to_string(RankingKind kind);
RankingKind ranking_kind_from_string(const std::string& name);

}  // namespace pubgame
