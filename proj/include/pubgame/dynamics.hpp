#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pubgame/game.hpp"

namespace pubgame {

enum class DynamicsMode { Discrete, Smooth };

// What to do with candidate moves that leave [0,1]^k: clamp them back onto
// the cube (default) or drop them.
enum class InfeasiblePolicy { Clamp, Discard };

struct DynamicsConfig {
  DynamicsMode mode = DynamicsMode::Discrete;
  double epsilon = 1e-6;
  // Iteration cap T; empty resolves to 100 (discrete) or 100*k (smooth).
  std::optional<int> max_iters;
  std::vector<double> step_sizes = default_step_sizes();
  // Discrete mode only; empty resolves to default_directions(k).
  std::vector<Point> directions;
  InfeasiblePolicy infeasible = InfeasiblePolicy::Clamp;
  std::uint64_t rng_seed = 0;

  static std::vector<double> default_step_sizes();       // (1/2)^1 .. (1/2)^10
  static std::vector<Point> default_directions(int k);   // normalized {-1,0,1}^k \ {0}
  static int default_max_iters(DynamicsMode mode, int k);
};

struct TraceStep {
  int iteration = 0;  // 1-based loop index at which the move happened
  int mover = 0;
  Point old_doc;
  Point new_doc;
  double gain = 0.0;
};

struct SimulationTrace {
  std::vector<TraceStep> steps;
  StrategyProfile final_profile;
  bool converged = false;
  int iterations_used = 0;  // equals steps.size()
  WelfareReport final_welfare;
};

// Argmax tie set of publisher i's restricted moves (candidates within 1e-12
// of the best achievable utility). The epsilon-improvement filter is applied
// by the caller, not here. Candidates are deduplicated and sorted.
std::vector<Point> restricted_best_response(const PublishersGame& game,
                                            const StrategyProfile& profile,
                                            int publisher,
                                            const DynamicsConfig& config);

// Publishers that can improve their utility by at least epsilon via a
// restricted best response. Empty means the profile is an epsilon-pure Nash
// equilibrium under the allowed moves.
std::vector<int> non_optimal_publishers(const PublishersGame& game,
                                        const StrategyProfile& profile,
                                        const DynamicsConfig& config);

// Runs the better-response dynamic from the initial documents until the
// non-optimal set is empty (converged) or the iteration cap is hit. Each
// iteration consumes exactly two RNG draws: mover first, then candidate.
SimulationTrace run_dynamic(const PublishersGame& game, const DynamicsConfig& config);

// Exact gradient of publisher i's utility with respect to its own document.
// Requires a differentiable ranking (linear or softmax) and the normalized
// squared-Euclidean distance; throws unsupported_config otherwise.
std::vector<double> utility_gradient(const PublishersGame& game,
                                     const StrategyProfile& profile, int publisher);

// Line-oriented JSON trace: a header object (game + config, including the
// seed), one object per step {t, mover, old, new, gain}, and a final object
// {converged, iters, publishers_welfare, users_welfare}.
void write_trace_jsonl(std::ostream& os, const PublishersGame& game,
                       const DynamicsConfig& config, const SimulationTrace& trace);

std::string to_string(DynamicsMode mode);
DynamicsMode dynamics_mode_from_string(const std::string& name);
std::string to_string(InfeasiblePolicy policy);
InfeasiblePolicy infeasible_policy_from_string(const std::string& name);

}  // namespace pubgame
