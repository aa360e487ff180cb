#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lockbox/learning/attention.hpp"
#include "lockbox/planner/environment.hpp"

namespace lockbox::planner {

// How state combinations of the free joints are ordered: always by the
// number of joints that must change, then by mean attention score of those
// joints (falling back to lexicographic) or purely lexicographically.
enum class CombinationOrder { size_then_score, size_then_lex };

// Joint the attention features are measured from.
enum class AttentionAnchor { last_attempted, last_moved };

struct SolverConfig {
  int max_steps = 1000;
  bool use_attention = false;
  CombinationOrder combination_order = CombinationOrder::size_then_score;
  double ridge_lambda = 1.0;
  AttentionAnchor attention_anchor = AttentionAnchor::last_attempted;
  // Only used to break cycles: a round that restarts from an already visited
  // (state, free set) configuration shuffles its combinations within each
  // size class and the joint order inside each combination.
  std::uint64_t seed = 0;
};

struct Attempt {
  std::string joint;
  bool moved = false;
};

struct TrialResult {
  bool solved = false;
  int steps = 0;
  std::vector<Attempt> attempt_log;
  std::optional<learning::FeatureVec> final_weights;
};

// A target assignment for the free joints: bits[i] is the wanted state of
// free[i], relative to each joint's state at the start of the trial.
struct Combination {
  std::vector<std::uint8_t> bits;
  std::vector<std::size_t> flips;  // positions in `free` that differ from current
};

// All assignments of the free joints except the current one (current[i] is
// the state of free[i]), fewest flips first. Ties go to the higher mean score
// of the flipped joints when scores are given (indexed by joint), then
// lexicographically by flipped positions.
std::vector<Combination> enumerate_combinations(const std::vector<std::size_t>& free,
                                                const std::vector<std::uint8_t>& current,
                                                const std::vector<double>* scores);

// Locked joints by descending score; input order without scores and on ties
// (the solver passes them sorted by joint id).
std::vector<std::size_t> order_locked(const std::vector<std::size_t>& locked,
                                      const std::vector<double>* scores);

// Sweep every joint once, then alternate between realizing combinations of
// the free joints and retrying the locked ones, restarting whenever a free
// joint turns out locked or a locked one moves. Stops as soon as the target
// reaches its goal or the step budget is spent.
TrialResult heuristic_solve(Environment& env, const SolverConfig& config);

// Rows trial_id,step,joint,moved,solved_after.
void write_attempt_log_header(std::ostream& out);
void write_attempt_log(std::ostream& out, std::size_t trial_id, const TrialResult& result);

}  // namespace lockbox::planner
