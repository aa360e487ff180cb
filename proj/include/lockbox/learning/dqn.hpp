#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>

#include <Eigen/Core>

#include "lockbox/core/lockbox.hpp"
#include "lockbox/learning/qnetwork.hpp"
#include "lockbox/planner/environment.hpp"
#include "lockbox/planner/heuristic.hpp"

namespace lockbox::learning {

struct DQNConfig {
  int episodes = 10000;
  double gamma = 0.95;
  double learning_rate = 1e-3;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.8;  // of all episodes, linear
  std::size_t replay_capacity = 10000;
  std::size_t batch_size = 64;
  int target_sync = 250;    // environment steps between target copies
  int episode_steps = 200;  // training episodes end here if unsolved
  std::size_t hidden = 64;
  std::uint64_t seed = 0;
};

struct Transition {
  Eigen::VectorXd observation;
  std::size_t action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_observation;
  bool terminal = false;
};

// N joint states followed by a one-hot of the last attempted joint (all zero
// before the first attempt).
Eigen::VectorXd encode_observation(const LockboxState& state, std::optional<std::size_t> last);

// Change in minimal remaining steps, plus 5 when the move solved the lockbox.
// Throws std::domain_error when either state cannot reach the goal.
int reward(const LockboxSpec& spec, const LockboxState& before, const LockboxState& after,
           bool solved);

// Regression rows r + gamma * max_a' Q_target(s', a') (no bootstrap on
// terminal transitions).
std::vector<QSample> td_targets(std::span<const Transition> batch, double gamma,
                                const QNetwork& target);

// One optimizer step on the squared TD error; returns the loss before it.
double qnet_backward(QNetwork& net, std::span<const Transition> batch, double gamma,
                     const QNetwork& target, AdamOptimizer& optimizer);

double epsilon_at(const DQNConfig& config, int episode);

// Training lockbox for one episode.
using SpecSource = std::function<LockboxSpec(std::mt19937_64&)>;

// Random generated lockbox of the given size: default dependency mix,
// distance preference uniform in [-1, 1], target chosen by the generator.
SpecSource generated_specs(std::size_t scale);

struct DQNTrainStats {
  int episodes = 0;
  int solved_episodes = 0;
  long environment_steps = 0;
  long gradient_steps = 0;
  double last_loss = 0.0;
};

// Epsilon-greedy training with experience replay and a periodically synced
// target network. Throws std::invalid_argument when a source spec does not
// have `scale` joints.
QNetwork dqn_train(const DQNConfig& config, std::size_t scale, const SpecSource& specs,
                   DQNTrainStats* stats = nullptr);

// Greedy rollout (ties to the lowest index) with the same step accounting as
// the heuristic solver. Throws std::invalid_argument on a joint-count mismatch.
planner::TrialResult dqn_solve(const QNetwork& net, planner::Environment& env, int max_steps);

}  // namespace lockbox::learning
