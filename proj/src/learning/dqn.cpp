#include "lockbox/learning/dqn.hpp"

#include <stdexcept>

#include "lockbox/core/generator.hpp"

namespace lockbox::learning {

namespace {

constexpr int kSolveBonus = 5;

std::size_t greedy(const Eigen::VectorXd& q) {
  Eigen::Index best = 0;
  q.maxCoeff(&best);  // first maximum
  return static_cast<std::size_t>(best);
}

}  // namespace

Eigen::VectorXd encode_observation(const LockboxState& state, std::optional<std::size_t> last) {
  const auto n = static_cast<Eigen::Index>(state.bits.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = state.bits[static_cast<std::size_t>(i)];
  if (last) x[n + static_cast<Eigen::Index>(*last)] = 1.0;
  return x;
}

int reward(const LockboxSpec& spec, const LockboxState& before, const LockboxState& after,
           bool solved) {
  const auto a = min_remaining_steps(spec, before);
  const auto b = min_remaining_steps(spec, after);
  if (!a || !b) throw std::domain_error("reward of an unsolvable state");
  return *a - *b + (solved ? kSolveBonus : 0);
}

std::vector<QSample> td_targets(std::span<const Transition> batch, double gamma,
                                const QNetwork& target) {
  std::vector<QSample> out;
  out.reserve(batch.size());
  if (batch.empty()) return out;
  Eigen::MatrixXd next(static_cast<Eigen::Index>(target.input_size()),
                       static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    next.col(static_cast<Eigen::Index>(i)) = batch[i].next_observation;
  }
  const Eigen::MatrixXd q = target.forward_batch(next);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = batch[i];
    const double bootstrap = t.terminal ? 0.0 : q.col(static_cast<Eigen::Index>(i)).maxCoeff();
    out.push_back({t.observation, t.action, t.reward + gamma * bootstrap});
  }
  return out;
}

double qnet_backward(QNetwork& net, std::span<const Transition> batch, double gamma,
                     const QNetwork& target, AdamOptimizer& optimizer) {
  const auto rows = td_targets(batch, gamma, target);
  Eigen::VectorXd gradient;
  const double loss = net.loss_and_gradient(rows, gradient);
  optimizer.step(net, gradient);
  return loss;
}

double epsilon_at(const DQNConfig& config, int episode) {
  const double horizon = config.epsilon_decay_fraction * config.episodes;
  if (horizon <= 0.0 || episode >= horizon) return config.epsilon_end;
  const double f = static_cast<double>(episode) / horizon;
  return config.epsilon_start + f * (config.epsilon_end - config.epsilon_start);
}

SpecSource generated_specs(std::size_t scale) {
  return [scale](std::mt19937_64& rng) {
    GeneratorParams p;
    p.n_joints = scale;
    p.dependency_mix = default_mix(scale);
    p.distance_preference = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    p.seed = rng();
    return generate_random(p);
  };
}

QNetwork dqn_train(const DQNConfig& config, std::size_t scale, const SpecSource& specs,
                   DQNTrainStats* stats) {
  if (config.episodes < 1 || config.episode_steps < 1 || config.batch_size == 0 ||
      config.replay_capacity < config.batch_size || config.target_sync < 1) {
    throw std::invalid_argument("invalid DQN configuration");
  }
  std::mt19937_64 rng(config.seed);
  QNetwork net(scale, config.hidden);
  net.randomize(rng);
  QNetwork target = net;
  AdamOptimizer optimizer(config.learning_rate);
  std::vector<Transition> replay;
  replay.reserve(config.replay_capacity);
  std::size_t replay_next = 0;
  DQNTrainStats local;
  auto& s = stats != nullptr ? *stats : local;
  s = {};
  std::vector<Transition> batch(config.batch_size);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_joint(0, scale - 1);

  for (int episode = 0; episode < config.episodes; ++episode) {
    const auto spec = specs(rng);
    if (spec.size() != scale) {
      throw std::invalid_argument("training lockbox has " + std::to_string(spec.size()) +
                                  " joints, network expects " + std::to_string(scale));
    }
    const DistanceTable distance(spec);
    const double eps = epsilon_at(config, episode);
    LockboxState state = initial_state(spec);
    if (distance.at(state) == kUnsolvable) throw std::domain_error("unsolvable training lockbox");
    std::optional<std::size_t> last;
    bool solved = is_solved(spec, state);
    for (int t = 0; t < config.episode_steps && !solved; ++t) {
      Eigen::VectorXd obs = encode_observation(state, last);
      const std::size_t action = coin(rng) < eps ? any_joint(rng) : greedy(net.forward(obs));
      auto out = manipulate(spec, state, action);
      solved = is_solved(spec, out.state);
      const double r = distance.at(state) - distance.at(out.state) + (solved ? kSolveBonus : 0);
      state = std::move(out.state);
      last = action;
      Transition tr{std::move(obs), action, r, encode_observation(state, last), solved};
      if (replay.size() < config.replay_capacity) {
        replay.push_back(std::move(tr));
      } else {
        replay[replay_next] = std::move(tr);
        replay_next = (replay_next + 1) % config.replay_capacity;
      }
      ++s.environment_steps;
      if (replay.size() >= config.batch_size) {
        std::uniform_int_distribution<std::size_t> pick(0, replay.size() - 1);
        for (auto& b : batch) b = replay[pick(rng)];
        s.last_loss = qnet_backward(net, batch, config.gamma, target, optimizer);
        ++s.gradient_steps;
      }
      if (s.environment_steps % config.target_sync == 0) target = net;
    }
    ++s.episodes;
    if (solved) ++s.solved_episodes;
  }
  return net;
}

planner::TrialResult dqn_solve(const QNetwork& net, planner::Environment& env, int max_steps) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  const auto n = env.joints().size();
  if (n != net.joints()) {
    throw std::invalid_argument("network trained for " + std::to_string(net.joints()) +
                                " joints, lockbox has " + std::to_string(n));
  }
  planner::TrialResult result;
  std::optional<std::size_t> last;
  result.solved = env.solved();
  while (!result.solved && result.steps < max_steps) {
    const std::size_t action = greedy(net.forward(encode_observation(env.state(), last)));
    const bool moved = env.try_manipulate(action);
    ++result.steps;
    result.attempt_log.push_back({env.joints()[action], moved});
    last = action;
    result.solved = env.solved();
  }
  return result;
}

}  // namespace lockbox::learning
