#include <gtest/gtest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "../support/random_specs.hpp"
#include "lockbox/learning/dqn.hpp"
#include "../support/numeric.hpp"

using namespace lockbox;
using namespace lockbox::learning;

using lockbox::testing::random_input;
using lockbox::testing::relative_gradient_error;

namespace {

}  // namespace

TEST(QNetwork, ZeroWeightsGiveOutputBiases) {
  QNetwork net(4);
  net.b2() << 0.5, -1.0, 2.0, 0.0;
  std::mt19937_64 rng(1);
  EXPECT_EQ(net.forward(random_input(rng, 4)), net.b2());
  EXPECT_EQ(net.forward(Eigen::VectorXd::Zero(8)).size(), 4);
}

TEST(QNetwork, Shapes) {
  QNetwork net(7);
  EXPECT_EQ(net.input_size(), 14U);
  EXPECT_EQ(net.hidden(), 64U);
  EXPECT_EQ(net.joints(), 7U);
  EXPECT_EQ(net.parameter_count(), 14U * 64 + 64 + 64 * 7 + 7);
  EXPECT_THROW(net.forward(Eigen::VectorXd::Zero(7)), std::invalid_argument);
}

TEST(QNetwork, BackpropMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> target(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 4;
    QNetwork net(n, i % 2 == 0 ? 64 : 16);
    net.randomize(rng);
    std::vector<QSample> batch;
    for (int b = 0; b < 1 + i % 5; ++b) {
      batch.push_back({random_input(rng, n), static_cast<std::size_t>(rng() % n), target(rng)});
    }
    ASSERT_LT(relative_gradient_error(net, batch), 1e-4) << i;
  }
}

TEST(QNetwork, SetParametersRoundTrips) {
  std::mt19937_64 rng(3);
  QNetwork net(5, 8);
  net.randomize(rng);
  QNetwork copy(5, 8);
  copy.set_parameters(net.parameters());
  EXPECT_EQ(copy.parameters(), net.parameters());
  EXPECT_THROW(copy.set_parameters(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(QNetwork, ManifestRoundTrip) {
  std::mt19937_64 rng(4);
  QNetwork net(4);
  net.randomize(rng);
  const auto doc = to_json(net);
  EXPECT_EQ(doc["layers"][0]["shape"], (nlohmann::json{64, 8}));
  EXPECT_EQ(doc["layers"][1]["shape"], (nlohmann::json{4, 64}));
  EXPECT_EQ(doc["layers"][0]["weights"][1].get<double>(), net.w1()(0, 1));
  const auto back = qnetwork_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(back.parameters(), net.parameters());
}

TEST(QNetwork, MalformedManifestThrows) {
  auto doc = to_json(QNetwork(4));
  auto bad = doc;
  bad["layers"][1]["bias"] = {1.0};
  EXPECT_THROW(qnetwork_from_json(bad), std::invalid_argument);
  bad = doc;
  bad.erase("hidden");
  EXPECT_THROW(qnetwork_from_json(bad), std::invalid_argument);
}

TEST(QNetwork, AdamStepReducesLossOnFixedBatch) {
  std::mt19937_64 rng(5);
  QNetwork net(4);
  net.randomize(rng);
  std::vector<QSample> batch;
  for (int b = 0; b < 16; ++b) batch.push_back({random_input(rng, 4), static_cast<std::size_t>(b % 4), 1.0});
  AdamOptimizer adam(1e-2);
  const double before = net.loss(batch);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd g;
    net.loss_and_gradient(batch, g);
    adam.step(net, g);
  }
  EXPECT_LT(net.loss(batch), 0.1 * before);
}

TEST(TdTargets, ZeroDiscountGivesReward) {
  std::mt19937_64 rng(6);
  QNetwork target(3);
  target.randomize(rng);
  const Transition t{random_input(rng, 3), 1, 2.0, random_input(rng, 3), false};
  const auto rows = td_targets(std::span(&t, 1), 0.0, target);
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0].target, 2.0);
  EXPECT_EQ(rows[0].action, 1U);
}

TEST(TdTargets, BootstrapsFromTargetMaxUnlessTerminal) {
  QNetwork target(3);
  target.b2() << 1.0, 4.0, -2.0;
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  const std::vector<Transition> batch{{x, 0, 1.0, x, false}, {x, 2, 6.0, x, true}};
  const auto rows = td_targets(batch, 0.5, target);
  EXPECT_DOUBLE_EQ(rows[0].target, 3.0);
  EXPECT_DOUBLE_EQ(rows[1].target, 6.0);
}

TEST(Reward, Examples) {
  const auto spec = lockbox::testing::one_to_one();
  const auto s0 = initial_state(spec);
  const auto blocked = manipulate(spec, s0, 1);
  ASSERT_FALSE(blocked.moved);
  EXPECT_EQ(reward(spec, s0, blocked.state, false), 0);
  const auto s1 = manipulate(spec, s0, 0).state;  // 2 -> 1 remaining
  EXPECT_EQ(reward(spec, s0, s1, false), 1);
  const auto s2 = manipulate(spec, s1, 1).state;
  EXPECT_EQ(reward(spec, s1, s2, is_solved(spec, s2)), 6);
  EXPECT_EQ(reward(spec, s1, s0, false), -1);
}

TEST(Reward, UnsolvableStateThrows) {
  // only a dependency ring can leave the goal unreachable: A, B, C lock each other
  LockboxSpec spec{"stuck",
                   {lockbox::testing::joint("A"), lockbox::testing::joint("B")},
                   {{"A", "B", 1}},
                   "B",
                   1};
  spec.joints.push_back(lockbox::testing::joint("C"));
  spec.edges.push_back({"C", "A", 1});
  spec.edges.push_back({"B", "C", 1});
  const auto s = initial_state(spec);
  EXPECT_THROW(reward(spec, s, s, false), std::domain_error);
}

TEST(Reward, TelescopesAlongSolvingTrajectories) {
  std::mt19937_64 rng(7);
  int done = 0;
  while (done < 1000) {
    const auto spec = lockbox::testing::random_small_spec(rng, 2 + rng() % 4);
    const DistanceTable distance(spec);
    auto state = initial_state(spec);
    if (distance.at(state) == kUnsolvable) continue;
    const int start = distance.at(state);
    int total = 0;
    for (int t = 0; t < 10000 && !is_solved(spec, state); ++t) {
      auto out = manipulate(spec, state, rng() % spec.size());
      const bool solved = is_solved(spec, out.state);
      total += reward(spec, state, out.state, solved) - (solved ? 5 : 0);
      state = std::move(out.state);
    }
    ASSERT_TRUE(is_solved(spec, state));
    ASSERT_EQ(total, start);
    ++done;
  }
}

TEST(Observation, StatesThenOneHotLast) {
  LockboxState s;
  s.bits = {1, 0, 1};
  Eigen::VectorXd expected(6);
  expected << 1, 0, 1, 0, 0, 0;
  EXPECT_EQ(encode_observation(s, std::nullopt), expected);
  expected[4] = 1;
  EXPECT_EQ(encode_observation(s, 1), expected);
}

TEST(Epsilon, LinearThenFlat) {
  DQNConfig c;
  c.episodes = 100;
  EXPECT_DOUBLE_EQ(epsilon_at(c, 0), 1.0);
  EXPECT_DOUBLE_EQ(epsilon_at(c, 40), 1.0 - 0.5 * 0.95);
  EXPECT_DOUBLE_EQ(epsilon_at(c, 80), 0.05);
  EXPECT_DOUBLE_EQ(epsilon_at(c, 99), 0.05);
}

TEST(DqnTrain, DeterministicForSeed) {
  DQNConfig c;
  c.episodes = 20;
  c.seed = 9;
  DQNTrainStats a;
  DQNTrainStats b;
  const auto n1 = dqn_train(c, 4, generated_specs(4), &a);
  const auto n2 = dqn_train(c, 4, generated_specs(4), &b);
  EXPECT_EQ(n1.parameters(), n2.parameters());
  EXPECT_EQ(a.environment_steps, b.environment_steps);
  EXPECT_GT(a.gradient_steps, 0);
  EXPECT_EQ(a.gradient_steps, a.environment_steps - static_cast<long>(c.batch_size) + 1);
}

TEST(DqnTrain, RejectsScaleMismatch) {
  DQNConfig c;
  c.episodes = 1;
  EXPECT_THROW(dqn_train(c, 5, generated_specs(4)), std::invalid_argument);
}

TEST(DqnSolve, GreedyRolloutCountsSteps) {
  // constant Q-values prefer A, so the policy toggles A forever
  QNetwork net(2);
  net.b2() << 1.0, 0.0;
  planner::SymbolicEnvironment env(lockbox::testing::one_to_one());
  const auto r = dqn_solve(net, env, 5);
  EXPECT_FALSE(r.solved);
  EXPECT_EQ(r.steps, 5);
  EXPECT_EQ(env.steps(), 5);
  for (const auto& a : r.attempt_log) EXPECT_EQ(a.joint, "A");
}

TEST(DqnSolve, FollowsAPolicyThatSolves) {
  // Q(B) rises once A is set: weights read the state bit of A
  QNetwork net(2, 1);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  // layout W1 (1x4), b1, W2 (2x1), b2
  p[0] = 1.0;  // hidden = relu(bit A)
  p[6] = 2.0;  // Q(B) = 2 * hidden
  p[7] = 1.0;  // Q(A) = 1: A wins until bit A is set, then B
  p[8] = 0.0;
  net.set_parameters(p);
  planner::SymbolicEnvironment env(lockbox::testing::one_to_one());
  const auto r = dqn_solve(net, env, 10);
  EXPECT_TRUE(r.solved);
  EXPECT_EQ(r.steps, 2);
}

TEST(DqnSolve, RejectsJointCountMismatch) {
  planner::SymbolicEnvironment env(lockbox::testing::one_to_one());
  EXPECT_THROW(dqn_solve(QNetwork(3), env, 10), std::invalid_argument);
}
