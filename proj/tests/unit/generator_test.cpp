#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "lockbox/core/config_io.hpp"
#include "lockbox/core/generator.hpp"

namespace lockbox {
namespace {

bool same_spec(const LockboxSpec& a, const LockboxSpec& b) {
  return to_json(a) == to_json(b);
}

GeneratorParams params(std::size_t n, std::uint64_t seed, double preference = 0.0) {
  GeneratorParams p;
  p.n_joints = n;
  p.dependency_mix = default_mix(n);
  p.seed = seed;
  p.distance_preference = preference;
  return p;
}

TEST(Generator, DeterministicGivenSeed) {
  EXPECT_TRUE(same_spec(generate_random(params(4, 5)), generate_random(params(4, 5))));
  EXPECT_FALSE(same_spec(generate_random(params(6, 5)), generate_random(params(6, 6))));
}

TEST(Generator, OutputIsValidAndSolvable) {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto spec = generate_random(params(n, seed, -0.5 + 0.05 * static_cast<double>(seed % 20)));
      ASSERT_TRUE(validate(spec).empty()) << n << "/" << seed;
      ASSERT_EQ(spec.size(), n);
      EXPECT_TRUE(min_remaining_steps(spec, initial_state(spec)).has_value());
    }
  }
}

TEST(Generator, NearbyPreferenceKeepsLockersAmongNearestHalf) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto n = 4 + seed % 4;
    const auto spec = generate_random(params(n, seed, -1.0));
    for (const auto& edge : spec.edges) {
      const auto locked = spec.index_of(edge.locked);
      const auto locker = spec.index_of(edge.locker);
      // independent ranking of the other joints by distance
      std::vector<std::pair<double, std::size_t>> ranked;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == locked) continue;
        ranked.emplace_back(
            (spec.joints[i].handle_position - spec.joints[locked].handle_position).norm(), i);
      }
      std::sort(ranked.begin(), ranked.end());
      const auto half = (n + 1) / 2;
      const auto pos = std::find_if(ranked.begin(), ranked.end(),
                                    [&](const auto& r) { return r.second == locker; }) -
                       ranked.begin();
      EXPECT_LT(static_cast<std::size_t>(pos), half) << "seed " << seed << " " << edge.locker
                                                     << "->" << edge.locked;
    }
  }
}

TEST(Generator, FarPreferenceKeepsLockersAmongFarthestHalf) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto spec = generate_random(params(7, seed, 1.0));
    for (const auto& edge : spec.edges) {
      const auto locked = spec.index_of(edge.locked);
      const auto cand = locker_candidates(spec.joints, locked, 1.0);
      EXPECT_NE(std::find(cand.begin(), cand.end(), spec.index_of(edge.locker)), cand.end());
    }
  }
}

TEST(Generator, FixedTargetAndMinimumDepth) {
  auto p = params(5, 3);
  p.target = "C";
  p.min_solution_steps = 3;
  const auto spec = generate_random(p);
  EXPECT_EQ(spec.target, "C");
  EXPECT_GE(*min_remaining_steps(spec, initial_state(spec)), 3);
}

TEST(Generator, GivesUpWithReport) {
  auto p = params(3, 1);
  p.min_solution_steps = 50;
  p.max_attempts = 20;
  EXPECT_THROW(generate_random(p), GenerationError);
  EXPECT_THROW(generate_random(params(1, 1)), std::invalid_argument);
}

TEST(RandomizeLabels, IdentityPermutationIsNoOp) {
  const auto spec = load_reference("sim-7-ID1").spec;
  std::vector<std::size_t> identity(spec.size());
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_TRUE(same_spec(relabel(spec, identity), spec));
}

TEST(RandomizeLabels, TargetFixedAndStepsInvariant) {
  const auto spec = load_reference("sim-7-ID1").spec;
  const auto before = min_remaining_steps(spec, initial_state(spec));
  const auto target_pos = spec.joints[spec.target_index()].handle_position;
  bool changed = false;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = randomize_labels(spec, seed);
    ASSERT_TRUE(validate(r).empty());
    EXPECT_EQ(r.target, spec.target);
    EXPECT_EQ(r.target_index(), spec.target_index());
    EXPECT_EQ(r.joints[r.target_index()].handle_position, target_pos);
    EXPECT_EQ(min_remaining_steps(r, initial_state(r)), before);
    EXPECT_EQ(testing::enumerate_min_steps(r, initial_state(r)), before);
    changed = changed || !same_spec(r, spec);
  }
  EXPECT_TRUE(changed);
}

TEST(RandomizeLabels, StructurePreservedUpToRelabeling) {
  const auto spec = load_reference("sim-7-ID1").spec;
  const auto r = randomize_labels(spec, 17);
  // each edge keeps its geometric endpoints
  for (const auto& edge : r.edges) {
    const auto& locker = r.joints[r.index_of(edge.locker)];
    const auto& locked = r.joints[r.index_of(edge.locked)];
    const bool found = std::any_of(spec.edges.begin(), spec.edges.end(), [&](const auto& e) {
      return spec.joints[spec.index_of(e.locker)].handle_position == locker.handle_position &&
             spec.joints[spec.index_of(e.locked)].handle_position == locked.handle_position &&
             e.required_state == edge.required_state;
    });
    EXPECT_TRUE(found);
  }
  EXPECT_EQ(r.edges.size(), spec.edges.size());
}

TEST(RandomizeLabels, RejectsMovingTheTarget) {
  const auto spec = load_reference("sim-7-ID1").spec;
  std::vector<std::size_t> swap_target = {6, 1, 2, 3, 4, 5, 0};
  EXPECT_THROW(relabel(spec, swap_target), std::invalid_argument);
}

}  // namespace
}  // namespace lockbox
