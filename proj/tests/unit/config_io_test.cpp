#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "lockbox/core/config_io.hpp"

namespace lockbox {
namespace {

TEST(ConfigIo, RoundTripPreservesEverything) {
  const auto config = load_reference("sim-7-ID1");
  const auto again = config_from_json(to_json(config));
  EXPECT_EQ(to_json(again), to_json(config));
  EXPECT_EQ(again.scales.size(), config.scales.size());
}

TEST(ConfigIo, GoalDefaultsToComplementOfTargetInitialState) {
  auto doc = to_json(load_reference("physical-5").spec);
  doc.erase("goal_state");
  doc["joints"][4]["initial_state"] = 1;
  EXPECT_EQ(spec_from_json(doc).goal_state, 0);
}

TEST(ConfigIo, MissingKeysAreConfigErrors) {
  auto doc = to_json(load_reference("physical-5").spec);
  doc.erase("target");
  EXPECT_THROW(spec_from_json(doc), ConfigError);
  auto bad_kind = to_json(load_reference("physical-5").spec);
  bad_kind["joints"][0]["kind"] = "spherical";
  EXPECT_THROW(spec_from_json(bad_kind), ConfigError);
  EXPECT_THROW(load_reference("no-such-config"), ConfigError);
}

TEST(ConfigIo, SaveThenLoad) {
  const auto path = std::filesystem::temp_directory_path() / "lockbox_config_io_test.json";
  const auto config = load_reference("physical-5");
  save_config(config, path);
  EXPECT_EQ(to_json(load_config(path)), to_json(config));
  std::filesystem::remove(path);
}

// Golden checks on the shipped reference configs.
TEST(ReferenceConfigs, Physical5) {
  const auto spec = load_reference("physical-5").spec;
  EXPECT_TRUE(validate(spec).empty());
  ASSERT_EQ(spec.size(), 5U);
  EXPECT_EQ(spec.target, "E");
  EXPECT_EQ(min_remaining_steps(spec, initial_state(spec)), 5);  // D, C, A, B, E
  for (const auto& joint : spec.joints) EXPECT_TRUE(joint.mechanism.has_value()) << joint.id;
  EXPECT_EQ(spec.joints[0].kind, JointKind::revolute);
  EXPECT_EQ(spec.joints[3].kind, JointKind::revolute);
}

TEST(ReferenceConfigs, Sim7Id1AndScales) {
  const auto config = load_reference("sim-7-ID1");
  EXPECT_TRUE(validate(config.spec).empty());
  EXPECT_EQ(config.spec.target, "G");
  const std::map<std::size_t, int> expected = {{4, 4}, {5, 5}, {6, 6}, {7, 7}};
  for (const auto& [scale, steps] : expected) {
    const auto spec = spec_for_scale(config, scale);
    EXPECT_TRUE(validate(spec).empty());
    EXPECT_EQ(spec.size(), scale);
    EXPECT_EQ(min_remaining_steps(spec, initial_state(spec)), steps) << "scale " << scale;
  }
  // the five-joint variant is the physical lockbox
  const auto physical = load_reference("physical-5").spec;
  const auto five = spec_for_scale(config, 5);
  ASSERT_EQ(five.edges.size(), physical.edges.size());
  for (std::size_t i = 0; i < five.edges.size(); ++i) {
    EXPECT_EQ(five.edges[i].locker, physical.edges[i].locker);
    EXPECT_EQ(five.edges[i].locked, physical.edges[i].locked);
    EXPECT_EQ(five.edges[i].required_state, physical.edges[i].required_state);
  }
}

TEST(ReferenceConfigs, Sim7Id2IsReproducibleFromItsGeneratorParams) {
  const auto config = load_reference("sim-7-ID2");
  ASSERT_TRUE(config.generated_by.has_value());
  EXPECT_TRUE(validate(config.spec).empty());
  EXPECT_EQ(config.generated_by->distance_preference, 1.0);
  auto params = *config.generated_by;
  params.base_joints = load_reference("sim-7-ID1").spec.joints;
  params.name = config.spec.name;
  const auto regenerated = generate_random(params);
  EXPECT_EQ(to_json(regenerated), to_json(config.spec));
}

}  // namespace
}  // namespace lockbox
