#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lockbox/core/lockbox.hpp"

namespace lockbox {

struct DependencyMix {
  int one_to_one = 2;
  int many_to_one = 1;
  int bistable = 1;
};

struct Workspace {
  Eigen::Vector3d lo{-0.4, -0.1, 0.0};
  Eigen::Vector3d hi{0.4, 0.1, 0.6};
};

struct GeneratorParams {
  std::size_t n_joints = 4;
  DependencyMix dependency_mix;
  // -1: lockers drawn from the locked joint's nearest half; +1: farthest half;
  // in between: soft exponential weighting of Euclidean handle distance.
  double distance_preference = 0.0;
  Workspace workspace;
  std::uint64_t seed = 0;
  // When non-empty, fixes ids, kinds, positions and initial states; its size
  // must equal n_joints.
  std::vector<JointSpec> base_joints;
  // Fixed target id. Otherwise the joint with the deepest solution is chosen.
  std::optional<std::string> target;
  int min_solution_steps = 1;
  int max_attempts = 1000;
  std::string name = "generated";
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Default dependency mix for a lockbox of n joints.
DependencyMix default_mix(std::size_t n_joints);

// Candidate lockers of `locked`, ordered nearest first, restricted to the
// nearest (preference -1) or farthest (+1) ceil(N/2) joints at the extremes.
std::vector<std::size_t> locker_candidates(std::span<const JointSpec> joints, std::size_t locked,
                                           double distance_preference);

// Deterministic in params.seed; throws GenerationError after max_attempts
// rejected samples.
LockboxSpec generate_random(const GeneratorParams& params);

// New spec in which joint slot k holds the joint formerly at slot
// permutation[k], relabeled with the label slot k had before. The target
// slot must be a fixed point. Declaration order therefore changes while the
// label sequence stays the same.
LockboxSpec relabel(const LockboxSpec& spec, std::span<const std::size_t> permutation);

// Random permutation of all non-target joints.
LockboxSpec randomize_labels(const LockboxSpec& spec, std::uint64_t seed);

// Induced sub-lockbox over the given joints (in the given order).
LockboxSpec restrict_to(const LockboxSpec& spec, std::span<const std::string> joint_ids,
                        const std::string& target);

}  // namespace lockbox
