#include "lockbox/planner/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace lockbox::planner {

namespace {

std::vector<std::string> ids_of(const LockboxSpec& spec) {
  std::vector<std::string> ids;
  for (const auto& joint : spec.joints) ids.push_back(joint.id);
  return ids;
}

LockboxSpec checked(LockboxSpec spec) {
  if (spec.joints.empty()) throw std::invalid_argument("environment needs at least one joint");
  const auto problems = validate(spec);
  if (!problems.empty()) {
    throw std::invalid_argument("invalid lockbox: " + problems.front().kind + " " +
                                problems.front().detail);
  }
  return spec;
}

}  // namespace

SymbolicEnvironment::SymbolicEnvironment(LockboxSpec spec, KindVisibility kinds)
    : spec_(checked(std::move(spec))),
      ids_(ids_of(spec_)),
      target_(spec_.target_index()),
      state_(initial_state(spec_)),
      kinds_(kinds),
      moved_once_(spec_.size(), false) {}

bool SymbolicEnvironment::try_manipulate(std::size_t joint) {
  auto outcome = manipulate(spec_, state_, joint);
  state_ = std::move(outcome.state);
  if (outcome.moved) moved_once_[joint] = true;
  return outcome.moved;
}

JointFeatures SymbolicEnvironment::features(std::size_t joint) const {
  const auto& j = spec_.joints.at(joint);
  const bool known = kinds_ == KindVisibility::always || moved_once_.at(joint);
  return {j.handle_position, known ? kind_code(j.kind) : 0};
}

const CacheEntry* ManipulationCache::find(std::size_t joint) const {
  const auto it = entries_.find(joint);
  return it == entries_.end() ? nullptr : &it->second;
}

KinematicEnvironment::KinematicEnvironment(LockboxSpec spec, sim::ControlParams params,
                                           std::uint64_t seed, bool reuse_models)
    : spec_(checked(std::move(spec))),
      ids_(ids_of(spec_)),
      target_(spec_.target_index()),
      state_(initial_state(spec_)),
      params_(params),
      rng_(seed),
      reuse_models_(reuse_models) {
  for (const auto& joint : spec_.joints) mechanisms_.push_back(sim::make_mechanism(joint));
}

bool KinematicEnvironment::at_end(std::size_t joint, int state) const {
  const auto& m = mechanisms_[joint];
  return std::abs(m.q - (state == 1 ? m.q_max : 0.0)) <= 1e-3 * m.q_max;
}

bool KinematicEnvironment::explore(std::size_t joint, bool locked) {
  auto& mech = mechanisms_[joint];
  std::vector<sim::TraceSample> local;
  auto* trace = record_trace_ ? &trace_ : &local;
  const std::size_t before = trace->size();
  const int from = state_.bits[joint];

  const auto probe = sim::wiggle(mech, locked, params_, trace);
  stats_.probes += probe.probes;
  bool moved = false;
  if (probe.movable) {
    auto follow =
        sim::follow_admissible_direction(mech, locked, probe.best_displacement, params_, rng_, trace);
    moved = follow.success && at_end(joint, 1 - from);
    if (moved) {
      const int kind = sim::classify_joint_type(follow.trajectory);
      cache_.store(joint, {std::move(follow.trajectory), from,
                           probe.best_displacement.normalized(), kind});
    } else {
      ++stats_.follow_failures;
    }
  }
  stats_.ticks += static_cast<int>(trace->size() - before);
  return moved;
}

bool KinematicEnvironment::replay(std::size_t joint, bool locked, const CacheEntry& entry) {
  std::vector<sim::TraceSample> local;
  auto* trace = record_trace_ ? &trace_ : &local;
  const std::size_t before = trace->size();
  const int from = state_.bits[joint];
  ++stats_.cache_hits;
  const auto path = from == entry.from_state ? entry.trajectory : entry.trajectory.reversed();
  const auto result = sim::replay_trajectory(mechanisms_[joint], locked, path, params_, trace);
  stats_.ticks += static_cast<int>(trace->size() - before);
  return result.success && at_end(joint, 1 - from);
}

bool KinematicEnvironment::try_manipulate(std::size_t joint) {
  if (joint >= mechanisms_.size()) throw std::out_of_range("joint index out of range");
  const bool locked = !is_unlocked(spec_, state_, joint);
  const int from = state_.bits[joint];
  const CacheEntry* entry = reuse_models_ ? cache_.find(joint) : nullptr;
  const bool moved = entry != nullptr ? replay(joint, locked, *entry) : explore(joint, locked);
  if (moved) {
    state_ = manipulate(spec_, state_, joint).state;
  } else {
    // binary joints: a partial motion is undone before the next attempt
    auto& mech = mechanisms_[joint];
    mech.q = from == 1 ? mech.q_max : 0.0;
    ++state_.step_count;
    state_.last_manipulated = joint;
  }
  return moved;
}

JointFeatures KinematicEnvironment::features(std::size_t joint) const {
  const CacheEntry* entry = cache_.find(joint);
  return {spec_.joints.at(joint).handle_position, entry != nullptr ? entry->kind : 0};
}

}  // namespace lockbox::planner
